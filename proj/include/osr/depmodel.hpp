// Copyright 2026 The osrepair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OSR_DEPMODEL_HPP_
#define OSR_DEPMODEL_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "osr/constraints.hpp"
#include "osr/relation.hpp"

namespace osr {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RegressorKind { kLinear, kRidge, kTree, kGaussian };

RegressorKind regressor_kind_from_string(const std::string& name);
std::string to_string(RegressorKind kind);

// Abstract fitted map from a distance vector to a predicted distance.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual double predict_raw(const std::vector<double>& features) const = 0;
};

// A regressor owned by tuple `owner` for attribute `attr`: predicts the
// distance between owner's value and another tuple's value on `attr` from the
// distances on the remaining attributes.
struct DependencyModel {
  int owner = 0;
  int attr = 0;
  RegressorKind kind = RegressorKind::kLinear;
  std::shared_ptr<const Regressor> regressor;
};

struct DepParams {
  double gamma = 0.2;    // enhancement constant (> 0)
  int kappa = 10;        // training-neighborhood size (>= 1)
  int k = 4;             // providers kept per tuple (>= 1)
  double G = -1.0;       // normalization constant; < 0 means auto
  int model_pool = -1;   // number of model owners; < 0 or >= n means all
};

// All conformance quantities of one instance. Immutable once built; safe to
// share across threads.
class LossTable {
 public:
  // Pair conformance loss l(t_i, t_l): residual of predicting the i<->l
  // distances with t_l's models. Asymmetric.
  double pair_loss(int i, int l) const { return pair_loss_[idx(i, l)]; }
  // Per-attribute residual |d_ilj - f_lj(D_ilj)|. Needs trained models, so it
  // is unavailable on tables built from raw losses.
  double pair_attr_loss(int i, int l, int j) const;
  // Weighted pair value L(t_i, t_l) = sum_j (G - l(t_i,t_l;A_j)) * Gamma_i.
  double pair_value(int i, int l) const {
    return (attr_count_ * G_ - pair_loss_[idx(i, l)]) * gamma_factor_[i];
  }
  // Raw tuple loss l(t_i): sum of pair losses over the providers M(t_i).
  double tuple_raw_loss(int i) const { return tuple_raw_loss_[i]; }
  // Tuple value L(t_i): sum of pair values over M(t_i).
  double tuple_value(int i) const { return tuple_value_[i]; }

  int conflict_balance(int i) const { return u_[i]; }      // u_i
  double enhancement(int i) const { return gamma_factor_[i]; }  // Gamma_i

  // M(t_i): up to k provider ids, ordered by ascending pair loss then id.
  const std::vector<int>& providers(int i) const { return providers_[i]; }
  // Pruned candidate provider set, ordered by descending L(t_i, .) then id.
  const std::vector<int>& candidates(int i) const { return candidates_[i]; }

  int size() const { return n_; }
  int attr_count() const { return attr_count_; }
  double normalization() const { return G_; }
  const DepParams& params() const { return params_; }

  const DependencyModel& model(int owner, int attr) const;
  bool has_models() const { return !models_.empty(); }

  // Test/diagnostic entry point: derives every downstream quantity from a
  // caller-supplied pair-loss matrix instead of trained models.
  static LossTable from_raw(int n, int attr_count, std::vector<double> pair_loss,
                            const ConflictGraph& graph, const DepParams& params);

  // Copy with the candidate pruning disabled: every other tuple is a
  // candidate provider. Used to cross-check that pruning is lossless.
  LossTable with_all_candidates() const;

  friend LossTable build_loss_table(const Instance& inst, const ConflictGraph& graph,
                                    const DepParams& params, RegressorKind kind);

 private:
  std::size_t idx(int i, int l) const {
    return static_cast<std::size_t>(i) * n_ + l;
  }
  void finalize(const ConflictGraph& graph);

  int n_ = 0;
  int attr_count_ = 0;
  double G_ = 0.0;
  DepParams params_;
  std::vector<double> pair_loss_;    // n*n, diagonal unused
  std::vector<double> tuple_raw_loss_;
  std::vector<double> tuple_value_;
  std::vector<int> u_;
  std::vector<double> gamma_factor_;
  std::vector<std::vector<int>> providers_;
  std::vector<std::vector<int>> candidates_;
  std::vector<DependencyModel> models_;  // owner-major, attr-minor, pool only
  std::vector<int> model_owner_;         // tuple id -> model pool owner
  const Instance* instance_ = nullptr;
};

// The kappa tuples from I \ I_C (excluding l itself) closest to t_l by
// tuple_distance; truncated when the clean pool is smaller. Ties break on id.
std::vector<int> knn_nonconflict(const Instance& inst, const ConflictGraph& graph,
                                 int l, int kappa);

// Fits f_lj on all unordered pairs of {l} + knn_nonconflict(l, kappa):
// features distance_vector(a, b, j), target value_distance(a, b, j).
DependencyModel train_model(const Instance& inst, const ConflictGraph& graph,
                            int l, int j, int kappa, RegressorKind kind);

// Regressor output clamped into [0, 1].
double predict(const DependencyModel& model, const DistanceVector& v);

// Enhancement factor of Eq-style product form: u>0 -> prod_{s=1..u}(1+gamma/s),
// u=0 -> 1, u<0 -> reciprocal at |u|.
double gamma_factor(int u, double gamma);

// Trains all models and fills every loss quantity, including the pruned
// candidate sets. Gamma_i is computed once from the full instance and frozen.
LossTable build_loss_table(const Instance& inst, const ConflictGraph& graph,
                           const DepParams& params,
                           RegressorKind kind = RegressorKind::kLinear);

// Prop.-3-style pruning: pivot on the k-th best clean provider; keep every
// tuple whose pair value is at least the pivot's. Falls back to all providers
// when fewer than k clean providers exist.
std::vector<int> candidate_set(const LossTable& table, const ConflictGraph& graph,
                               int i, int k);

}  // namespace osr

#endif  // OSR_DEPMODEL_HPP_
