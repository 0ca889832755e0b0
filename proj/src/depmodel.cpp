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

#include "osr/depmodel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

namespace osr {

namespace {

// Cholesky solve of (A + lambda*I) x = b for a symmetric matrix in row-major
// order. Returns false when the factorization breaks down.
bool cholesky_solve(std::vector<double> a, std::vector<double> b, int dim,
                    double lambda, std::vector<double>& out) {
  for (int i = 0; i < dim; ++i) a[i * dim + i] += lambda;
  for (int c = 0; c < dim; ++c) {
    double diag = a[c * dim + c];
    for (int k = 0; k < c; ++k) diag -= a[c * dim + k] * a[c * dim + k];
    if (!(diag > 0.0)) return false;
    diag = std::sqrt(diag);
    a[c * dim + c] = diag;
    for (int r = c + 1; r < dim; ++r) {
      double v = a[r * dim + c];
      for (int k = 0; k < c; ++k) v -= a[r * dim + k] * a[c * dim + k];
      a[r * dim + c] = v / diag;
    }
  }
  // Forward then backward substitution with the lower factor.
  for (int r = 0; r < dim; ++r) {
    double v = b[r];
    for (int k = 0; k < r; ++k) v -= a[r * dim + k] * b[k];
    b[r] = v / a[r * dim + r];
  }
  out.assign(dim, 0.0);
  for (int r = dim - 1; r >= 0; --r) {
    double v = b[r];
    for (int k = r + 1; k < dim; ++k) v -= a[k * dim + r] * out[k];
    out[r] = v / a[r * dim + r];
  }
  return true;
}

class LinearRegressor : public Regressor {
 public:
  LinearRegressor(const std::vector<std::vector<double>>& x,
                  const std::vector<double>& y, double ridge_lambda) {
    const int dim = static_cast<int>(x.empty() ? 0 : x[0].size());
    coef_.assign(dim, 0.0);
    std::vector<double> gram(static_cast<std::size_t>(dim) * dim, 0.0);
    std::vector<double> rhs(dim, 0.0);
    for (std::size_t r = 0; r < x.size(); ++r) {
      for (int a = 0; a < dim; ++a) {
        rhs[a] += x[r][a] * y[r];
        for (int b = 0; b <= a; ++b) gram[a * dim + b] += x[r][a] * x[r][b];
      }
    }
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) gram[a * dim + b] = gram[b * dim + a];
    // Plain normal equations first; singular Gram falls back to a tiny ridge.
    if (ridge_lambda <= 0.0 && cholesky_solve(gram, rhs, dim, 0.0, coef_)) return;
    double lambda = ridge_lambda > 0.0 ? ridge_lambda : 1e-6;
    while (!cholesky_solve(gram, rhs, dim, lambda, coef_)) lambda *= 10.0;
  }

  double predict_raw(const std::vector<double>& f) const override {
    double v = 0.0;
    for (std::size_t a = 0; a < coef_.size() && a < f.size(); ++a)
      v += coef_[a] * f[a];
    return v;
  }

 private:
  std::vector<double> coef_;
};

class TreeRegressor : public Regressor {
 public:
  TreeRegressor(const std::vector<std::vector<double>>& x,
                const std::vector<double>& y) {
    std::vector<int> all(x.size());
    std::iota(all.begin(), all.end(), 0);
    root_ = build(x, y, all, 0);
  }

  double predict_raw(const std::vector<double>& f) const override {
    int node = root_;
    while (!nodes_[node].leaf) {
      const Node& nd = nodes_[node];
      node = f[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes_[node].value;
  }

 private:
  struct Node {
    bool leaf = true;
    double value = 0.0;
    int feature = 0;
    double threshold = 0.0;
    int left = -1, right = -1;
  };

  static constexpr int kMaxDepth = 6;

  int build(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
            const std::vector<int>& rows, int depth) {
    double mean = 0.0;
    for (int r : rows) mean += y[r];
    mean /= static_cast<double>(rows.size());

    int node = static_cast<int>(nodes_.size());
    nodes_.push_back({true, mean, 0, 0.0, -1, -1});
    if (depth >= kMaxDepth || rows.size() < 2) return node;

    double base_sse = 0.0;
    for (int r : rows) base_sse += (y[r] - mean) * (y[r] - mean);
    if (base_sse <= 1e-18) return node;

    const int dim = static_cast<int>(x[rows[0]].size());
    double best_sse = base_sse;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<int> order = rows;
    for (int f = 0; f < dim; ++f) {
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (x[a][f] != x[b][f]) return x[a][f] < x[b][f];
        return a < b;
      });
      double left_sum = 0.0, left_sq = 0.0;
      double total_sum = 0.0, total_sq = 0.0;
      for (int r : order) {
        total_sum += y[r];
        total_sq += y[r] * y[r];
      }
      for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        int r = order[p];
        left_sum += y[r];
        left_sq += y[r] * y[r];
        if (x[order[p]][f] == x[order[p + 1]][f]) continue;
        double nl = static_cast<double>(p + 1);
        double nr = static_cast<double>(order.size() - p - 1);
        double sse = (left_sq - left_sum * left_sum / nl) +
                     ((total_sq - left_sq) -
                      (total_sum - left_sum) * (total_sum - left_sum) / nr);
        if (sse + 1e-12 < best_sse) {
          best_sse = sse;
          best_feature = f;
          best_threshold = 0.5 * (x[order[p]][f] + x[order[p + 1]][f]);
        }
      }
    }
    if (best_feature < 0) return node;

    std::vector<int> left_rows, right_rows;
    for (int r : rows)
      (x[r][best_feature] <= best_threshold ? left_rows : right_rows).push_back(r);
    nodes_[node].leaf = false;
    nodes_[node].feature = best_feature;
    nodes_[node].threshold = best_threshold;
    nodes_[node].left = build(x, y, left_rows, depth + 1);
    nodes_[node].right = build(x, y, right_rows, depth + 1);
    return node;
  }

  std::vector<Node> nodes_;
  int root_ = 0;
};

// Gaussian-process regression with an RBF kernel; the length scale is the
// median pairwise feature distance of the training rows.
class GaussianRegressor : public Regressor {
 public:
  GaussianRegressor(const std::vector<std::vector<double>>& x,
                    const std::vector<double>& y)
      : rows_(x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> dists;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        double d = sq_dist(x[a], x[b]);
        if (d > 0.0) dists.push_back(std::sqrt(d));
      }
    if (!dists.empty()) {
      std::sort(dists.begin(), dists.end());
      scale_ = dists[dists.size() / 2];
    }
    if (scale_ <= 0.0) scale_ = 1.0;

    std::vector<double> kernel(static_cast<std::size_t>(n) * n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        kernel[a * n + b] = rbf(sq_dist(x[a], x[b]));
    double jitter = 1e-6;
    while (!cholesky_solve(kernel, y, n, jitter, alpha_)) jitter *= 10.0;
  }

  double predict_raw(const std::vector<double>& f) const override {
    double v = 0.0;
    for (std::size_t a = 0; a < rows_.size(); ++a)
      v += alpha_[a] * rbf(sq_dist(rows_[a], f));
    return v;
  }

 private:
  static double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
      double d = a[p] - b[p];
      s += d * d;
    }
    return s;
  }
  double rbf(double sq) const { return std::exp(-sq / (2.0 * scale_ * scale_)); }

  std::vector<std::vector<double>> rows_;
  std::vector<double> alpha_;
  double scale_ = 1.0;
};

std::shared_ptr<const Regressor> fit_regressor(
    RegressorKind kind, const std::vector<std::vector<double>>& x,
    const std::vector<double>& y) {
  switch (kind) {
    case RegressorKind::kLinear:
      return std::make_shared<LinearRegressor>(x, y, 0.0);
    case RegressorKind::kRidge:
      return std::make_shared<LinearRegressor>(x, y, 0.1);
    case RegressorKind::kTree:
      return std::make_shared<TreeRegressor>(x, y);
    case RegressorKind::kGaussian:
      return std::make_shared<GaussianRegressor>(x, y);
  }
  throw ModelError("unknown regressor kind");
}

void parallel_for(int begin, int end, const std::function<void(int)>& body) {
  int extent = end - begin;
  unsigned hw = std::thread::hardware_concurrency();
  int workers = static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
  if (extent < 64 || workers <= 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  int chunk = (extent + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    int lo = begin + w * chunk;
    int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

// Greedy k-center over tuple_distance: deterministic pool of model owners.
std::vector<int> select_model_pool(const Instance& inst, int pool_size) {
  const int n = inst.size();
  std::vector<int> pool{0};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (int step = 1; step < pool_size; ++step) {
    int last = pool.back();
    int best = -1;
    double best_dist = -1.0;
    for (int t = 0; t < n; ++t) {
      nearest[t] = std::min(nearest[t], tuple_distance(inst, t, last));
      if (nearest[t] > best_dist) {
        best_dist = nearest[t];
        best = t;
      }
    }
    if (best_dist <= 0.0) break;
    pool.push_back(best);
    nearest[best] = 0.0;
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

RegressorKind regressor_kind_from_string(const std::string& name) {
  if (name == "linear") return RegressorKind::kLinear;
  if (name == "ridge") return RegressorKind::kRidge;
  if (name == "tree") return RegressorKind::kTree;
  if (name == "gaussian") return RegressorKind::kGaussian;
  throw ModelError("unknown regressor kind: " + name);
}

std::string to_string(RegressorKind kind) {
  switch (kind) {
    case RegressorKind::kLinear: return "linear";
    case RegressorKind::kRidge: return "ridge";
    case RegressorKind::kTree: return "tree";
    case RegressorKind::kGaussian: return "gaussian";
  }
  return "?";
}

std::vector<int> knn_nonconflict(const Instance& inst, const ConflictGraph& graph,
                                 int l, int kappa) {
  std::vector<int> clean;
  for (int t = 0; t < inst.size(); ++t)
    if (!graph.in_conflict[t] && t != l) clean.push_back(t);
  if (clean.empty()) throw ModelError("no clean training tuples");

  std::vector<double> dist(clean.size());
  for (std::size_t p = 0; p < clean.size(); ++p)
    dist[p] = tuple_distance(inst, l, clean[p]);
  std::vector<std::size_t> order(clean.size());
  std::iota(order.begin(), order.end(), 0);
  auto closer = [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return clean[a] < clean[b];
  };
  std::size_t take = std::min<std::size_t>(clean.size(), static_cast<std::size_t>(kappa));
  if (take < clean.size())
    std::nth_element(order.begin(), order.begin() + take, order.end(), closer);
  std::sort(order.begin(), order.begin() + take, closer);
  std::vector<int> out(take);
  for (std::size_t p = 0; p < take; ++p) out[p] = clean[order[p]];
  return out;
}

DependencyModel train_model(const Instance& inst, const ConflictGraph& graph,
                            int l, int j, int kappa, RegressorKind kind) {
  std::vector<int> pool = knn_nonconflict(inst, graph, l, kappa);
  pool.push_back(l);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (pool.size() < 2) throw ModelError("training pool too small");

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (std::size_t a = 0; a < pool.size(); ++a)
    for (std::size_t b = a + 1; b < pool.size(); ++b) {
      x.push_back(distance_vector(inst, pool[a], pool[b], j).entries);
      y.push_back(value_distance(inst, pool[a], pool[b], j));
    }

  DependencyModel model;
  model.owner = l;
  model.attr = j;
  model.kind = kind;
  model.regressor = fit_regressor(kind, x, y);
  return model;
}

double predict(const DependencyModel& model, const DistanceVector& v) {
  double raw = model.regressor->predict_raw(v.entries);
  return std::clamp(raw, 0.0, 1.0);
}

double gamma_factor(int u, double gamma) {
  if (u == 0) return 1.0;
  double prod = 1.0;
  int magnitude = u > 0 ? u : -u;
  for (int s = 1; s <= magnitude; ++s) prod *= 1.0 + gamma / static_cast<double>(s);
  return u > 0 ? prod : 1.0 / prod;
}

double LossTable::pair_attr_loss(int i, int l, int j) const {
  if (models_.empty() || instance_ == nullptr)
    throw ModelError("per-attribute losses unavailable on raw loss tables");
  double d = value_distance(*instance_, i, l, j);
  DistanceVector v = distance_vector(*instance_, i, l, j);
  return std::abs(d - predict(model(l, j), v));
}

const DependencyModel& LossTable::model(int owner, int attr) const {
  if (models_.empty()) throw ModelError("loss table holds no trained models");
  return models_[static_cast<std::size_t>(model_owner_[owner]) * attr_count_ + attr];
}

std::vector<int> candidate_set(const LossTable& table, const ConflictGraph& graph,
                               int i, int k) {
  const int n = table.size();
  std::vector<int> clean;
  for (int t = 0; t < n; ++t)
    if (!graph.in_conflict[t] && t != i) clean.push_back(t);

  auto better = [&](int a, int b) {
    double la = table.pair_loss(i, a), lb = table.pair_loss(i, b);
    if (la != lb) return la < lb;  // descending L == ascending loss
    return a < b;
  };
  std::vector<int> result;
  if (static_cast<int>(clean.size()) < k) {
    for (int t = 0; t < n; ++t)
      if (t != i) result.push_back(t);
  } else {
    // Pivot: the clean provider with exactly k clean tuples at or above its
    // pair value. Everything at or above the pivot stays a candidate.
    if (static_cast<int>(clean.size()) > k)
      std::nth_element(clean.begin(), clean.begin() + k - 1, clean.end(), better);
    double pivot_loss = table.pair_loss(i, clean[k - 1]);
    for (int t = 0; t < n; ++t)
      if (t != i && table.pair_loss(i, t) <= pivot_loss) result.push_back(t);
  }
  std::sort(result.begin(), result.end(), better);
  return result;
}

void LossTable::finalize(const ConflictGraph& graph) {
  const int n = n_;
  const int k = params_.k;

  providers_.assign(n, {});
  tuple_raw_loss_.assign(n, 0.0);
  std::vector<int> others;
  for (int i = 0; i < n; ++i) {
    others.clear();
    others.reserve(n - 1);
    for (int l = 0; l < n; ++l)
      if (l != i) others.push_back(l);
    auto better = [&](int a, int b) {
      double la = pair_loss(i, a), lb = pair_loss(i, b);
      if (la != lb) return la < lb;
      return a < b;
    };
    if (static_cast<int>(others.size()) > k) {
      std::nth_element(others.begin(), others.begin() + k, others.end(), better);
      others.resize(k);
    }
    std::sort(others.begin(), others.end(), better);
    providers_[i] = others;
    for (int l : providers_[i]) tuple_raw_loss_[i] += pair_loss(i, l);
  }

  u_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int nb : graph.adjacency[i]) {
      if (tuple_raw_loss_[i] < tuple_raw_loss_[nb]) ++u_[i];
      else if (tuple_raw_loss_[i] > tuple_raw_loss_[nb]) --u_[i];
    }
  }
  gamma_factor_.assign(n, 1.0);
  for (int i = 0; i < n; ++i) gamma_factor_[i] = gamma_factor(u_[i], params_.gamma);

  tuple_value_.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int l : providers_[i]) tuple_value_[i] += pair_value(i, l);

  candidates_.assign(n, {});
  for (int i = 0; i < n; ++i) candidates_[i] = candidate_set(*this, graph, i, k);
}

LossTable LossTable::with_all_candidates() const {
  LossTable copy = *this;
  for (int i = 0; i < copy.n_; ++i) {
    std::vector<int> all;
    all.reserve(copy.n_ - 1);
    for (int l = 0; l < copy.n_; ++l)
      if (l != i) all.push_back(l);
    std::stable_sort(all.begin(), all.end(), [&](int a, int b) {
      double la = copy.pair_loss(i, a), lb = copy.pair_loss(i, b);
      if (la != lb) return la < lb;
      return a < b;
    });
    copy.candidates_[i] = std::move(all);
  }
  return copy;
}

namespace {

void validate_params(const DepParams& params) {
  if (!(params.gamma > 0.0)) throw ModelError("gamma must be > 0");
  if (params.kappa < 1) throw ModelError("kappa must be >= 1");
  if (params.k < 1) throw ModelError("k must be >= 1");
}

}  // namespace

LossTable LossTable::from_raw(int n, int attr_count, std::vector<double> pair_loss,
                              const ConflictGraph& graph, const DepParams& params) {
  validate_params(params);
  LossTable table;
  table.n_ = n;
  table.attr_count_ = attr_count;
  table.params_ = params;
  table.pair_loss_ = std::move(pair_loss);
  if (params.G >= 0.0) {
    table.G_ = params.G;
  } else {
    double max_loss = 0.0;
    for (double v : table.pair_loss_) max_loss = std::max(max_loss, v);
    double basis = max_loss / static_cast<double>(attr_count);
    table.G_ = basis > 0.0 ? 1.05 * basis : 1.0;
  }
  table.finalize(graph);
  return table;
}

LossTable build_loss_table(const Instance& inst, const ConflictGraph& graph,
                           const DepParams& params, RegressorKind kind) {
  validate_params(params);
  const int n = inst.size();
  const int m = inst.attr_count();

  LossTable table;
  table.n_ = n;
  table.attr_count_ = m;
  table.params_ = params;
  table.instance_ = &inst;

  // Model owners: all tuples by default, otherwise a greedy k-center pool with
  // every other tuple mapped to its nearest pool member.
  std::vector<int> pool;
  if (params.model_pool > 0 && params.model_pool < n)
    pool = select_model_pool(inst, params.model_pool);
  else {
    pool.resize(n);
    std::iota(pool.begin(), pool.end(), 0);
  }
  std::vector<int> slot(n, -1);
  for (std::size_t p = 0; p < pool.size(); ++p) slot[pool[p]] = static_cast<int>(p);
  table.model_owner_.assign(n, 0);
  for (int t = 0; t < n; ++t) {
    if (slot[t] >= 0) {
      table.model_owner_[t] = t;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    int rep = pool[0];
    for (int c : pool) {
      double d = tuple_distance(inst, t, c);
      if (d < best) {
        best = d;
        rep = c;
      }
    }
    table.model_owner_[t] = rep;
  }

  table.models_.resize(pool.size() * static_cast<std::size_t>(m));
  std::vector<std::string> train_errors(pool.size());
  parallel_for(0, static_cast<int>(pool.size()), [&](int p) {
    try {
      for (int j = 0; j < m; ++j)
        table.models_[static_cast<std::size_t>(p) * m + j] =
            train_model(inst, graph, pool[p], j, params.kappa, kind);
    } catch (const std::exception& e) {
      train_errors[p] = e.what();
    }
  });
  for (const std::string& err : train_errors)
    if (!err.empty()) throw ModelError(err);
  std::vector<int> pool_slot(n, 0);
  for (int t = 0; t < n; ++t) pool_slot[t] = slot[table.model_owner_[t]];

  // Fill the pair-loss matrix. Each unordered pair shares its distance vector;
  // the two directions differ only in which tuple's models predict.
  table.pair_loss_.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> max_attr_loss_per_row(n, 0.0);
  parallel_for(0, n, [&](int i) {
    std::vector<double> dist(m);
    DistanceVector features;
    features.entries.resize(m);
    double local_max = 0.0;
    for (int l = i + 1; l < n; ++l) {
      for (int j = 0; j < m; ++j) dist[j] = value_distance(inst, i, l, j);
      double loss_il = 0.0, loss_li = 0.0;
      for (int j = 0; j < m; ++j) {
        features.entries[0] = 1.0;
        int pos = 1;
        for (int a = 0; a < m; ++a)
          if (a != j) features.entries[pos++] = dist[a];
        const DependencyModel& by_l =
            table.models_[static_cast<std::size_t>(pool_slot[l]) * m + j];
        const DependencyModel& by_i =
            table.models_[static_cast<std::size_t>(pool_slot[i]) * m + j];
        double r_il = std::abs(dist[j] - predict(by_l, features));
        double r_li = std::abs(dist[j] - predict(by_i, features));
        loss_il += r_il;
        loss_li += r_li;
        local_max = std::max({local_max, r_il, r_li});
      }
      table.pair_loss_[static_cast<std::size_t>(i) * n + l] = loss_il;
      table.pair_loss_[static_cast<std::size_t>(l) * n + i] = loss_li;
    }
    max_attr_loss_per_row[i] = local_max;
  });

  if (params.G >= 0.0) {
    table.G_ = params.G;
  } else {
    double max_attr_loss = 0.0;
    for (double v : max_attr_loss_per_row) max_attr_loss = std::max(max_attr_loss, v);
    table.G_ = max_attr_loss > 0.0 ? 1.05 * max_attr_loss : 1.0;
  }
  table.finalize(graph);
  return table;
}

}  // namespace osr
