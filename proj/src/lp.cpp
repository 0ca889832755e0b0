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

#include "osr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

namespace osr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kDegenerateStep = 1e-11;
constexpr int kBlandTrigger = 64;  // degenerate pivots before Bland's rule
// Components whose dense tableau would exceed this entry count are handed to
// the sparse revised simplex instead.
constexpr std::size_t kDenseTableauLimit = 4u << 20;

// Sparse LU for revised-simplex bases: left-looking elimination with row
// pivoting by magnitude. Columns are processed shortest-first; fill flows
// strictly toward later pivot positions, so ascending position order is a
// valid elimination order for the reach set of each column.
class SparseLu {
 public:
  // cols[slot] holds (row, value) pairs of the basis column in that slot.
  // Returns false on a structurally or numerically singular basis.
  bool factor(const std::vector<std::vector<std::pair<int, double>>>& cols) {
    m_ = static_cast<int>(cols.size());
    lcol_.assign(m_, {});
    ucol_.assign(m_, {});
    udiag_.assign(m_, 0.0);
    prow_.assign(m_, -1);
    pinv_.assign(m_, -1);
    slot_of_pos_.resize(m_);
    std::iota(slot_of_pos_.begin(), slot_of_pos_.end(), 0);
    std::stable_sort(slot_of_pos_.begin(), slot_of_pos_.end(),
                     [&](int a, int b) { return cols[a].size() < cols[b].size(); });

    std::vector<double> work(m_, 0.0);
    std::vector<int> mark(m_, -1);      // epoch per position
    std::vector<int> row_mark(m_, -1);  // epoch per touched row
    std::vector<int> reach, touched, stack;
    for (int step = 0; step < m_; ++step) {
      int slot = slot_of_pos_[step];
      reach.clear();
      touched.clear();
      for (auto [r, v] : cols[slot]) {
        if (row_mark[r] != step) {
          row_mark[r] = step;
          work[r] = 0.0;
          touched.push_back(r);
        }
        work[r] += v;
        // Collect every finished pivot position reachable through L.
        int pos = pinv_[r];
        if (pos >= 0 && mark[pos] != step) {
          stack.push_back(pos);
          mark[pos] = step;
          while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            reach.push_back(s);
            for (auto [child_row, lv] : lcol_[s]) {
              (void)lv;
              int child = pinv_[child_row];
              if (child >= 0 && mark[child] != step) {
                mark[child] = step;
                stack.push_back(child);
              }
            }
          }
        }
      }
      std::sort(reach.begin(), reach.end());
      for (int s : reach) {
        int pr = prow_[s];
        if (row_mark[pr] != step) continue;
        double xj = work[pr];
        if (xj == 0.0) continue;
        for (auto [r, lv] : lcol_[s]) {
          if (row_mark[r] != step) {
            row_mark[r] = step;
            work[r] = 0.0;
            touched.push_back(r);
            int pos = pinv_[r];
            // Fill on a pivoted row: that position is always later than s
            // and already in the sorted reach list by construction.
            (void)pos;
          }
          work[r] -= xj * lv;
        }
      }

      int pivot_row = -1;
      double pivot_mag = 0.0;
      for (int r : touched) {
        if (pinv_[r] >= 0) continue;
        double mag = std::abs(work[r]);
        if (mag > pivot_mag) {
          pivot_mag = mag;
          pivot_row = r;
        }
      }
      if (pivot_row < 0 || pivot_mag < 1e-11) return false;

      for (int s : reach) {
        int pr = prow_[s];
        if (row_mark[pr] == step && work[pr] != 0.0)
          ucol_[step].emplace_back(s, work[pr]);
      }
      double diag = work[pivot_row];
      udiag_[step] = diag;
      for (int r : touched)
        if (pinv_[r] < 0 && r != pivot_row && work[r] != 0.0)
          lcol_[step].emplace_back(r, work[r] / diag);
      prow_[step] = pivot_row;
      pinv_[pivot_row] = step;
    }
    return true;
  }

  // Solves B x = b. Input indexed by row; output indexed by basis slot.
  void ftran(std::vector<double>& b) const {
    for (int pos = 0; pos < m_; ++pos) {
      double xj = b[prow_[pos]];
      if (xj == 0.0) continue;
      for (auto [r, lv] : lcol_[pos]) b[r] -= xj * lv;
    }
    std::vector<double> v(m_, 0.0);
    for (int pos = 0; pos < m_; ++pos) v[pos] = b[prow_[pos]];
    for (int pos = m_ - 1; pos >= 0; --pos) {
      double x = v[pos] / udiag_[pos];
      v[pos] = x;
      if (x != 0.0)
        for (auto [s, uv] : ucol_[pos]) v[s] -= x * uv;
    }
    b.assign(m_, 0.0);
    for (int pos = 0; pos < m_; ++pos) b[slot_of_pos_[pos]] = v[pos];
  }

  // Solves B^T y = c. Input indexed by basis slot; output indexed by row.
  void btran(std::vector<double>& c) const {
    std::vector<double> v(m_, 0.0);
    for (int pos = 0; pos < m_; ++pos) v[pos] = c[slot_of_pos_[pos]];
    for (int pos = 0; pos < m_; ++pos) {
      double x = v[pos];
      for (auto [s, uv] : ucol_[pos]) x -= uv * v[s];
      v[pos] = x / udiag_[pos];
    }
    c.assign(m_, 0.0);
    for (int pos = m_ - 1; pos >= 0; --pos) {
      double x = v[pos];
      for (auto [r, lv] : lcol_[pos]) x -= lv * c[r];
      c[prow_[pos]] = x;
    }
  }

 private:
  int m_ = 0;
  std::vector<std::vector<std::pair<int, double>>> lcol_, ucol_;
  std::vector<double> udiag_;
  std::vector<int> prow_, pinv_, slot_of_pos_;
};

// Primal bounded-variable simplex on a dense tableau. Columns are structural
// variables, then one slack per row, then artificials for rows whose initial
// slack is negative (phase one drives those to zero).
class Simplex {
 public:
  Simplex(const LpModel& model, long iteration_limit)
      : iteration_limit_(iteration_limit) {
    n_struct_ = static_cast<int>(model.variables.size());
    rows_ = static_cast<int>(model.constraints.size());

    lower_.reserve(n_struct_ + rows_);
    upper_.reserve(n_struct_ + rows_);
    for (const LpVariable& v : model.variables) {
      lower_.push_back(v.lower);
      upper_.push_back(v.upper);
    }
    for (int r = 0; r < rows_; ++r) {
      lower_.push_back(0.0);
      upper_.push_back(kInf);
    }

    // Nonbasic structurals start at the bound nearer the objective direction?
    // No: start at lower, which keeps phase-one bookkeeping simple.
    xval_.assign(n_struct_ + rows_, 0.0);
    for (int c = 0; c < n_struct_; ++c) xval_[c] = lower_[c];

    std::vector<double> initial_slack(rows_);
    for (int r = 0; r < rows_; ++r) {
      double lhs = 0.0;
      for (auto [var, coeff] : model.constraints[r].coeffs)
        lhs += coeff * xval_[var];
      initial_slack[r] = model.constraints[r].rhs - lhs;
    }

    std::vector<int> artificial_row;
    for (int r = 0; r < rows_; ++r)
      if (initial_slack[r] < -kPivotTol) artificial_row.push_back(r);
    n_art_ = static_cast<int>(artificial_row.size());
    cols_ = n_struct_ + rows_ + n_art_;
    for (int a = 0; a < n_art_; ++a) {
      lower_.push_back(0.0);
      upper_.push_back(kInf);
      xval_.push_back(0.0);
    }

    if (static_cast<std::size_t>(rows_) * cols_ > 4 * kDenseTableauLimit)
      throw SolveError("LP component too large for the dense simplex (" +
                       std::to_string(rows_) + " rows x " +
                       std::to_string(cols_) + " cols)");
    tab_.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
    rhs_.assign(rows_, 0.0);
    basis_.assign(rows_, -1);
    state_.assign(cols_, kAtLower);

    std::vector<int> art_of_row(rows_, -1);
    for (int a = 0; a < n_art_; ++a) art_of_row[artificial_row[a]] = a;

    for (int r = 0; r < rows_; ++r) {
      double sign = art_of_row[r] >= 0 ? -1.0 : 1.0;
      double* row = &tab_[static_cast<std::size_t>(r) * cols_];
      for (auto [var, coeff] : model.constraints[r].coeffs) row[var] += sign * coeff;
      row[n_struct_ + r] = sign;  // slack
      if (art_of_row[r] >= 0) {
        row[n_struct_ + rows_ + art_of_row[r]] = 1.0;
        basis_[r] = n_struct_ + rows_ + art_of_row[r];
        rhs_[r] = -initial_slack[r];
      } else {
        basis_[r] = n_struct_ + r;
        rhs_[r] = initial_slack[r];
      }
      state_[basis_[r]] = kBasic;
      xval_[basis_[r]] = rhs_[r];
    }

    obj_.assign(cols_, 0.0);
    for (int c = 0; c < n_struct_; ++c) obj_[c] = model.objective[c];
  }

  LpStatus run() {
    if (n_art_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (int a = 0; a < n_art_; ++a) phase1[n_struct_ + rows_ + a] = -1.0;
      LpStatus st = optimize(phase1);
      if (st != LpStatus::kOptimal) return st;
      double infeasibility = 0.0;
      for (int a = 0; a < n_art_; ++a) infeasibility += value(n_struct_ + rows_ + a);
      if (infeasibility > 1e-7) return LpStatus::kInfeasible;
      // Freeze artificials at zero for phase two.
      for (int a = 0; a < n_art_; ++a) {
        int col = n_struct_ + rows_ + a;
        upper_[col] = 0.0;
        if (state_[col] != kBasic) xval_[col] = 0.0;
      }
    }
    return optimize(obj_);
  }

  double value(int col) const {
    if (state_[col] == kBasic) {
      for (int r = 0; r < rows_; ++r)
        if (basis_[r] == col) return rhs_[r];
    }
    return xval_[col];
  }

  void extract(std::vector<double>& out) const {
    out.assign(n_struct_, 0.0);
    std::vector<double> current(cols_);
    for (int c = 0; c < cols_; ++c) current[c] = xval_[c];
    for (int r = 0; r < rows_; ++r) current[basis_[r]] = rhs_[r];
    for (int c = 0; c < n_struct_; ++c)
      out[c] = std::clamp(current[c], lower_[c], upper_[c]);
  }

  long iterations() const { return iterations_; }

 private:
  static constexpr int kAtLower = 0;
  static constexpr int kAtUpper = 1;
  static constexpr int kBasic = 2;

  double tab(int r, int c) const { return tab_[static_cast<std::size_t>(r) * cols_ + c]; }
  double* row_ptr(int r) { return &tab_[static_cast<std::size_t>(r) * cols_]; }

  void compute_reduced_costs(const std::vector<double>& objective,
                             std::vector<double>& d) const {
    d = objective;
    for (int r = 0; r < rows_; ++r) {
      double cb = objective[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &tab_[static_cast<std::size_t>(r) * cols_];
      for (int c = 0; c < cols_; ++c) d[c] -= cb * row[c];
    }
    for (int r = 0; r < rows_; ++r) d[basis_[r]] = 0.0;
  }

  LpStatus optimize(const std::vector<double>& objective) {
    std::vector<double> d;
    compute_reduced_costs(objective, d);
    int degenerate_streak = 0;
    long since_refresh = 0;

    while (true) {
      if (iterations_ >= iteration_limit_) return LpStatus::kIterationLimit;
      if (since_refresh >= 512) {
        compute_reduced_costs(objective, d);
        since_refresh = 0;
      }

      bool bland = degenerate_streak >= kBlandTrigger;
      int entering = -1;
      int enter_dir = 0;
      double best_score = kCostTol;
      for (int c = 0; c < cols_; ++c) {
        if (state_[c] == kBasic) continue;
        if (upper_[c] <= lower_[c]) continue;  // fixed column
        double dc = d[c];
        int dir = 0;
        if (state_[c] == kAtLower && dc > kCostTol) dir = +1;
        else if (state_[c] == kAtUpper && dc < -kCostTol) dir = -1;
        if (dir == 0) continue;
        if (bland) {
          entering = c;
          enter_dir = dir;
          break;
        }
        double score = std::abs(dc);
        if (score > best_score) {
          best_score = score;
          entering = c;
          enter_dir = dir;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      // Ratio test: step t moves the entering variable by enter_dir * t and
      // each basic value by -enter_dir * t * tab[r][entering]. Minimum step
      // wins; ties go to the lowest basic variable index (Bland-compatible),
      // and a row pivot beats an equal bound-to-bound flip.
      double t_limit = upper_[entering] - lower_[entering];  // bound flip
      int leave_row = -1;
      int leave_to = kAtLower;
      for (int r = 0; r < rows_; ++r) {
        double delta = enter_dir * tab(r, entering);
        double t;
        int to;
        if (delta > kPivotTol) {
          t = (rhs_[r] - lower_[basis_[r]]) / delta;
          to = kAtLower;
        } else if (delta < -kPivotTol && upper_[basis_[r]] < kInf) {
          t = (rhs_[r] - upper_[basis_[r]]) / delta;
          to = kAtUpper;
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;
        bool take;
        if (leave_row < 0)
          take = t <= t_limit;
        else
          take = t < t_limit - kDegenerateStep ||
                 (t <= t_limit + kDegenerateStep && basis_[r] < basis_[leave_row]);
        if (take) {
          t_limit = std::min(t_limit, t);
          leave_row = r;
          leave_to = to;
        }
      }
      if (!(t_limit < kInf))
        throw SolveError("unbounded direction in bounded LP (internal)");

      ++iterations_;
      ++since_refresh;
      degenerate_streak = t_limit <= kDegenerateStep ? degenerate_streak + 1 : 0;

      double step = enter_dir * t_limit;
      for (int r = 0; r < rows_; ++r) rhs_[r] -= step * tab(r, entering);

      if (leave_row < 0) {
        // Bound-to-bound move.
        state_[entering] = state_[entering] == kAtLower ? kAtUpper : kAtLower;
        xval_[entering] = state_[entering] == kAtUpper ? upper_[entering]
                                                       : lower_[entering];
        continue;
      }

      int leaving = basis_[leave_row];
      state_[leaving] = leave_to;
      xval_[leaving] = leave_to == kAtUpper ? upper_[leaving] : lower_[leaving];

      double enter_value = xval_[entering] + step;
      double pivot = tab(leave_row, entering);
      double* prow = row_ptr(leave_row);
      double inv = 1.0 / pivot;
      for (int c = 0; c < cols_; ++c) prow[c] *= inv;
      for (int r = 0; r < rows_; ++r) {
        if (r == leave_row) continue;
        double factor = tab(r, entering);
        if (factor == 0.0) continue;
        double* row = row_ptr(r);
        for (int c = 0; c < cols_; ++c) row[c] -= factor * prow[c];
      }
      double dfactor = d[entering];
      if (dfactor != 0.0)
        for (int c = 0; c < cols_; ++c) d[c] -= dfactor * prow[c];

      basis_[leave_row] = entering;
      state_[entering] = kBasic;
      rhs_[leave_row] = enter_value;
      d[entering] = 0.0;
    }
  }

  int n_struct_ = 0;
  int rows_ = 0;
  int n_art_ = 0;
  int cols_ = 0;
  long iterations_ = 0;
  long iteration_limit_;
  std::vector<double> lower_, upper_, xval_, obj_, rhs_;
  std::vector<double> tab_;
  std::vector<int> basis_, state_;
};

// Revised simplex over sparse columns with product-form eta updates and
// periodic refactorization. Same pivot rules as the dense tableau code, so
// both paths are deterministic; this one carries large components.
class RevisedSimplex {
 public:
  RevisedSimplex(const LpModel& model, long iteration_limit)
      : limit_(iteration_limit) {
    n_struct_ = static_cast<int>(model.variables.size());
    rows_ = static_cast<int>(model.constraints.size());
    rhs_row_.assign(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) rhs_row_[r] = model.constraints[r].rhs;

    for (const LpVariable& v : model.variables) {
      lower_.push_back(v.lower);
      upper_.push_back(v.upper);
    }
    acol_.resize(n_struct_);
    for (int r = 0; r < rows_; ++r)
      for (auto [var, coeff] : model.constraints[r].coeffs)
        acol_[var].emplace_back(r, coeff);

    xval_.assign(n_struct_, 0.0);
    for (int c = 0; c < n_struct_; ++c) xval_[c] = lower_[c];

    std::vector<double> initial_slack = rhs_row_;
    for (int c = 0; c < n_struct_; ++c)
      if (xval_[c] != 0.0)
        for (auto [r, coeff] : acol_[c]) initial_slack[r] -= coeff * xval_[c];

    for (int r = 0; r < rows_; ++r) {
      acol_.push_back({{r, 1.0}});  // slack
      lower_.push_back(0.0);
      upper_.push_back(kInf);
      xval_.push_back(0.0);
    }
    art_of_row_.assign(rows_, -1);
    for (int r = 0; r < rows_; ++r) {
      if (initial_slack[r] >= -kPivotTol) continue;
      art_of_row_[r] = static_cast<int>(acol_.size());
      acol_.push_back({{r, -1.0}});
      lower_.push_back(0.0);
      upper_.push_back(kInf);
      xval_.push_back(0.0);
    }
    cols_ = static_cast<int>(acol_.size());
    n_art_ = cols_ - n_struct_ - rows_;

    state_.assign(cols_, kAtLower);
    basic_.assign(rows_, -1);
    for (int r = 0; r < rows_; ++r) {
      basic_[r] = art_of_row_[r] >= 0 ? art_of_row_[r] : n_struct_ + r;
      state_[basic_[r]] = kBasic;
    }
    obj_.assign(cols_, 0.0);
    for (int c = 0; c < n_struct_; ++c) obj_[c] = model.objective[c];
  }

  LpStatus run() {
    if (!refactor()) throw SolveError("initial basis factorization failed");
    if (n_art_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (int c = n_struct_ + rows_; c < cols_; ++c) phase1[c] = -1.0;
      LpStatus st = optimize(phase1);
      if (st != LpStatus::kOptimal) return st;
      double infeasibility = 0.0;
      for (int c = n_struct_ + rows_; c < cols_; ++c) infeasibility += value(c);
      if (infeasibility > 1e-7) return LpStatus::kInfeasible;
      for (int c = n_struct_ + rows_; c < cols_; ++c) {
        upper_[c] = 0.0;
        if (state_[c] != kBasic) xval_[c] = 0.0;
      }
    }
    return optimize(obj_);
  }

  double value(int col) const {
    if (state_[col] == kBasic) {
      for (int s = 0; s < rows_; ++s)
        if (basic_[s] == col) return beta_[s];
    }
    return xval_[col];
  }

  void extract(std::vector<double>& out) const {
    out.assign(n_struct_, 0.0);
    std::vector<double> current(xval_);
    for (int s = 0; s < rows_; ++s) current[basic_[s]] = beta_[s];
    for (int c = 0; c < n_struct_; ++c)
      out[c] = std::clamp(current[c], lower_[c], upper_[c]);
  }

  long iterations() const { return iterations_; }

 private:
  static constexpr int kAtLower = 0;
  static constexpr int kAtUpper = 1;
  static constexpr int kBasic = 2;
  static constexpr int kRefactorEvery = 64;

  struct Eta {
    int slot = 0;
    double pivot = 0.0;
    std::vector<std::pair<int, double>> entries;  // (slot, w) without the pivot
  };

  bool refactor() {
    std::vector<std::vector<std::pair<int, double>>> basis_cols(rows_);
    for (int s = 0; s < rows_; ++s) basis_cols[s] = acol_[basic_[s]];
    if (!lu_.factor(basis_cols)) return false;
    etas_.clear();
    // beta = B^-1 (b - N x_N)
    std::vector<double> r = rhs_row_;
    for (int c = 0; c < cols_; ++c) {
      if (state_[c] == kBasic || xval_[c] == 0.0) continue;
      for (auto [row, coeff] : acol_[c]) r[row] -= coeff * xval_[c];
    }
    lu_.ftran(r);
    beta_ = std::move(r);
    return true;
  }

  void ftran(std::vector<double>& v) const {
    lu_.ftran(v);
    for (const Eta& e : etas_) {
      double piv = v[e.slot] / e.pivot;
      v[e.slot] = piv;
      if (piv != 0.0)
        for (auto [s, w] : e.entries) v[s] -= w * piv;
    }
  }

  void btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double sum = v[it->slot];
      for (auto [s, w] : it->entries) sum -= w * v[s];
      v[it->slot] = sum / it->pivot;
    }
    lu_.btran(v);
  }

  LpStatus optimize(const std::vector<double>& objective) {
    int degenerate_streak = 0;
    std::vector<double> y, w, d(cols_);
    while (true) {
      if (iterations_ >= limit_) return LpStatus::kIterationLimit;
      if (static_cast<int>(etas_.size()) >= kRefactorEvery && !refactor())
        throw SolveError("basis refactorization failed");

      y.assign(rows_, 0.0);
      for (int s = 0; s < rows_; ++s) y[s] = objective[basic_[s]];
      btran(y);

      bool bland = degenerate_streak >= kBlandTrigger;
      int entering = -1;
      int enter_dir = 0;
      double best_score = kCostTol;
      for (int c = 0; c < cols_; ++c) {
        if (state_[c] == kBasic) continue;
        if (upper_[c] <= lower_[c]) continue;
        double dc = objective[c];
        for (auto [row, coeff] : acol_[c]) dc -= coeff * y[row];
        d[c] = dc;
        int dir = 0;
        if (state_[c] == kAtLower && dc > kCostTol) dir = +1;
        else if (state_[c] == kAtUpper && dc < -kCostTol) dir = -1;
        if (dir == 0) continue;
        if (bland) {
          entering = c;
          enter_dir = dir;
          break;
        }
        double score = std::abs(dc);
        if (score > best_score) {
          best_score = score;
          entering = c;
          enter_dir = dir;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      w.assign(rows_, 0.0);
      for (auto [row, coeff] : acol_[entering]) w[row] += coeff;
      ftran(w);

      double t_limit = upper_[entering] - lower_[entering];
      int leave_slot = -1;
      int leave_to = kAtLower;
      for (int s = 0; s < rows_; ++s) {
        double delta = enter_dir * w[s];
        double t;
        int to;
        if (delta > kPivotTol) {
          t = (beta_[s] - lower_[basic_[s]]) / delta;
          to = kAtLower;
        } else if (delta < -kPivotTol && upper_[basic_[s]] < kInf) {
          t = (beta_[s] - upper_[basic_[s]]) / delta;
          to = kAtUpper;
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;
        bool take;
        if (leave_slot < 0)
          take = t <= t_limit;
        else
          take = t < t_limit - kDegenerateStep ||
                 (t <= t_limit + kDegenerateStep && basic_[s] < basic_[leave_slot]);
        if (take) {
          t_limit = std::min(t_limit, t);
          leave_slot = s;
          leave_to = to;
        }
      }
      if (!(t_limit < kInf))
        throw SolveError("unbounded direction in bounded LP (internal)");

      ++iterations_;
      degenerate_streak = t_limit <= kDegenerateStep ? degenerate_streak + 1 : 0;

      double step = enter_dir * t_limit;
      for (int s = 0; s < rows_; ++s) beta_[s] -= step * w[s];

      if (leave_slot < 0) {
        state_[entering] = state_[entering] == kAtLower ? kAtUpper : kAtLower;
        xval_[entering] =
            state_[entering] == kAtUpper ? upper_[entering] : lower_[entering];
        continue;
      }

      int leaving = basic_[leave_slot];
      state_[leaving] = leave_to;
      xval_[leaving] = leave_to == kAtUpper ? upper_[leaving] : lower_[leaving];

      double enter_value = xval_[entering] + step;
      Eta eta;
      eta.slot = leave_slot;
      eta.pivot = w[leave_slot];
      if (std::abs(eta.pivot) < 1e-10) {
        // Unstable pivot through the eta file: rebuild and retry the pass.
        basic_[leave_slot] = entering;
        state_[entering] = kBasic;
        beta_[leave_slot] = enter_value;
        if (!refactor()) throw SolveError("basis refactorization failed");
        continue;
      }
      for (int s = 0; s < rows_; ++s)
        if (s != leave_slot && w[s] != 0.0) eta.entries.emplace_back(s, w[s]);
      etas_.push_back(std::move(eta));

      basic_[leave_slot] = entering;
      state_[entering] = kBasic;
      beta_[leave_slot] = enter_value;
    }
  }

  int n_struct_ = 0, rows_ = 0, n_art_ = 0, cols_ = 0;
  long iterations_ = 0;
  long limit_;
  std::vector<std::vector<std::pair<int, double>>> acol_;
  std::vector<double> lower_, upper_, xval_, obj_, rhs_row_, beta_;
  std::vector<int> state_, basic_, art_of_row_;
  SparseLu lu_;
  std::vector<Eta> etas_;
};

struct Component {
  std::vector<int> vars;
  std::vector<int> rows;
};

// Union-find: variables sharing a constraint land in one component.
std::vector<Component> split_components(const LpModel& model) {
  const int n = static_cast<int>(model.variables.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> rank(n, 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
  };
  for (const LpConstraint& row : model.constraints)
    for (std::size_t p = 1; p < row.coeffs.size(); ++p)
      unite(row.coeffs[0].first, row.coeffs[p].first);

  std::vector<int> comp_of(n, -1);
  std::vector<Component> comps;
  for (int v = 0; v < n; ++v) {
    int root = find(v);
    if (comp_of[root] < 0) {
      comp_of[root] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[comp_of[root]].vars.push_back(v);
  }
  for (int r = 0; r < static_cast<int>(model.constraints.size()); ++r) {
    const LpConstraint& row = model.constraints[r];
    if (row.coeffs.empty()) continue;  // constant row, checked separately
    comps[comp_of[find(row.coeffs[0].first)]].rows.push_back(r);
  }
  return comps;
}

}  // namespace

int LpModel::add_variable(const std::string& name, double lower, double upper) {
  variables.push_back({name, lower, upper});
  objective.push_back(0.0);
  return static_cast<int>(variables.size()) - 1;
}

int LpModel::add_constraint(double rhs) {
  constraints.push_back({{}, rhs});
  return static_cast<int>(constraints.size()) - 1;
}

void LpModel::add_to_constraint(int row, int var, double coeff) {
  constraints[row].coeffs.emplace_back(var, coeff);
}

SolveOptions SolveOptions::from_env() {
  SolveOptions opts;
  if (const char* v = std::getenv("OSR_LP_ITERATION_LIMIT")) opts.iteration_limit = std::atol(v);
  if (const char* v = std::getenv("OSR_ILP_NODE_LIMIT")) opts.node_limit = std::atol(v);
  return opts;
}

LpSolution solve_lp(const LpModel& model, const SolveOptions& options) {
  LpSolution sol;
  sol.values.assign(model.variables.size(), 0.0);

  for (const LpConstraint& row : model.constraints) {
    if (row.coeffs.empty() && row.rhs < -kPivotTol) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    for (auto [var, coeff] : row.coeffs) {
      (void)coeff;
      if (var < 0 || var >= static_cast<int>(model.variables.size()))
        throw SolveError("constraint references undeclared variable");
    }
  }

  std::vector<Component> comps = split_components(model);
  long remaining = options.iteration_limit;
  for (const Component& comp : comps) {
    if (comp.rows.empty()) {
      // Unconstrained box variables: sit at the profitable bound.
      for (int v : comp.vars) {
        double c = model.objective[v];
        const LpVariable& var = model.variables[v];
        double pick = c > 0.0 ? var.upper : var.lower;
        if (!std::isfinite(pick))
          throw SolveError("unbounded variable with nonzero objective");
        sol.values[v] = pick;
      }
      continue;
    }
    LpModel sub;
    std::vector<int> local(model.variables.size(), -1);
    for (int v : comp.vars) {
      local[v] = sub.add_variable(model.variables[v].name, model.variables[v].lower,
                                  model.variables[v].upper);
      sub.objective[local[v]] = model.objective[v];
    }
    for (int r : comp.rows) {
      int row = sub.add_constraint(model.constraints[r].rhs);
      for (auto [var, coeff] : model.constraints[r].coeffs)
        sub.add_to_constraint(row, local[var], coeff);
    }

    std::size_t tableau_cells =
        sub.constraints.size() * (sub.variables.size() + 2 * sub.constraints.size());
    bool use_revised = options.engine == 2 ||
                       (options.engine == 0 && tableau_cells > kDenseTableauLimit);
    LpStatus st;
    std::vector<double> values;
    long used = 0;
    if (use_revised) {
      RevisedSimplex simplex(sub, remaining);
      st = simplex.run();
      used = simplex.iterations();
      if (st == LpStatus::kOptimal) simplex.extract(values);
    } else {
      Simplex simplex(sub, remaining);
      st = simplex.run();
      used = simplex.iterations();
      if (st == LpStatus::kOptimal) simplex.extract(values);
    }
    sol.iterations += used;
    remaining -= used;
    if (st != LpStatus::kOptimal) {
      sol.status = st;
      return sol;
    }
    for (std::size_t p = 0; p < comp.vars.size(); ++p)
      sol.values[comp.vars[p]] = values[p];
  }

  sol.status = LpStatus::kOptimal;
  sol.objective_value = 0.0;
  for (std::size_t v = 0; v < model.variables.size(); ++v)
    sol.objective_value += model.objective[v] * sol.values[v];
  return sol;
}

namespace {

struct BnbNode {
  double bound = 0.0;
  long seq = 0;
  std::vector<std::pair<int, int>> fixings;  // (var, 0 or 1)
  LpSolution relaxation;
};

struct BnbOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // max-heap on bound
    return a.seq > b.seq;
  }
};

int pick_branch_variable(const LpModel& model, const LpSolution& sol, double tol) {
  int best = -1;
  double best_frac = tol;
  bool best_is_primary = false;
  for (int v = 0; v < static_cast<int>(sol.values.size()); ++v) {
    double x = sol.values[v];
    double frac = std::min(x - std::floor(x), std::ceil(x) - x);
    if (frac <= tol) continue;
    bool primary = model.variables[v].name.empty() || model.variables[v].name[0] != 'y';
    if (best < 0 || (primary && !best_is_primary) ||
        (primary == best_is_primary && frac > best_frac)) {
      best = v;
      best_frac = frac;
      best_is_primary = primary;
    }
  }
  return best;
}

}  // namespace

LpSolution solve_ilp(const LpModel& model, const SolveOptions& options) {
  constexpr double kIntTol = 1e-6;
  constexpr double kBoundTol = 1e-9;

  auto solve_with = [&](const std::vector<std::pair<int, int>>& fixings) {
    LpModel fixed = model;
    for (auto [var, value] : fixings) {
      if (value == 0) fixed.variables[var].upper = fixed.variables[var].lower;
      else fixed.variables[var].lower = fixed.variables[var].upper;
    }
    return solve_lp(fixed, options);
  };

  LpSolution root = solve_with({});
  long total_iterations = root.iterations;
  if (root.status != LpStatus::kOptimal) return root;

  if (pick_branch_variable(model, root, kIntTol) < 0) {
    root.nodes = 0;
    return root;
  }

  bool have_incumbent = false;
  LpSolution incumbent;
  long nodes = 0;
  long seq = 0;

  std::priority_queue<BnbNode, std::vector<BnbNode>, BnbOrder> open;
  open.push({root.objective_value, seq++, {}, root});

  auto finish = [&](LpStatus status) {
    LpSolution result = have_incumbent ? incumbent : LpSolution{};
    result.status = status;
    result.iterations = total_iterations;
    result.nodes = nodes;
    return result;
  };

  while (!open.empty()) {
    BnbNode node = open.top();
    open.pop();
    if (have_incumbent && node.bound <= incumbent.objective_value + kBoundTol)
      continue;
    if (nodes >= options.node_limit) return finish(LpStatus::kIterationLimit);
    ++nodes;

    int branch_var = pick_branch_variable(model, node.relaxation, kIntTol);
    for (int value : {0, 1}) {
      std::vector<std::pair<int, int>> fixings = node.fixings;
      fixings.emplace_back(branch_var, value);
      LpSolution child = solve_with(fixings);
      total_iterations += child.iterations;
      if (child.status == LpStatus::kIterationLimit)
        return finish(LpStatus::kIterationLimit);
      if (child.status != LpStatus::kOptimal) continue;
      if (have_incumbent &&
          child.objective_value <= incumbent.objective_value + kBoundTol)
        continue;
      if (pick_branch_variable(model, child, kIntTol) < 0) {
        incumbent = child;
        have_incumbent = true;
      } else {
        open.push({child.objective_value, seq++, std::move(fixings), std::move(child)});
      }
    }
  }

  return finish(have_incumbent ? LpStatus::kOptimal : LpStatus::kInfeasible);
}

SolutionClass classify_solution(const LpSolution& sol, double eps) {
  bool has_half = false;
  for (double v : sol.values) {
    if (std::abs(v) <= eps || std::abs(v - 1.0) <= eps) continue;
    if (std::abs(v - 0.5) <= eps) {
      has_half = true;
      continue;
    }
    return SolutionClass::kOther;
  }
  return has_half ? SolutionClass::kHalfIntegral : SolutionClass::kIntegral;
}

std::string to_string(SolutionClass c) {
  switch (c) {
    case SolutionClass::kIntegral: return "integral";
    case SolutionClass::kHalfIntegral: return "half-integral";
    case SolutionClass::kOther: return "other";
  }
  return "?";
}

void write_lp(const LpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SolveError("cannot open LP dump path: " + path);
  out << "\\ osrepair model dump\nMaximize\n obj:";
  bool first = true;
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    if (model.objective[v] == 0.0) continue;
    out << (first ? " " : " + ") << model.objective[v] << ' '
        << model.variables[v].name;
    first = false;
  }
  if (first) out << " 0 " << (model.variables.empty() ? "x" : model.variables[0].name);
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < model.constraints.size(); ++r) {
    out << " c" << r << ":";
    bool lead = true;
    for (auto [var, coeff] : model.constraints[r].coeffs) {
      out << (lead ? " " : " + ") << coeff << ' ' << model.variables[var].name;
      lead = false;
    }
    if (lead) out << " 0 " << model.variables[0].name;
    out << " <= " << model.constraints[r].rhs << "\n";
  }
  out << "Bounds\n";
  for (const LpVariable& v : model.variables)
    out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << "\n";
  out << "End\n";
}

}  // namespace osr
