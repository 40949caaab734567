#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "modcut/error.hpp"

namespace modcut::lp {

/// Sparse row of a linear constraint `sum coef * x[index] <= upper`.
struct Row {
  std::vector<std::pair<std::size_t, double>> terms;
  double upper = 0.0;
};

enum class Status { optimal, infeasible, interrupted };

struct SimplexOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  std::size_t refactor_interval = 200;
  std::size_t stall_limit = 200;
  std::size_t iteration_limit = 0;  // 0 picks a size-based default
  /// Checked every few pivots; solve() returns `interrupted` once passed.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

using RowHandle = std::size_t;

/**
 * Bounded dual simplex on a dense tableau, minimizing c'x subject to
 * l <= x <= u and rows `a'x <= b`.
 *
 * Every variable is boxed: each row gets a slack s = b - a'x in
 * [0, b - min a'x], so a dual feasible start always exists (nonbasic
 * variables sit at the bound matching the sign of their reduced cost).
 * Rows can be added and removed between solves; the current basis is
 * kept, which makes re-solving after adding cuts cheap.
 *
 * The tableau holds B^-1 [A | I] together with B^-1 b. It is rebuilt from
 * the original rows with an LU factorization every `refactor_interval`
 * pivots and before optimality is declared.
 */
class DualSimplex {
 public:
  DualSimplex(std::vector<double> cost, std::vector<double> lower, std::vector<double> upper,
              SimplexOptions options = {})
      : options_(options), nv_(cost.size()), cost_(std::move(cost)) {
    if (lower.size() != nv_ || upper.size() != nv_) {
      throw ValidationError("bound vectors do not match the number of variables");
    }
    capacity_ = 8;
    const std::size_t cols = nv_ + capacity_;
    lower_.assign(cols, 0.0);
    upper_.assign(cols, 0.0);
    value_.assign(cols, 0.0);
    position_.assign(cols, kNonbasic);
    reduced_.assign(cols, 0.0);
    for (std::size_t j = 0; j < nv_; ++j) {
      if (!(lower[j] <= upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
        throw ValidationError("variable " + std::to_string(j) + " needs finite bounds l <= u");
      }
      lower_[j] = lower[j];
      upper_[j] = upper[j];
      reduced_[j] = cost_[j];
      value_[j] = cost_[j] >= 0.0 ? lower_[j] : upper_[j];
    }
    for (std::size_t s = capacity_; s-- > 0;) free_slots_.push_back(nv_ + s);
  }

  std::size_t variable_count() const noexcept { return nv_; }
  std::size_t row_count() const noexcept { return rows_.size(); }
  std::size_t iterations() const noexcept { return iterations_; }

  /// Adds `row`; the new slack enters the basis so the basis stays dual feasible.
  RowHandle add_row(Row row) {
    double min_activity = 0.0;
    for (const auto& [j, a] : row.terms) {
      if (j >= nv_) throw ValidationError("row references unknown variable");
      min_activity += a >= 0.0 ? a * lower_[j] : a * upper_[j];
    }
    if (free_slots_.empty()) grow();
    const std::size_t slack = free_slots_.back();
    free_slots_.pop_back();
    lower_[slack] = 0.0;
    // an infeasible row (b < min a'x) keeps a tiny range so the dual simplex proves infeasibility
    upper_[slack] = std::max(row.upper - min_activity, 0.0) + 1.0;
    reduced_[slack] = 0.0;

    std::vector<double> t(nv_ + capacity_, 0.0);
    double rhs = row.upper;
    for (const auto& [j, a] : row.terms) t[j] += a;
    t[slack] = 1.0;
    for (const auto& [j, a] : row.terms) {
      const std::size_t p = position_[j];
      if (p == kNonbasic || a == 0.0) continue;
      const auto& src = tableau_[p];
      for (std::size_t c = 0; c < t.size(); ++c) t[c] -= a * src[c];
      rhs -= a * rhs_[p];
    }
    for (std::size_t p = 0; p < basis_.size(); ++p) t[basis_[p]] = 0.0;
    t[slack] = 1.0;

    double activity = 0.0;
    for (const auto& [j, a] : row.terms) activity += a * value_[j];

    const RowHandle handle = next_handle_++;
    rows_.push_back({std::move(row), slack, handle});
    tableau_.push_back(std::move(t));
    rhs_.push_back(rhs);
    basis_.push_back(slack);
    position_[slack] = basis_.size() - 1;
    value_[slack] = rows_.back().row.upper - activity;
    return handle;
  }

  /// Removes the non-binding rows (basic slack) for which `pred(handle)` holds.
  template <typename Pred>
  std::size_t remove_rows_if(Pred pred) {
    std::size_t removed = 0;
    for (std::size_t r = rows_.size(); r-- > 0;) {
      const std::size_t slack = rows_[r].slack;
      if (position_[slack] == kNonbasic || !pred(rows_[r].handle)) continue;
      drop_row(r);
      ++removed;
    }
    return removed;
  }

  bool has_row(RowHandle h) const {
    return std::any_of(rows_.begin(), rows_.end(), [h](const auto& r) { return r.handle == h; });
  }

  Status solve() {
    const std::size_t limit = options_.iteration_limit
                                  ? options_.iteration_limit
                                  : 100000 + 50 * (nv_ + rows_.size());
    std::size_t since_refactor = 0;
    std::size_t stalled = 0;
    double last_objective = dual_objective();
    bool bland = false;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > limit) throw SolverError("dual simplex iteration limit reached");
      if (options_.deadline && iter % 16 == 0 && std::chrono::steady_clock::now() >= *options_.deadline) {
        return Status::interrupted;
      }
      if (since_refactor >= options_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
      auto leaving = choose_leaving(bland);
      if (!leaving) {
        if (since_refactor > 0) {
          refactor();
          since_refactor = 0;
          continue;
        }
        return Status::optimal;
      }
      const std::size_t r = *leaving;
      const std::size_t basic = basis_[r];
      const bool to_lower = value_[basic] < lower_[basic];
      auto entering = choose_entering(r, to_lower, bland);
      if (!entering) {
        if (since_refactor > 0) {
          refactor();
          since_refactor = 0;
          continue;
        }
        return Status::infeasible;
      }
      pivot(r, *entering, to_lower ? lower_[basic] : upper_[basic]);
      ++iterations_;
      ++since_refactor;

      const double objective = dual_objective();
      if (objective > last_objective + 1e-12 * (1.0 + std::abs(last_objective))) {
        last_objective = objective;
        stalled = 0;
        bland = false;
      } else if (++stalled > options_.stall_limit) {
        bland = true;
      }
    }
  }

  /// c'x at the current basic solution.
  double objective() const {
    double z = 0.0;
    for (std::size_t j = 0; j < nv_; ++j) z += cost_[j] * value_[j];
    return z;
  }

  std::vector<double> primal() const { return {value_.begin(), value_.begin() + nv_}; }

  /// (handle, slack b - a'x, slack basic) for every active row.
  struct RowState {
    RowHandle handle;
    double slack;
    bool basic;
  };
  std::vector<RowState> row_states() const {
    std::vector<RowState> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back({r.handle, value_[r.slack], position_[r.slack] != kNonbasic});
    return out;
  }

  /// Slack b - a'x of a row, or nullopt when the handle is not active.
  std::optional<double> slack(RowHandle h) const {
    for (const auto& r : rows_) {
      if (r.handle == h) return value_[r.slack];
    }
    return std::nullopt;
  }

 private:
  static constexpr std::size_t kNonbasic = static_cast<std::size_t>(-1);

  struct ActiveRow {
    Row row;
    std::size_t slack;
    RowHandle handle;
  };

  std::size_t columns() const { return nv_ + capacity_; }

  void grow() {
    const std::size_t old_cols = columns();
    const std::size_t extra = capacity_;
    capacity_ += extra;
    const std::size_t cols = columns();
    for (auto& t : tableau_) t.resize(cols, 0.0);
    lower_.resize(cols, 0.0);
    upper_.resize(cols, 0.0);
    value_.resize(cols, 0.0);
    position_.resize(cols, kNonbasic);
    reduced_.resize(cols, 0.0);
    for (std::size_t s = cols; s-- > old_cols;) free_slots_.push_back(s);
  }

  void drop_row(std::size_t r) {
    const std::size_t slack = rows_[r].slack;
    const std::size_t p = position_[slack];
    const std::size_t last = basis_.size() - 1;
    if (p != last) {
      std::swap(tableau_[p], tableau_[last]);
      std::swap(rhs_[p], rhs_[last]);
      std::swap(basis_[p], basis_[last]);
      position_[basis_[p]] = p;
    }
    tableau_.pop_back();
    rhs_.pop_back();
    basis_.pop_back();
    position_[slack] = kNonbasic;
    for (auto& t : tableau_) t[slack] = 0.0;
    value_[slack] = 0.0;
    reduced_[slack] = 0.0;
    lower_[slack] = upper_[slack] = 0.0;
    free_slots_.push_back(slack);
    rows_[r] = std::move(rows_.back());
    rows_.pop_back();
  }

  bool nonbasic_at_upper(std::size_t j) const {
    return value_[j] == upper_[j] && upper_[j] != lower_[j];
  }

  double dual_objective() const {
    // for a dual feasible basis, c'x of the basic solution is the dual value
    return objective();
  }

  std::optional<std::size_t> choose_leaving(bool bland) const {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t p = 0; p < basis_.size(); ++p) {
      const std::size_t j = basis_[p];
      const double x = value_[j];
      double violation = 0.0;
      if (x < lower_[j] - options_.primal_tolerance) violation = lower_[j] - x;
      else if (x > upper_[j] + options_.primal_tolerance) violation = x - upper_[j];
      if (violation <= 0.0) continue;
      if (bland) {
        if (!best || j < basis_[*best]) best = p;
      } else if (violation > best_score) {
        best_score = violation;
        best = p;
      }
    }
    return best;
  }

  // Harris two-pass ratio test; Bland mode takes the smallest admissible index.
  std::optional<std::size_t> choose_entering(std::size_t r, bool to_lower, bool bland) const {
    const auto& t = tableau_[r];
    const double piv_tol = options_.pivot_tolerance;
    const double dual_tol = options_.dual_tolerance;
    auto eligible = [&](std::size_t j) -> bool {
      if (position_[j] != kNonbasic || lower_[j] == upper_[j]) return false;
      const double a = t[j];
      if (std::abs(a) <= piv_tol) return false;
      const bool at_upper = nonbasic_at_upper(j);
      // leaving value must rise when heading to its lower bound, fall otherwise
      return to_lower ? (at_upper ? a > 0.0 : a < 0.0) : (at_upper ? a < 0.0 : a > 0.0);
    };
    auto ratio = [&](std::size_t j, double slack_d) {
      const double d = nonbasic_at_upper(j) ? -reduced_[j] : reduced_[j];
      return (std::max(d, 0.0) + slack_d) / std::abs(t[j]);
    };
    const std::size_t cols = columns();
    if (bland) {
      std::optional<std::size_t> best;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cols; ++j) {
        if (!eligible(j)) continue;
        const double q = ratio(j, 0.0);
        if (q < best_ratio - 1e-12) {
          best_ratio = q;
          best = j;
        }
      }
      return best;
    }
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j) {
      if (eligible(j)) bound = std::min(bound, ratio(j, dual_tol));
    }
    if (!std::isfinite(bound)) return std::nullopt;
    std::optional<std::size_t> best;
    double best_alpha = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (!eligible(j) || ratio(j, 0.0) > bound) continue;
      if (std::abs(t[j]) > best_alpha) {
        best_alpha = std::abs(t[j]);
        best = j;
      }
    }
    return best;
  }

  void pivot(std::size_t r, std::size_t q, double leaving_target) {
    auto& pivot_row = tableau_[r];
    const double alpha = pivot_row[q];
    const std::size_t leaving = basis_[r];
    const double step = (value_[leaving] - leaving_target) / alpha;

    for (std::size_t p = 0; p < basis_.size(); ++p) {
      if (p != r) value_[basis_[p]] -= tableau_[p][q] * step;
    }
    value_[q] += step;
    value_[leaving] = leaving_target;

    const std::size_t cols = columns();
    const double inv = 1.0 / alpha;
    pivot_nonzeros_.clear();
    for (std::size_t c = 0; c < cols; ++c) {
      if (pivot_row[c] != 0.0) {
        pivot_row[c] *= inv;
        pivot_nonzeros_.push_back(c);
      }
    }
    rhs_[r] *= inv;
    pivot_row[q] = 1.0;
    // the pivot row is usually sparse, so eliminate along its nonzeros only
    for (std::size_t p = 0; p < basis_.size(); ++p) {
      if (p == r) continue;
      auto& row = tableau_[p];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t c : pivot_nonzeros_) row[c] -= f * pivot_row[c];
      rhs_[p] -= f * rhs_[r];
      row[q] = 0.0;
    }
    const double dq = reduced_[q];
    if (dq != 0.0) {
      for (std::size_t c : pivot_nonzeros_) reduced_[c] -= dq * pivot_row[c];
    }
    reduced_[q] = 0.0;

    position_[leaving] = kNonbasic;
    position_[q] = r;
    basis_[r] = q;
  }

  // Rebuilds B^-1 [A | I], B^-1 b, basic values and reduced costs from the original rows.
  //
  // With rows split into tight ones T (slack nonbasic) and the rest S, and
  // basic columns into structurals and the slacks of S,
  //   B = [K 0; A_S 1]   so   B^-1 = [K^-1 0; -A_S K^-1 1],
  // where K = A[T, basic structurals] is square. Only K is factorized.
  void refactor() {
    const std::size_t m = basis_.size();
    if (m == 0) return;
    const std::size_t cols = columns();
    std::vector<std::size_t> slack_row(cols, kNonbasic);
    for (std::size_t i = 0; i < m; ++i) slack_row[rows_[i].slack] = i;
    std::vector<std::size_t> tight;
    for (std::size_t i = 0; i < m; ++i) {
      if (position_[rows_[i].slack] == kNonbasic) tight.push_back(i);
    }
    std::vector<std::size_t> kcol(nv_, kNonbasic);
    std::size_t k = 0;
    for (std::size_t p = 0; p < m; ++p) {
      if (basis_[p] < nv_) kcol[basis_[p]] = k++;
    }
    if (k != tight.size()) throw SolverError("basis and tight rows disagree");

    const auto ki = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd kinv(ki, ki);
    if (k > 0) {
      Eigen::MatrixXd kmat = Eigen::MatrixXd::Zero(ki, ki);
      for (std::size_t r = 0; r < k; ++r) {
        for (const auto& [j, a] : rows_[tight[r]].row.terms) {
          if (kcol[j] != kNonbasic) kmat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(kcol[j])) += a;
        }
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(kmat);
      kinv = lu.inverse();
      if (!kinv.allFinite()) throw SolverError("singular basis during refactorization");
    }

    // t += f * (a_i | e_slack(i)) for tight row r
    auto add_tight = [&](std::vector<double>& t, double& rhs, std::size_t r, double f) {
      const auto& row = rows_[tight[r]];
      for (const auto& [j, a] : row.row.terms) t[j] += f * a;
      t[row.slack] += f;
      rhs += f * row.row.upper;
    };
    std::vector<double> w(k);
    for (std::size_t p = 0; p < m; ++p) {
      auto& t = tableau_[p];
      std::fill(t.begin(), t.end(), 0.0);
      double rhs = 0.0;
      const std::size_t b = basis_[p];
      if (b < nv_) {
        const auto c = static_cast<Eigen::Index>(kcol[b]);
        for (std::size_t r = 0; r < k; ++r) {
          const double f = kinv(c, static_cast<Eigen::Index>(r));
          if (f != 0.0) add_tight(t, rhs, r, f);
        }
      } else {
        const auto& row = rows_[slack_row[b]];
        std::fill(w.begin(), w.end(), 0.0);
        for (const auto& [j, a] : row.row.terms) {
          if (kcol[j] == kNonbasic) continue;
          const auto c = static_cast<Eigen::Index>(kcol[j]);
          for (std::size_t r = 0; r < k; ++r) w[r] += a * kinv(c, static_cast<Eigen::Index>(r));
        }
        for (const auto& [j, a] : row.row.terms) t[j] += a;
        t[row.slack] += 1.0;
        rhs = row.row.upper;
        for (std::size_t r = 0; r < k; ++r) {
          if (w[r] != 0.0) add_tight(t, rhs, r, -w[r]);
        }
      }
      rhs_[p] = rhs;
    }
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < m; ++q) tableau_[p][basis_[q]] = p == q ? 1.0 : 0.0;
    }
    // basic values from x_B = B^-1 b - T_N x_N
    for (std::size_t p = 0; p < m; ++p) {
      double x = rhs_[p];
      const auto& t = tableau_[p];
      for (std::size_t j = 0; j < cols; ++j) {
        if (position_[j] == kNonbasic && t[j] != 0.0) x -= t[j] * value_[j];
      }
      value_[basis_[p]] = x;
    }
    // reduced costs d = c - c_B T
    for (std::size_t j = 0; j < cols; ++j) reduced_[j] = j < nv_ ? cost_[j] : 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      const std::size_t b = basis_[p];
      const double cb = b < nv_ ? cost_[b] : 0.0;
      if (cb == 0.0) continue;
      const auto& t = tableau_[p];
      for (std::size_t j = 0; j < cols; ++j) reduced_[j] -= cb * t[j];
    }
    for (std::size_t p = 0; p < m; ++p) reduced_[basis_[p]] = 0.0;
    restore_dual_feasibility();
  }

  // Boxed nonbasics with a wrong-signed reduced cost move to the opposite bound.
  void restore_dual_feasibility() {
    const std::size_t cols = columns();
    for (std::size_t j = 0; j < cols; ++j) {
      if (position_[j] != kNonbasic || lower_[j] == upper_[j]) continue;
      const bool at_upper = nonbasic_at_upper(j);
      double target = value_[j];
      if (!at_upper && reduced_[j] < -options_.dual_tolerance) target = upper_[j];
      else if (at_upper && reduced_[j] > options_.dual_tolerance) target = lower_[j];
      else continue;
      const double delta = target - value_[j];
      for (std::size_t p = 0; p < basis_.size(); ++p) {
        value_[basis_[p]] -= tableau_[p][j] * delta;
      }
      value_[j] = target;
    }
  }

  SimplexOptions options_;
  std::size_t nv_;
  std::size_t capacity_ = 0;
  std::vector<double> cost_;
  std::vector<double> lower_, upper_, value_, reduced_;
  std::vector<std::size_t> position_;
  std::vector<std::size_t> basis_;
  std::vector<std::vector<double>> tableau_;
  std::vector<double> rhs_;
  std::vector<ActiveRow> rows_;
  std::vector<std::size_t> free_slots_;
  std::vector<std::size_t> pivot_nonzeros_;
  RowHandle next_handle_ = 0;
  std::size_t iterations_ = 0;
};

}  // namespace modcut::lp
