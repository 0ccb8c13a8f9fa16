#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bess/errors.hpp"
#include "bess/lp.hpp"

namespace bess::lp {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

void LpProblem::validate() const {
  if (objective.size() != n_vars || var_bounds.size() != n_vars) {
    throw DimensionMismatch(fmt::format("objective/bounds length must equal n_vars ({})", n_vars));
  }
  const auto check_rows = [&](const std::vector<LinearConstraint>& rows, const char* what) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].coefficients.size() != n_vars) {
        throw DimensionMismatch(fmt::format("{} row {} has {} coefficients, expected {}", what,
                                            i, rows[i].coefficients.size(), n_vars));
      }
      if (!std::isfinite(rows[i].rhs)) {
        throw InvalidArgument(fmt::format("{} row {} has a non-finite rhs", what, i));
      }
      for (double a : rows[i].coefficients) {
        if (!std::isfinite(a)) {
          throw InvalidArgument(fmt::format("{} row {} has a non-finite coefficient", what, i));
        }
      }
    }
  };
  check_rows(eq_constraints, "equality");
  check_rows(ineq_constraints, "inequality");
  for (std::size_t j = 0; j < n_vars; ++j) {
    if (!std::isfinite(objective[j])) throw InvalidArgument("non-finite objective coefficient");
    const auto& b = var_bounds[j];
    if (!std::isfinite(b.lower) || std::isnan(b.upper) || b.upper == -kInfinity) {
      throw InvalidArgument(fmt::format("variable {} needs a finite lower bound", j));
    }
  }
}

double max_constraint_violation(const LpProblem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  const auto dot = [&](const LinearConstraint& c) {
    double s = 0.0;
    for (std::size_t j = 0; j < problem.n_vars; ++j) s += c.coefficients[j] * x[j];
    return s;
  };
  for (const auto& c : problem.eq_constraints) worst = std::max(worst, std::abs(dot(c) - c.rhs));
  for (const auto& c : problem.ineq_constraints) worst = std::max(worst, dot(c) - c.rhs);
  return worst;
}

double max_bound_violation(const LpProblem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < problem.n_vars; ++j) {
    worst = std::max(worst, problem.var_bounds[j].lower - x[j]);
    worst = std::max(worst, x[j] - problem.var_bounds[j].upper);
  }
  return worst;
}

double evaluate_objective(const LpProblem& problem, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < problem.n_vars; ++j) s += problem.objective[j] * x[j];
  return s;
}

namespace {

constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kPhaseOneTol = 1e-7;
constexpr double kRatioTieTol = 1e-12;
constexpr int kDegenerateRunBeforeBland = 40;
constexpr int kRefreshEvery = 64;

/// Dense LU with partial pivoting, used to re-derive the final basic
/// solution and the duals from the original data.
class DenseLu {
 public:
  explicit DenseLu(std::size_t n, std::vector<double> a) : n_(n), lu_(std::move(a)), perm_(n) {
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n_; ++i) {
        if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
      }
      if (std::abs(at(p, k)) < 1e-12) throw NumericalBreakdown("singular simplex basis");
      if (p != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(at(p, j), at(k, j));
        std::swap(perm_[p], perm_[k]);
      }
      const double inv = 1.0 / at(k, k);
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double f = at(i, k) * inv;
        at(i, k) = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < n_; ++j) at(i, j) -= f * at(k, j);
      }
    }
  }

  // Solves A x = b.
  std::vector<double> solve(const std::vector<double>& b) const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < i; ++k) x[i] -= at(i, k) * x[k];
    }
    for (std::size_t i = n_; i-- > 0;) {
      for (std::size_t k = i + 1; k < n_; ++k) x[i] -= at(i, k) * x[k];
      x[i] /= at(i, i);
    }
    return x;
  }

  // Solves A^T y = c.
  std::vector<double> solve_transposed(const std::vector<double>& c) const {
    // A = P^T L U  =>  A^T = U^T L^T P
    std::vector<double> z(c);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < i; ++k) z[i] -= at(k, i) * z[k];
      z[i] /= at(i, i);
    }
    for (std::size_t i = n_; i-- > 0;) {
      for (std::size_t k = i + 1; k < n_; ++k) z[i] -= at(k, i) * z[k];
    }
    std::vector<double> y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[perm_[i]] = z[i];
    return y;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return lu_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return lu_[i * n_ + j]; }

  std::size_t n_;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
};

enum class VarState : unsigned char { basic, at_lower, at_upper };

class Simplex {
 public:
  explicit Simplex(const LpProblem& p)
      : p_(p),
        n_(p.n_vars),
        me_(p.eq_constraints.size()),
        mi_(p.ineq_constraints.size()),
        m_(me_ + mi_),
        cols_(n_ + mi_) {}

  LpSolution run() {
    LpSolution out;
    for (const auto& b : p_.var_bounds) {
      if (b.lower > b.upper) {
        out.status = LpStatus::infeasible;
        return out;
      }
    }
    setup();

    if (has_artificials()) {
      phase_one_costs();
      const LpStatus s = iterate(/*phase_one=*/true);
      if (s != LpStatus::optimal) throw NumericalBreakdown("phase one did not converge");
      double infeasibility = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (is_artificial(basis_[i])) infeasibility += beta_[i];
      }
      if (infeasibility > kPhaseOneTol * (1.0 + rhs_scale_)) {
        out.status = LpStatus::infeasible;
        out.iterations = iterations_;
        return out;
      }
      drive_out_artificials();
    }
    phase_two_ = true;
    phase_two_costs();
    const LpStatus s = iterate(/*phase_one=*/false);
    out.iterations = iterations_;
    if (s == LpStatus::unbounded) {
      out.status = LpStatus::unbounded;
      return out;
    }
    polish(out);
    out.status = LpStatus::optimal;
    return out;
  }

 private:
  // Basis entries >= cols_ denote the artificial variable of row (entry - cols_).
  bool is_artificial(std::size_t col) const { return col >= cols_; }
  bool has_artificials() const {
    return std::any_of(basis_.begin(), basis_.end(), [&](std::size_t c) { return is_artificial(c); });
  }

  double& tab(std::size_t i, std::size_t j) { return tab_[i * cols_ + j]; }
  double tab(std::size_t i, std::size_t j) const { return tab_[i * cols_ + j]; }

  const std::vector<double>& row_coeffs(std::size_t i) const {
    return i < me_ ? p_.eq_constraints[i].coefficients : p_.ineq_constraints[i - me_].coefficients;
  }
  double row_rhs(std::size_t i) const {
    return i < me_ ? p_.eq_constraints[i].rhs : p_.ineq_constraints[i - me_].rhs;
  }

  // Original coefficient of column j in row i (structural or slack).
  double coeff(std::size_t i, std::size_t j) const {
    if (j < n_) return row_coeffs(i)[j];
    return (i >= me_ && j - n_ == i - me_) ? 1.0 : 0.0;
  }

  double lower(std::size_t col) const {
    if (is_artificial(col)) return 0.0;
    return lo_[col];
  }
  double upper(std::size_t col) const {
    if (is_artificial(col)) return phase_two_ ? 0.0 : kInfinity;
    return up_[col];
  }

  void setup() {
    lo_.assign(cols_, 0.0);
    up_.assign(cols_, kInfinity);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = p_.var_bounds[j].lower;
      up_[j] = p_.var_bounds[j].upper;
    }
    state_.assign(cols_, VarState::at_lower);
    value_ = lo_;

    rhs_scale_ = 0.0;
    std::vector<double> residual(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double s = row_rhs(i);
      const auto& a = row_coeffs(i);
      for (std::size_t j = 0; j < n_; ++j) s -= a[j] * value_[j];
      residual[i] = s;
      rhs_scale_ = std::max(rhs_scale_, std::abs(row_rhs(i)));
    }

    // Column counts for the singleton crash on equality rows.
    std::vector<int> count(n_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& a = row_coeffs(i);
      for (std::size_t j = 0; j < n_; ++j) count[j] += a[j] != 0.0 ? 1 : 0;
    }

    basis_.assign(m_, 0);
    beta_.assign(m_, 0.0);
    std::vector<double> pivot(m_, 1.0);
    sigma_.assign(m_, 1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double r = residual[i];
      if (i >= me_ && r >= 0.0) {
        basis_[i] = n_ + (i - me_);
        beta_[i] = r;
        continue;
      }
      bool crashed = false;
      if (i < me_) {
        const auto& a = row_coeffs(i);
        for (std::size_t j = 0; j < n_ && !crashed; ++j) {
          if (count[j] != 1 || a[j] == 0.0 || state_[j] == VarState::basic) continue;
          const double v = lo_[j] + r / a[j];
          if (v >= lo_[j] && v <= up_[j]) {
            basis_[i] = j;
            beta_[i] = v;
            pivot[i] = a[j];
            state_[j] = VarState::basic;
            crashed = true;
          }
        }
      }
      if (!crashed) {
        sigma_[i] = r < 0.0 ? -1.0 : 1.0;
        basis_[i] = cols_ + i;
        beta_[i] = std::abs(r);
        pivot[i] = sigma_[i];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < cols_) state_[basis_[i]] = VarState::basic;
    }

    tab_.assign(m_ * cols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& a = row_coeffs(i);
      const double inv = 1.0 / pivot[i];
      for (std::size_t j = 0; j < n_; ++j) tab(i, j) = a[j] * inv;
      if (i >= me_) tab(i, n_ + (i - me_)) = inv;
    }
    dj_.assign(cols_, 0.0);
  }

  void phase_one_costs() {
    std::fill(dj_.begin(), dj_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (std::size_t j = 0; j < cols_; ++j) dj_[j] -= tab(i, j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) dj_[basis_[i]] = 0.0;
    }
  }

  double cost(std::size_t col) const {
    if (!phase_two_) return is_artificial(col) ? 1.0 : 0.0;
    return col < n_ ? p_.objective[col] : 0.0;
  }

  void phase_two_costs() {
    for (std::size_t j = 0; j < cols_; ++j) dj_[j] = cost(j);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost(basis_[i]);
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) dj_[j] -= cb * tab(i, j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) dj_[basis_[i]] = 0.0;
    }
  }

  void refresh_costs(bool phase_one) {
    if (phase_one) {
      phase_one_costs();
    } else {
      phase_two_costs();
    }
  }

  bool eligible(std::size_t j) const {
    if (state_[j] == VarState::basic || lo_[j] == up_[j]) return false;
    return state_[j] == VarState::at_lower ? dj_[j] < -kCostTol : dj_[j] > kCostTol;
  }

  std::ptrdiff_t choose_entering(bool bland) const {
    std::ptrdiff_t best = -1;
    double best_score = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (!eligible(j)) continue;
      if (bland) return static_cast<std::ptrdiff_t>(j);
      const double score = std::abs(dj_[j]);
      if (score > best_score) {
        best_score = score;
        best = static_cast<std::ptrdiff_t>(j);
      }
    }
    return best;
  }

  LpStatus iterate(bool phase_one) {
    const std::size_t limit = 50 * (m_ + cols_) + 1000;
    int degenerate_run = 0;
    int since_refresh = 0;
    bool refreshed_at_optimum = false;
    for (;;) {
      if (++since_refresh >= kRefreshEvery) {
        refresh_costs(phase_one);
        since_refresh = 0;
      }
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      const std::ptrdiff_t entering = choose_entering(bland);
      if (entering < 0) {
        if (refreshed_at_optimum) return LpStatus::optimal;
        // Confirm optimality against freshly computed reduced costs.
        refresh_costs(phase_one);
        since_refresh = 0;
        refreshed_at_optimum = true;
        continue;
      }
      refreshed_at_optimum = false;
      if (++iterations_ > limit) {
        throw NumericalBreakdown(fmt::format("simplex iteration limit ({}) exceeded", limit));
      }

      const auto j = static_cast<std::size_t>(entering);
      const double dir = state_[j] == VarState::at_lower ? 1.0 : -1.0;

      // Ratio test. Bound flip of the entering variable competes with rows.
      double theta = up_[j] - lo_[j];
      std::ptrdiff_t leave = -1;
      double leave_alpha = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = tab(i, j);
        if (std::abs(a) <= kPivotTol) continue;
        const double da = dir * a;
        const std::size_t bcol = basis_[i];
        double lim;
        if (da > 0.0) {
          lim = (beta_[i] - lower(bcol)) / da;
        } else {
          const double ub = upper(bcol);
          if (ub == kInfinity) continue;
          lim = (ub - beta_[i]) / (-da);
        }
        lim = std::max(lim, 0.0);
        const double tie = kRatioTieTol * std::max(1.0, std::abs(lim));
        if (lim < theta - tie) {
          theta = lim;
          leave = static_cast<std::ptrdiff_t>(i);
          leave_alpha = a;
        } else if (leave >= 0 && lim <= theta + tie) {
          const auto cur = static_cast<std::size_t>(leave);
          const bool better = bland ? basis_[i] < basis_[cur] : std::abs(a) > std::abs(leave_alpha);
          if (better) {
            leave = static_cast<std::ptrdiff_t>(i);
            leave_alpha = a;
          }
        }
      }
      if (leave < 0 && theta == kInfinity) return LpStatus::unbounded;

      degenerate_run = theta <= kRatioTieTol ? degenerate_run + 1 : 0;

      for (std::size_t i = 0; i < m_; ++i) beta_[i] -= dir * theta * tab(i, j);

      if (leave < 0) {
        // Bound flip, basis unchanged.
        if (state_[j] == VarState::at_lower) {
          state_[j] = VarState::at_upper;
          value_[j] = up_[j];
        } else {
          state_[j] = VarState::at_lower;
          value_[j] = lo_[j];
        }
        continue;
      }

      const auto r = static_cast<std::size_t>(leave);
      const std::size_t out_col = basis_[r];
      if (!is_artificial(out_col)) {
        const bool to_lower = dir * leave_alpha > 0.0;
        state_[out_col] = to_lower ? VarState::at_lower : VarState::at_upper;
        value_[out_col] = to_lower ? lo_[out_col] : up_[out_col];
      }
      beta_[r] = value_[j] + dir * theta;
      basis_[r] = j;
      state_[j] = VarState::basic;
      pivot(r, j);
    }
  }

  void pivot(std::size_t r, std::size_t j) {
    double* row_r = &tab_[r * cols_];
    const double inv = 1.0 / row_r[j];
    for (std::size_t k = 0; k < cols_; ++k) row_r[k] *= inv;
    row_r[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row_i = &tab_[i * cols_];
      const double f = row_i[j];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < cols_; ++k) row_i[k] -= f * row_r[k];
      row_i[j] = 0.0;
    }
    const double fd = dj_[j];
    if (fd != 0.0) {
      for (std::size_t k = 0; k < cols_; ++k) dj_[k] -= fd * row_r[k];
    }
    dj_[j] = 0.0;
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      std::ptrdiff_t best = -1;
      double best_abs = 1e-7;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == VarState::basic) continue;
        if (std::abs(tab(r, j)) > best_abs) {
          best_abs = std::abs(tab(r, j));
          best = static_cast<std::ptrdiff_t>(j);
        }
      }
      beta_[r] = 0.0;
      if (best < 0) continue;  // redundant row; artificial stays pinned at zero
      const auto j = static_cast<std::size_t>(best);
      beta_[r] = value_[j];
      basis_[r] = j;
      state_[j] = VarState::basic;
      pivot(r, j);
    }
  }

  // Recomputes basic values and duals from the original data so the
  // reported solution does not carry tableau round-off.
  void polish(LpSolution& out) {
    std::vector<double> bmat(m_ * m_, 0.0);
    std::vector<double> cb(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const std::size_t col = basis_[k];
      for (std::size_t i = 0; i < m_; ++i) {
        double v;
        if (is_artificial(col)) {
          v = (i == col - cols_) ? sigma_[i] : 0.0;
        } else {
          v = coeff(i, col);
        }
        bmat[i * m_ + k] = v;
      }
      cb[k] = is_artificial(col) ? 0.0 : cost(col);
    }

    std::vector<double> x(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
      if (state_[j] != VarState::basic) x[j] = value_[j];
    }
    std::vector<double> rhs(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double s = row_rhs(i);
      const auto& a = row_coeffs(i);
      for (std::size_t j = 0; j < n_; ++j) {
        if (state_[j] != VarState::basic) s -= a[j] * x[j];
      }
      if (i >= me_ && state_[n_ + (i - me_)] != VarState::basic) s -= x[n_ + (i - me_)];
      rhs[i] = s;
    }

    std::vector<double> y(m_, 0.0);
    if (m_ > 0) {
      const DenseLu lu(m_, std::move(bmat));
      const std::vector<double> xb = lu.solve(rhs);
      for (std::size_t k = 0; k < m_; ++k) {
        const std::size_t col = basis_[k];
        if (is_artificial(col)) continue;
        // Snap basic values that sit within tolerance of a bound.
        double v = xb[k];
        if (v < lo_[col]) v = lo_[col];
        if (v > up_[col]) v = up_[col];
        x[col] = v;
      }
      y = lu.solve_transposed(cb);
    }

    out.x.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_));
    out.objective_value = evaluate_objective(p_, out.x);
    out.eq_duals.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(me_));
    out.ineq_duals.assign(y.begin() + static_cast<std::ptrdiff_t>(me_), y.end());

    const double residual = max_constraint_violation(p_, out.x);
    if (residual > kResidualTolerance) {
      throw NumericalBreakdown(
          fmt::format("optimal basis has constraint residual {:.3e}", residual));
    }
  }

  const LpProblem& p_;
  std::size_t n_, me_, mi_, m_, cols_;
  std::vector<double> tab_;
  std::vector<double> beta_;
  std::vector<std::size_t> basis_;
  std::vector<double> sigma_;
  std::vector<double> lo_, up_, value_;
  std::vector<VarState> state_;
  std::vector<double> dj_;
  double rhs_scale_ = 0.0;
  bool phase_two_ = false;
  std::size_t iterations_ = 0;
};

}  // namespace

LpSolution solve(const LpProblem& problem) {
  problem.validate();
  return Simplex(problem).run();
}

}  // namespace bess::lp
