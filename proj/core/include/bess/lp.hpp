#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string_view>
#include <vector>

namespace bess::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Absolute tolerance on constraint residuals of an optimal solution.
inline constexpr double kResidualTolerance = 1e-7;
/// Absolute tolerance on variable bound violations of an optimal solution.
inline constexpr double kBoundTolerance = 1e-9;

struct LinearConstraint {
  std::vector<double> coefficients;
  double rhs = 0.0;
};

/// lower must be finite; upper may be +infinity.
struct VariableBounds {
  double lower = 0.0;
  double upper = kInfinity;
};

/// minimize objective·x
///   s.t. eq_constraints:   row·x == rhs
///        ineq_constraints: row·x <= rhs
///        lower <= x <= upper
struct LpProblem {
  std::size_t n_vars = 0;
  std::vector<double> objective;
  std::vector<LinearConstraint> eq_constraints;
  std::vector<LinearConstraint> ineq_constraints;
  std::vector<VariableBounds> var_bounds;

  explicit LpProblem(std::size_t n = 0)
      : n_vars(n), objective(n, 0.0), var_bounds(n, VariableBounds{}) {}

  /// Throws DimensionMismatch on ragged rows and InvalidArgument on
  /// non-finite data (other than +inf upper bounds).
  void validate() const;

  void add_eq(std::vector<double> row, double rhs) { eq_constraints.push_back({std::move(row), rhs}); }
  void add_le(std::vector<double> row, double rhs) {
    ineq_constraints.push_back({std::move(row), rhs});
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  /// Lagrange multipliers y with objective = y·A + reduced costs. Inequality
  /// multipliers are <= 0 at an optimum.
  std::vector<double> eq_duals;
  std::vector<double> ineq_duals;
  std::size_t iterations = 0;
};

/// Bounded-variable two-phase primal simplex on a dense tableau.
///
/// Entering variables are chosen by largest reduced cost (lowest index on
/// ties); after a run of degenerate pivots the solver switches to Bland's
/// rule until progress resumes. Deterministic for a fixed input.
/// Infeasible and unbounded problems are reported through `status`; a
/// solution that fails its own residual check throws NumericalBreakdown.
LpSolution solve(const LpProblem& problem);

/// Largest |row·x - rhs| over equalities and max(row·x - rhs, 0) over inequalities.
double max_constraint_violation(const LpProblem& problem, const std::vector<double>& x);
double max_bound_violation(const LpProblem& problem, const std::vector<double>& x);
double evaluate_objective(const LpProblem& problem, const std::vector<double>& x);

/// Plain-text fixed layout for offline cross-checking:
///
///   LP <n_vars> <n_eq> <n_ineq>
///   OBJ c_1 ... c_n
///   EQ a_1 ... a_n RHS b        (n_eq lines)
///   LE a_1 ... a_n RHS b        (n_ineq lines)
///   BOUNDS l_1 u_1 ... l_n u_n  (upper "inf" when unbounded)
///   END
void write_lp(const LpProblem& problem, std::ostream& out);
/// Throws ParseError on malformed input.
LpProblem read_lp(std::istream& in);

}  // namespace bess::lp
