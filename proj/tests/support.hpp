#pragma once

// Test-side oracles. Nothing here calls into the library code under test
// beyond plain data types, so a bug in the library cannot hide in its oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "bess/domain.hpp"
#include "bess/lp.hpp"

namespace testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// LP vertex enumeration

/// Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a,
                                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-10) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct VertexOptimum {
  double objective = 0.0;
  std::vector<double> x;
};

/// Minimum of the objective over all basic feasible points. Requires finite
/// upper bounds (so the feasible set is a polytope). nullopt = infeasible.
inline std::optional<VertexOptimum> vertex_enumeration(const bess::lp::LpProblem& p,
                                                       double feas_tol = 1e-7) {
  const std::size_t n = p.n_vars;
  // Candidate hyperplanes: every inequality row plus both bounds of every variable.
  struct Plane {
    std::vector<double> row;
    double rhs;
  };
  std::vector<Plane> planes;
  for (const auto& c : p.ineq_constraints) planes.push_back({c.coefficients, c.rhs});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.push_back({e, p.var_bounds[j].lower});
    planes.push_back({e, p.var_bounds[j].upper});
  }
  const std::size_t n_eq = p.eq_constraints.size();
  if (n_eq > n) return std::nullopt;
  const std::size_t pick = n - n_eq;

  const auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] < p.var_bounds[j].lower - feas_tol || x[j] > p.var_bounds[j].upper + feas_tol) {
        return false;
      }
    }
    for (const auto& c : p.eq_constraints) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += c.coefficients[j] * x[j];
      if (std::abs(s - c.rhs) > feas_tol) return false;
    }
    for (const auto& c : p.ineq_constraints) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += c.coefficients[j] * x[j];
      if (s > c.rhs + feas_tol) return false;
    }
    return true;
  };

  std::optional<VertexOptimum> best;
  std::vector<std::size_t> idx(pick);
  for (std::size_t i = 0; i < pick; ++i) idx[i] = i;
  const auto visit = [&] {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (const auto& c : p.eq_constraints) {
      a.push_back(c.coefficients);
      b.push_back(c.rhs);
    }
    for (std::size_t i : idx) {
      a.push_back(planes[i].row);
      b.push_back(planes[i].rhs);
    }
    const auto x = solve_square(a, b);
    if (!x || !feasible(*x)) return;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += p.objective[j] * (*x)[j];
    if (!best || obj < best->objective) best = VertexOptimum{obj, *x};
  };
  if (pick == 0) {
    visit();
    return best;
  }
  if (planes.size() < pick) return best;
  while (true) {
    visit();
    std::size_t i = pick;
    while (i > 0 && idx[i - 1] == planes.size() - pick + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t k = i; k < pick; ++k) idx[k] = idx[k - 1] + 1;
  }
  return best;
}

/// True when `row` is nonzero and not parallel to any of `rows`.
inline bool independent(const std::vector<bess::lp::LinearConstraint>& rows, const std::vector<double>& row) {
  const auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
  };
  const double rr = dot(row, row);
  if (rr == 0.0) return false;
  for (const auto& c : rows) {
    const double cr = dot(c.coefficients, row);
    if (std::abs(cr * cr - dot(c.coefficients, c.coefficients) * rr) < 1e-9) return false;
  }
  return true;
}

/// Random bounded LP with up to 6 variables and 6 rows, at most 2 of them
/// equalities. Built around a known feasible point unless
/// `allow_infeasible` picks otherwise.
inline bess::lp::LpProblem random_lp(Rng& rng, bool allow_infeasible = false) {
  const int n = rng.integer(1, 6);
  bess::lp::LpProblem p(static_cast<std::size_t>(n));
  std::vector<double> x0(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double lo = rng.coin(0.7) ? 0.0 : rng.uniform(-5.0, 2.0);
    const double hi = lo + rng.uniform(0.5, 8.0);
    p.var_bounds[static_cast<std::size_t>(j)] = {lo, hi};
    p.objective[static_cast<std::size_t>(j)] = rng.integer(-5, 5) + (rng.coin() ? 0.0 : rng.uniform(-1, 1));
    x0[static_cast<std::size_t>(j)] = rng.uniform(lo, hi);
  }
  const int rows = rng.integer(0, 6);
  const int n_eq = std::min(rng.integer(0, 2), n - 1 < 0 ? 0 : n - 1);
  for (int r = 0; r < rows; ++r) {
    std::vector<double> row(static_cast<std::size_t>(n));
    // Equality rows must be independent or enumeration sees no vertices.
    do {
      for (double& a : row) a = rng.coin(0.25) ? 0.0 : static_cast<double>(rng.integer(-4, 4));
    } while (r < n_eq && !independent(p.eq_constraints, row));
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += row[static_cast<std::size_t>(j)] * x0[static_cast<std::size_t>(j)];
    double shift = rng.uniform(0.0, 3.0);
    if (allow_infeasible && rng.coin(0.15)) shift = -rng.uniform(5.0, 40.0);
    if (r < n_eq) {
      p.add_eq(std::move(row), lhs + (allow_infeasible && shift < 0 ? shift : 0.0));
    } else {
      p.add_le(std::move(row), lhs + shift);
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// MPC brute force

struct MpcInstance {
  std::vector<double> load;
  std::vector<double> pv;
  std::vector<double> dct;
  double soc0 = 0.0;
  double soc_req = 0.0;
  bess::BatterySpec spec;
  double alpha = 10.0;
  double beta = 100.0;
  double c_tp = 0.05;
  double dt = 0.25;
};

/// MPC objective of a battery power sequence b (discharge positive), with
/// purchase and sale resolved the cheapest way. nullopt if SOC leaves bounds.
inline std::optional<double> mpc_cost(const MpcInstance& m, const std::vector<double>& b) {
  double soc = m.soc0;
  double sell = 0.0;
  double throughput = 0.0;
  double dct_excess = 0.0;
  double soc_short = 0.0;
  for (std::size_t t = 0; t < b.size(); ++t) {
    soc -= b[t] * m.dt;
    if (soc < m.spec.soc_min_kwh - 1e-9 || soc > m.spec.soc_max_kwh + 1e-9) return std::nullopt;
    const double grid = m.load[t] - m.pv[t] - b[t];
    const double pur = std::max(grid, 0.0);
    sell += std::max(-grid, 0.0);
    throughput += std::abs(b[t]);
    dct_excess = std::max(dct_excess, pur - m.dct[t]);
    soc_short = std::max(soc_short, m.soc_req - soc);
  }
  return sell + m.c_tp * throughput + m.alpha * soc_short + m.beta * dct_excess;
}

/// Exhaustive search over battery power on a 1 kW grid in [-p_max, p_max].
inline double mpc_brute_force(const MpcInstance& m) {
  const int p = static_cast<int>(std::floor(m.spec.p_max_kw));
  const std::size_t T = m.load.size();
  std::vector<double> b(T, static_cast<double>(-p));
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    if (const auto c = mpc_cost(m, b)) best = std::min(best, *c);
    std::size_t k = 0;
    while (k < T && b[k] >= p) {
      b[k] = -p;
      ++k;
    }
    if (k == T) break;
    b[k] += 1.0;
  }
  return best;
}

/// Small integer-valued instance: T in 2..4 and p_max small enough that the
/// 1 kW grid stays enumerable.
inline MpcInstance random_mpc_instance(Rng& rng) {
  MpcInstance m;
  const int T = rng.integer(2, 4);
  const double p_max = rng.integer(2, T == 4 ? 4 : 6);
  const double cap = rng.integer(1, 4);
  m.spec = bess::BatterySpec::full_range(p_max, cap);
  m.soc0 = rng.integer(0, static_cast<int>(cap * 4)) / 4.0;
  m.soc_req = rng.coin() ? 0.0 : rng.integer(0, static_cast<int>(cap * 4)) / 4.0;
  for (int t = 0; t < T; ++t) {
    m.load.push_back(rng.integer(0, 12));
    m.pv.push_back(rng.coin(0.6) ? rng.integer(0, 14) : 0.0);
    m.dct.push_back(rng.integer(2, 10));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Greedy peak shaving, written independently of the planner.

inline std::size_t greedy_violations(const std::vector<double>& net,
                                     const std::vector<double>& threshold,
                                     const bess::BatterySpec& spec, double dt, double soc0) {
  double soc = soc0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const double d = threshold[i];
    if (net[i] > d) {
      const double want = net[i] - d;
      const double give = std::min({want, spec.p_max_kw, (soc - spec.soc_min_kwh) / dt});
      soc -= give * dt;
      if (net[i] - give > d + 1e-9) ++bad;
    } else {
      const double room = std::isinf(d) ? spec.p_max_kw : d - net[i];
      const double take = std::max(0.0, std::min({room, spec.p_max_kw, (spec.soc_max_kwh - soc) / dt}));
      soc += take * dt;
    }
  }
  return bad;
}

}  // namespace testing
