#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "bess/errors.hpp"
#include "bess/lp.hpp"

namespace bess::lp {

namespace {

std::string num(double v) {
  if (v == kInfinity) return "inf";
  return fmt::format("{}", v);
}

double parse_num(const std::string& tok) {
  if (tok == "inf") return kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("lp dump: bad number '{}'", tok));
  }
}

void expect(std::istream& in, const char* keyword) {
  std::string tok;
  if (!(in >> tok) || tok != keyword) {
    throw ParseError(fmt::format("lp dump: expected '{}', found '{}'", keyword, tok));
  }
}

double next_num(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw ParseError("lp dump: unexpected end of input");
  return parse_num(tok);
}

void write_rows(std::ostream& out, const char* tag, const std::vector<LinearConstraint>& rows) {
  for (const auto& r : rows) {
    out << tag;
    for (double a : r.coefficients) out << ' ' << num(a);
    out << " RHS " << num(r.rhs) << '\n';
  }
}

}  // namespace

void write_lp(const LpProblem& problem, std::ostream& out) {
  out << "LP " << problem.n_vars << ' ' << problem.eq_constraints.size() << ' '
      << problem.ineq_constraints.size() << '\n';
  out << "OBJ";
  for (double c : problem.objective) out << ' ' << num(c);
  out << '\n';
  write_rows(out, "EQ", problem.eq_constraints);
  write_rows(out, "LE", problem.ineq_constraints);
  out << "BOUNDS";
  for (const auto& b : problem.var_bounds) out << ' ' << num(b.lower) << ' ' << num(b.upper);
  out << "\nEND\n";
}

LpProblem read_lp(std::istream& in) {
  expect(in, "LP");
  std::size_t n = 0, n_eq = 0, n_le = 0;
  if (!(in >> n >> n_eq >> n_le)) throw ParseError("lp dump: bad header counts");
  LpProblem p(n);
  expect(in, "OBJ");
  for (std::size_t j = 0; j < n; ++j) p.objective[j] = next_num(in);
  const auto read_rows = [&](const char* tag, std::size_t count,
                             std::vector<LinearConstraint>& rows) {
    for (std::size_t i = 0; i < count; ++i) {
      expect(in, tag);
      LinearConstraint row;
      row.coefficients.resize(n);
      for (std::size_t j = 0; j < n; ++j) row.coefficients[j] = next_num(in);
      expect(in, "RHS");
      row.rhs = next_num(in);
      rows.push_back(std::move(row));
    }
  };
  read_rows("EQ", n_eq, p.eq_constraints);
  read_rows("LE", n_le, p.ineq_constraints);
  expect(in, "BOUNDS");
  for (std::size_t j = 0; j < n; ++j) {
    p.var_bounds[j].lower = next_num(in);
    p.var_bounds[j].upper = next_num(in);
  }
  expect(in, "END");
  p.validate();
  return p;
}

}  // namespace bess::lp
