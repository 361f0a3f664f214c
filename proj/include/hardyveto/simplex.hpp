#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hardyveto {

// GMP rationals are kept in canonical reduced form by every arithmetic op.
using Rational = mpq_class;

std::string to_string(const Rational& r);
Rational parse_rational(const std::string& text);

struct LinearTerm {
  std::size_t var;
  Rational coeff;
};

struct LinearConstraint {
  std::vector<LinearTerm> terms;
  Rational rhs;
  std::string label;

  Rational evaluate(std::span<const Rational> x) const;
};

// maximize objective . x  s.t.  equalities, upper_bounds (terms <= rhs), x >= 0.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<Rational> objective;
  std::vector<LinearConstraint> equalities;
  std::vector<LinearConstraint> upper_bounds;

  void validate() const;
};

struct LpSolution {
  Rational optimum;
  std::vector<Rational> x;
  std::size_t pivots = 0;
  std::size_t redundant_rows = 0;
};

// Two-phase dense tableau simplex over exact rationals with Bland's rule.
// Throws kInfeasible or kUnbounded.
LpSolution simplex_solve(const LinearProgram& lp);

}  // namespace hardyveto
