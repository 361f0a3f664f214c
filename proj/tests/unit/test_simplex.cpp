#include <doctest.h>

#include "hardyveto/error.hpp"
#include "hardyveto/rng.hpp"
#include "hardyveto/simplex.hpp"

using namespace hardyveto;

namespace {

LinearConstraint row(std::vector<LinearTerm> terms, Rational rhs) { return LinearConstraint{std::move(terms), rhs, ""}; }

void check_feasible(const LinearProgram& lp, const LpSolution& sol) {
  for (const auto& x : sol.x) CHECK(x >= 0);
  for (const auto& c : lp.equalities) CHECK(c.evaluate(sol.x) == c.rhs);
  for (const auto& c : lp.upper_bounds) CHECK(c.evaluate(sol.x) <= c.rhs);
  Rational value = 0;
  for (std::size_t i = 0; i < lp.num_vars; ++i) value += lp.objective[i] * sol.x[i];
  CHECK(value == sol.optimum);
}

}  // namespace

TEST_CASE("rationals render as reduced fractions") {
  CHECK(to_string(Rational(2, 6)) == "1/3");
  CHECK(to_string(Rational(0)) == "0");
  CHECK(to_string(Rational(-4, 2)) == "-2");
  CHECK(parse_rational("3/9") == Rational(1, 3));
  CHECK_THROWS_AS(parse_rational("x/2"), Error);
}

TEST_CASE("one-variable and two-variable programs") {
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {1};
  lp.upper_bounds = {row({{0, 1}}, Rational(1, 3))};
  auto sol = simplex_solve(lp);
  CHECK(sol.optimum == Rational(1, 3));
  check_feasible(lp, sol);

  LinearProgram lp2;
  lp2.num_vars = 2;
  lp2.objective = {1, 1};
  lp2.upper_bounds = {row({{0, 1}, {1, 1}}, 1)};
  sol = simplex_solve(lp2);
  CHECK(sol.optimum == 1);
  check_feasible(lp2, sol);
}

TEST_CASE("negative right-hand sides, infeasible and unbounded programs") {
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {-1, -1};
  lp.upper_bounds = {row({{0, -1}}, -2)};               // x >= 2
  lp.equalities = {row({{0, 1}, {1, -1}}, Rational(1, 2))};  // x - y = 1/2
  auto sol = simplex_solve(lp);
  CHECK(sol.optimum == Rational(-7, 2));
  check_feasible(lp, sol);

  LinearProgram bad = lp;
  bad.upper_bounds.push_back(row({{0, 1}}, 1));
  try {
    simplex_solve(bad);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }

  LinearProgram loose;
  loose.num_vars = 2;
  loose.objective = {1, 0};
  loose.equalities = {row({{0, 1}, {1, -1}}, 0)};
  try {
    simplex_solve(loose);
    FAIL("expected Unbounded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnbounded);
  }

  LinearProgram wrong;
  wrong.num_vars = 1;
  wrong.objective = {1, 1};
  CHECK_THROWS_AS(simplex_solve(wrong), Error);
}

TEST_CASE("non-canonical input coefficients are accepted") {
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {Rational(2, 2)};
  lp.upper_bounds = {row({{0, Rational(4, 2)}}, Rational(6, 3))};
  CHECK(simplex_solve(lp).optimum == 1);
}

TEST_CASE("degenerate programs terminate") {
  // Beale's example cycles under the largest-coefficient rule.
  LinearProgram lp;
  lp.num_vars = 4;
  lp.objective = {Rational(3, 4), -20, Rational(1, 2), -6};
  lp.upper_bounds = {row({{0, Rational(1, 4)}, {1, -8}, {2, -1}, {3, 9}}, 0),
                     row({{0, Rational(1, 2)}, {1, -12}, {2, Rational(-1, 2)}, {3, 3}}, 0), row({{2, 1}}, 1)};
  auto sol = simplex_solve(lp);
  CHECK(sol.optimum == Rational(5, 4));
  check_feasible(lp, sol);

  // Duplicated and dependent equalities.
  LinearProgram red;
  red.num_vars = 3;
  red.objective = {1, 2, 3};
  red.equalities = {row({{0, 1}, {1, 1}, {2, 1}}, 1), row({{0, 1}, {1, 1}, {2, 1}}, 1),
                    row({{0, 2}, {1, 2}, {2, 2}}, 2), row({{2, 1}}, Rational(1, 2))};
  sol = simplex_solve(red);
  CHECK(sol.optimum == Rational(5, 2));
  CHECK(sol.redundant_rows >= 2);
  check_feasible(red, sol);
}

TEST_CASE("random two-variable programs match vertex enumeration") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram lp;
    lp.num_vars = 2;
    auto small = [&] {
      Rational r(static_cast<long>(rng.below(11)) - 5, static_cast<long>(rng.below(3)) + 1);
      r.canonicalize();
      return r;
    };
    lp.objective = {small(), small()};
    lp.upper_bounds.push_back(row({{0, 1}, {1, 1}}, 10));
    for (int k = 0; k < 3; ++k) lp.upper_bounds.push_back(row({{0, small()}, {1, small()}}, Rational(static_cast<long>(rng.below(9)) + 1)));

    // Lines a x + b y = c, including the axes.
    std::vector<std::array<Rational, 3>> lines = {{1, 0, 0}, {0, 1, 0}};
    for (const auto& c : lp.upper_bounds) {
      std::array<Rational, 3> l{0, 0, c.rhs};
      for (const auto& t : c.terms) l[t.var] += t.coeff;
      lines.push_back(l);
    }
    Rational best;
    bool any = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        const Rational det = lines[i][0] * lines[j][1] - lines[i][1] * lines[j][0];
        if (det == 0) continue;
        const std::vector<Rational> x = {(lines[i][2] * lines[j][1] - lines[i][1] * lines[j][2]) / det,
                                         (lines[i][0] * lines[j][2] - lines[i][2] * lines[j][0]) / det};
        if (x[0] < 0 || x[1] < 0) continue;
        bool ok = true;
        for (const auto& c : lp.upper_bounds) ok = ok && c.evaluate(x) <= c.rhs;
        if (!ok) continue;
        const Rational v = lp.objective[0] * x[0] + lp.objective[1] * x[1];
        if (!any || v > best) best = v;
        any = true;
      }
    }
    REQUIRE(any);
    const auto sol = simplex_solve(lp);
    CHECK(sol.optimum == best);
    check_feasible(lp, sol);
  }
}
