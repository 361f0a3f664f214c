#include "hardyveto/simplex.hpp"

#include <algorithm>
#include <optional>

#include "hardyveto/error.hpp"

namespace hardyveto {

std::string to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}

Rational parse_rational(const std::string& text) {
  Rational r;
  if (r.set_str(text, 10) != 0 || r.get_den() == 0)
    throw Error(ErrorCode::kParse, "not a rational number: '" + text + "'");
  r.canonicalize();
  return r;
}

Rational LinearConstraint::evaluate(std::span<const Rational> x) const {
  Rational acc = 0;
  for (const auto& t : terms) acc += t.coeff * x[t.var];
  return acc;
}

void LinearProgram::validate() const {
  if (objective.size() != num_vars)
    throw Error(ErrorCode::kInvalidArgument, "objective length differs from variable count");
  for (const auto* group : {&equalities, &upper_bounds}) {
    for (const auto& c : *group) {
      for (const auto& t : c.terms) {
        if (t.var >= num_vars)
          throw Error(ErrorCode::kInvalidArgument, "constraint '" + c.label + "' references a missing variable");
      }
    }
  }
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows, std::vector<Rational>(cols + 1)), cols_(cols) {}

  Rational& at(std::size_t i, std::size_t j) { return rows_[i][j]; }
  Rational& rhs(std::size_t i) { return rows_[i][cols_]; }
  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t e, std::vector<Rational>& cost) {
    auto& prow = rows_[r];
    const Rational inv = 1 / prow[e];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= cols_; ++j) {
      if (sgn(prow[j]) != 0) {
        prow[j] *= inv;
        nz.push_back(j);
      }
    }
    Rational f;
    auto eliminate = [&](std::vector<Rational>& row) {
      if (sgn(row[e]) == 0) return;
      f = row[e];
      for (std::size_t j : nz) row[j] -= f * prow[j];
    };
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (i != r) eliminate(rows_[i]);
    eliminate(cost);
  }

  void erase_row(std::size_t i) { rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i)); }

 private:
  std::vector<std::vector<Rational>> rows_;
  std::size_t cols_;
};

// Reduced-cost row (cost[j] = c_B B^-1 A_j - c_j, last entry = objective value)
// for maximizing `c`.
std::vector<Rational> reduced_costs(Tableau& t, const std::vector<std::size_t>& basis,
                                    const std::vector<Rational>& c) {
  std::vector<Rational> cost(t.cols() + 1);
  for (std::size_t j = 0; j < t.cols(); ++j) cost[j] = -c[j];
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const Rational& cb = c[basis[i]];
    if (sgn(cb) == 0) continue;
    for (std::size_t j = 0; j <= t.cols(); ++j) {
      if (sgn(t.at(i, j)) != 0) cost[j] += cb * t.at(i, j);
    }
  }
  return cost;
}

// Bland's rule: lowest-index improving column; ratio-test ties broken by the
// lowest-index leaving variable. Returns false when unbounded.
bool optimize(Tableau& t, std::vector<std::size_t>& basis, std::vector<Rational>& cost,
              const std::vector<bool>& allowed, std::size_t& pivots) {
  while (true) {
    std::optional<std::size_t> enter;
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (allowed[j] && sgn(cost[j]) < 0) {
        enter = j;
        break;
      }
    }
    if (!enter) return true;
    std::optional<std::size_t> leave;
    Rational best;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (sgn(t.at(i, *enter)) <= 0) continue;
      Rational ratio = t.rhs(i) / t.at(i, *enter);
      if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
        leave = i;
        best = std::move(ratio);
      }
    }
    if (!leave) return false;
    t.pivot(*leave, *enter, cost);
    basis[*leave] = *enter;
    ++pivots;
  }
}

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars;
  const std::size_t n_eq = lp.equalities.size();
  const std::size_t n_le = lp.upper_bounds.size();
  const std::size_t m = n_eq + n_le;

  // Columns: structural | slacks (one per <= row) | artificials (one per row).
  const std::size_t slack0 = n, art0 = n + n_le, cols = n + n_le + m;
  Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool is_eq = i < n_eq;
    const LinearConstraint& c = is_eq ? lp.equalities[i] : lp.upper_bounds[i - n_eq];
    // GMP arithmetic requires canonical operands; callers may not provide them.
    for (const auto& term : c.terms) {
      Rational coeff = term.coeff;
      coeff.canonicalize();
      t.at(i, term.var) += coeff;
    }
    t.rhs(i) = c.rhs;
    t.rhs(i).canonicalize();
    if (!is_eq) t.at(i, slack0 + (i - n_eq)) = 1;
    if (sgn(t.rhs(i)) < 0) {
      for (std::size_t j = 0; j <= cols; ++j) t.at(i, j) = -t.at(i, j);
    }
    t.at(i, art0 + i) = 1;
    basis[i] = art0 + i;
  }

  LpSolution sol;
  std::vector<Rational> phase1(cols);
  for (std::size_t j = art0; j < cols; ++j) phase1[j] = -1;
  std::vector<bool> allowed(cols, true);
  std::vector<Rational> cost = reduced_costs(t, basis, phase1);
  optimize(t, basis, cost, allowed, sol.pivots);
  if (sgn(cost[cols]) != 0) throw Error(ErrorCode::kInfeasible, "linear program is infeasible");

  // Pivot zero-level artificials out of the basis; rows where that is not
  // possible are linear combinations of the others.
  for (std::size_t i = t.rows(); i-- > 0;) {
    if (basis[i] < art0) continue;
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < art0; ++j) {
      if (sgn(t.at(i, j)) != 0) {
        col = j;
        break;
      }
    }
    if (col) {
      t.pivot(i, *col, cost);
      basis[i] = *col;
      ++sol.pivots;
    } else {
      t.erase_row(i);
      basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
      ++sol.redundant_rows;
    }
  }

  for (std::size_t j = art0; j < cols; ++j) allowed[j] = false;
  std::vector<Rational> phase2(cols);
  for (std::size_t j = 0; j < n; ++j) {
    phase2[j] = lp.objective[j];
    phase2[j].canonicalize();
  }
  cost = reduced_costs(t, basis, phase2);
  if (!optimize(t, basis, cost, allowed, sol.pivots))
    throw Error(ErrorCode::kUnbounded, "linear program is unbounded");

  sol.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.rows(); ++i) {
    if (basis[i] < n) sol.x[basis[i]] = t.rhs(i);
  }
  sol.optimum = cost[cols];
  return sol;
}

}  // namespace hardyveto
