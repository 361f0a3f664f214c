#include <doctest.h>

#include <cmath>

#include "hardyveto/bounds.hpp"
#include "hardyveto/error.hpp"

using namespace hardyveto;

namespace {

Observables protocol(int n) { return Observables(n, ObservablePair::pauli_z_minus_x()); }

double evaluate(const LinearConstraint& c, const std::vector<double>& x) {
  double acc = 0.0;
  for (const auto& t : c.terms) acc += t.coeff.get_d() * x[t.var];
  return acc;
}

// Every context that agrees with the condition on its constrained parties.
std::vector<SettingTuple> containing_contexts(const ZeroCondition& cond) {
  const std::size_t n = cond.slots.size();
  std::vector<SettingTuple> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    SettingTuple s(n);
    bool ok = true;
    for (std::size_t p = 0; p < n; ++p) {
      s[p] = (mask >> p) & 1 ? Setting::kV : Setting::kU;
      if (cond.slots[p] && cond.slots[p]->setting != s[p]) ok = false;
    }
    if (ok) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("behavior layout indexing") {
  BehaviorLayout layout({2, 3});
  CHECK(layout.contexts() == 4);
  CHECK(layout.outcomes_per_context() == 6);
  CHECK(layout.context_index({Setting::kV, Setting::kU}) == 2);
  CHECK(layout.context_settings(1) == SettingTuple{Setting::kU, Setting::kV});
  CHECK(layout.outcome_index({2, 3}) == 5);
  CHECK(layout.outcome_tuple(4) == OutcomeTuple{2, 2});
}

TEST_CASE("constraint counts") {
  CHECK(nosignaling_constraints(HardySpec::qubits(2, HardyVariant::kModified)).size() == 8);
  CHECK(nosignaling_constraints(HardySpec::qubits(3, HardyVariant::kModified)).size() == 48);
  CHECK(normalization_constraints(HardySpec::qubits(3, HardyVariant::kModified)).size() == 8);
  CHECK(hardy_zero_constraints(HardySpec::qubits(3, HardyVariant::kModified)).size() == 4);
  const auto conv = hardy_zero_constraints(HardySpec::qubits(3, HardyVariant::kConventional));
  REQUIRE(conv.size() == 4);
  // Conventional conditions constrain every party; modified ones leave one
  // free party on three qubits, so they cover two outcome entries.
  CHECK(conv[0].terms.size() == 1);
  CHECK(hardy_zero_constraints(HardySpec::qubits(3, HardyVariant::kModified))[0].terms.size() == 2);

  const auto a = hardy_zero_constraints(HardySpec::qubits(2, HardyVariant::kModified));
  const auto b = hardy_zero_constraints(HardySpec::qubits(2, HardyVariant::kConventional));
  REQUIRE(a.size() == b.size());
  for (const auto& x : a) {
    bool found = false;
    for (const auto& y : b) {
      if (x.terms.size() != y.terms.size()) continue;
      bool same = true;
      for (std::size_t i = 0; i < x.terms.size(); ++i)
        same = same && x.terms[i].var == y.terms[i].var && x.terms[i].coeff == y.terms[i].coeff;
      found = found || same;
    }
    CHECK(found);
  }
}

TEST_CASE("quantum behaviors are normalized and no-signaling") {
  const auto t2 = quantum_behavior(build_veto_state(2), protocol(2));
  CHECK(t2.at({Setting::kU, Setting::kU}, {1, 1}) == doctest::Approx(1.0 / 12));
  CHECK(t2.at({Setting::kV, Setting::kU}, {1, 1}) < 1e-15);
  const auto zero = quantum_behavior(StateVector::basis_state({2, 2}, 0), protocol(2));
  CHECK(zero.at({Setting::kU, Setting::kU}, {1, 1}) == doctest::Approx(1.0));

  for (int n = 2; n <= 4; ++n) {
    const auto spec = HardySpec::qubits(n, HardyVariant::kModified);
    const auto table = quantum_behavior(build_veto_state(n), protocol(n));
    for (const auto& c : normalization_constraints(spec)) CHECK(evaluate(c, table.entries) == doctest::Approx(1.0));
    for (const auto& c : nosignaling_constraints(spec)) CHECK(std::abs(evaluate(c, table.entries)) < 1e-12);
    for (const auto& c : hardy_zero_constraints(spec)) CHECK(std::abs(evaluate(c, table.entries)) < 1e-12);
  }
}

TEST_CASE("local hidden variables cannot satisfy the conditions") {
  for (auto v : {HardyVariant::kModified, HardyVariant::kConventional}) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {4, 2}, {2, 3}, {3, 3}}) {
      const auto r = enumerate_lhv_max_q(HardySpec::uniform(n, d, v));
      CHECK(r.max_q == 0);
      CHECK(r.strategies == static_cast<std::uint64_t>(std::pow(d * d, n)));
      CHECK(r.survivors > 0);
    }
  }
  CHECK_THROWS_AS(enumerate_lhv_max_q(HardySpec::uniform(7, 4, HardyVariant::kModified)), Error);
}

TEST_CASE("no-signaling maxima are exact") {
  const auto m3 = max_q_nosignaling(HardySpec::qubits(3, HardyVariant::kModified));
  CHECK(m3.max_q == Rational(1, 3));
  CHECK(max_q_nosignaling(HardySpec::qubits(2, HardyVariant::kConventional)).max_q == Rational(1, 2));
  CHECK(max_q_nosignaling(HardySpec::qubits(2, HardyVariant::kModified)).max_q == Rational(1, 2));
  CHECK(max_q_nosignaling(HardySpec::qubits(3, HardyVariant::kConventional)).max_q == Rational(1, 2));

  // The optimum is an exact feasible point of the full program.
  const auto lp = hardy_nosignaling_lp(HardySpec::qubits(3, HardyVariant::kModified));
  CHECK(m3.variables == 64);
  CHECK(m3.constraints == lp.equalities.size());
  for (const auto& x : m3.behavior) CHECK(x >= 0);
  for (const auto& c : lp.equalities) CHECK(c.evaluate(m3.behavior) == c.rhs);
}

TEST_CASE("zero constraints hold in every containing context of a no-signaling point") {
  for (auto v : {HardyVariant::kModified, HardyVariant::kConventional}) {
    const auto spec = HardySpec::qubits(3, v);
    const auto ns = max_q_nosignaling(spec);
    for (const auto& cond : zero_conditions(spec)) {
      for (const auto& ctx : containing_contexts(cond))
        CHECK(zero_constraint_in_context(spec, cond, ctx).evaluate(ns.behavior) == 0);
    }
    // Stating the conditions in every context does not change the optimum.
    LinearProgram lp = hardy_nosignaling_lp(spec);
    for (const auto& cond : zero_conditions(spec))
      for (const auto& ctx : containing_contexts(cond)) lp.equalities.push_back(zero_constraint_in_context(spec, cond, ctx));
    CHECK(simplex_solve(lp).optimum == ns.max_q);
  }
  const auto cond = zero_conditions(HardySpec::qubits(3, HardyVariant::kModified)).front();
  CHECK_THROWS_AS(zero_constraint_in_context(HardySpec::qubits(3, HardyVariant::kModified), cond,
                                             SettingTuple(3, Setting::kU)),
                  Error);
}
