#include "hardyveto/hardy_builder.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hardyveto/error.hpp"

namespace hardyveto {

namespace {

std::vector<int> outcomes_except_last(int d) {
  std::vector<int> out(d - 1);
  std::iota(out.begin(), out.end(), 1);
  return out;
}

std::string party_label(char setting, int party, const std::string& rel) {
  return std::string(1, setting) + std::to_string(party + 1) + rel;
}

// Expands one condition into the product states of its event.
void append_products(const ZeroCondition& cond, const Observables& obs,
                     std::vector<Amplitudes>& out) {
  const std::size_t n = obs.size();
  std::vector<std::vector<const Amplitudes*>> choices(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (cond.slots[p]) {
      for (int o : cond.slots[p]->outcomes)
        choices[p].push_back(&obs[p].eigenvector(cond.slots[p]->setting, o));
    } else {
      for (const auto& v : obs[p].basis(Setting::kU)) choices[p].push_back(&v);
    }
  }
  std::vector<std::size_t> pick(n, 0);
  std::vector<Amplitudes> locals(n);
  while (true) {
    for (std::size_t p = 0; p < n; ++p) locals[p] = *choices[p][pick[p]];
    out.push_back(tensor_product(locals).amplitude_vector());
    std::size_t p = n;
    while (p-- > 0) {
      if (++pick[p] < choices[p].size()) break;
      pick[p] = 0;
    }
    if (p == static_cast<std::size_t>(-1)) break;
  }
}

void check_spec_observables(const HardySpec& spec, const Observables& obs) {
  spec.validate();
  if (static_cast<int>(obs.size()) != spec.parties())
    throw Error(ErrorCode::kDimensionMismatch, "observable count does not match party count");
  for (int p = 0; p < spec.parties(); ++p) {
    if (obs[p].dim() != spec.dims[p])
      throw Error(ErrorCode::kDimensionMismatch,
                  "observable dimension does not match party " + std::to_string(p + 1));
  }
}

bool same_observables(const Observables& obs, double tol) {
  for (std::size_t p = 1; p < obs.size(); ++p) {
    if (obs[p].dim() != obs[0].dim()) return false;
    for (Setting s : {Setting::kU, Setting::kV}) {
      for (int k = 0; k < obs[0].dim(); ++k) {
        for (int j = 0; j < obs[0].dim(); ++j) {
          if (std::abs(obs[p].basis(s)[k][j] - obs[0].basis(s)[k][j]) > tol) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

const char* variant_name(HardyVariant v) {
  return v == HardyVariant::kModified ? "modified" : "conventional";
}

HardyVariant parse_variant(const std::string& name) {
  if (name == "modified" || name == "MODIFIED") return HardyVariant::kModified;
  if (name == "conventional" || name == "CONVENTIONAL") return HardyVariant::kConventional;
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + name + "'");
}

HardySpec HardySpec::qubits(int n, HardyVariant variant) { return uniform(n, 2, variant); }

HardySpec HardySpec::uniform(int n, int d, HardyVariant variant) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "negative party count");
  HardySpec spec{std::vector<int>(n, d), variant};
  spec.validate();
  return spec;
}

void HardySpec::validate() const {
  if (dims.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two parties");
  for (int d : dims)
    if (d < 2) throw Error(ErrorCode::kInvalidArgument, "local dimensions must be >= 2");
}

std::vector<ZeroCondition> zero_conditions(const HardySpec& spec) {
  spec.validate();
  const int n = spec.parties();
  std::vector<ZeroCondition> conds;
  for (int r = 0; r < n; ++r) {
    ZeroCondition c;
    c.slots.assign(n, std::nullopt);
    c.slots[r] = SlotConstraint{Setting::kV, outcomes_except_last(spec.dims[r])};
    if (spec.variant == HardyVariant::kModified) {
      const int next = (r + 1) % n;
      c.slots[next] = SlotConstraint{Setting::kU, {1}};
      c.label = party_label('v', r, "!=d") + "," + party_label('u', next, "=1");
    } else {
      std::string others;
      for (int i = 0; i < n; ++i) {
        if (i == r) continue;
        c.slots[i] = SlotConstraint{Setting::kU, {1}};
        others += party_label('u', i, "=1") + ",";
      }
      c.label = others + party_label('v', r, "!=d");
    }
    conds.push_back(std::move(c));
  }
  ZeroCondition all_v;
  all_v.all_v = true;
  all_v.label = "all v=d";
  for (int i = 0; i < n; ++i) all_v.slots.emplace_back(SlotConstraint{Setting::kV, {spec.dims[i]}});
  conds.push_back(std::move(all_v));
  return conds;
}

std::vector<Amplitudes> zero_condition_products(const HardySpec& spec, const Observables& obs) {
  check_spec_observables(spec, obs);
  const auto conds = zero_conditions(spec);
  std::vector<Amplitudes> out;
  append_products(conds.back(), obs, out);
  for (std::size_t i = 0; i + 1 < conds.size(); ++i) append_products(conds[i], obs, out);
  return out;
}

Amplitudes all_u_one_product(const Observables& obs) {
  std::vector<Amplitudes> locals;
  for (const auto& o : obs) locals.push_back(o.eigenvector(Setting::kU, 1));
  return tensor_product(locals).amplitude_vector();
}

HardySubspace build_hardy_subspace(const HardySpec& spec, const Observables& obs, double tol) {
  HardySubspace sub{spec, obs, zero_condition_products(spec, obs), {}, {}};
  sub.span_basis = gram_schmidt(sub.products, tol).basis;
  sub.complement = orthogonal_complement(sub.span_basis, tol);
  return sub;
}

HardyState best_state_in_subspace(const HardySubspace& sub, double tol) {
  const Amplitudes target = all_u_one_product(sub.observables);
  Amplitudes proj(target.size(), Complex{});
  for (const auto& c : sub.complement) {
    const Complex coeff = inner_product(c, target);
    for (std::size_t i = 0; i < proj.size(); ++i) proj[i] += coeff * c[i];
  }
  const double norm = vector_norm(proj);
  if (norm * norm <= tol)
    throw Error(ErrorCode::kNoHardyState, "no state in the Hardy subspace has q > 0");
  StateVector state = StateVector(sub.spec.dims, std::move(proj)).with_canonical_phase(tol);
  const double q = std::norm(inner_product(target, state.amps()));
  return HardyState{std::move(state), q, sub.dim_complement() == 1};
}

HardyConstruction build_hardy_state(const HardySpec& spec, const Observables& obs, double tol) {
  HardyConstruction result{build_hardy_subspace(spec, obs, tol), std::nullopt};
  if (result.subspace.dim_complement() == 1) {
    StateVector state = StateVector(spec.dims, result.subspace.complement.front()).with_canonical_phase(tol);
    const double q = std::norm(inner_product(all_u_one_product(obs), state.amps()));
    if (q <= tol)
      throw Error(ErrorCode::kNoHardyState, "the unique candidate state has q = 0");
    result.state = HardyState{std::move(state), q, true};
  }
  return result;
}

double q_value_3qubit(const std::array<Complex, 3>& alpha, const std::array<Complex, 3>& beta) {
  double a2 = 1.0, b2 = 1.0;
  for (int j = 0; j < 3; ++j) {
    a2 *= std::norm(alpha[j]);
    b2 *= std::norm(beta[j]);
  }
  if (a2 >= 1.0) throw Error(ErrorCode::kInvalidArgument, "|a1 a2 a3| = 1 is not admissible");
  return a2 * b2 / (1.0 - a2);
}

QubitMaximum maximize_q_3qubit() {
  const auto neg_q = [](double a) { return -(a * a * a * std::pow(1.0 - a, 3)) / (1.0 - a * a * a); };
  const auto [a, f] = boost::math::tools::brent_find_minima(neg_q, 1e-6, 1.0 - 1e-6,
                                                            std::numeric_limits<double>::digits);
  QubitMaximum m;
  m.abs_alpha = std::sqrt(a);
  m.abs_beta = std::sqrt(1.0 - a);
  m.alpha.fill(Complex{m.abs_alpha});
  m.beta.fill(Complex{m.abs_beta});
  m.q_max = q_value_3qubit(m.alpha, m.beta);
  (void)f;
  return m;
}

StateVector build_veto_state(int n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "veto state needs N >= 2");
  if (n > kMaxVetoParties)
    throw Error(ErrorCode::kTooLarge, "veto state capped at N = " + std::to_string(kMaxVetoParties));
  const std::size_t dim = std::size_t{1} << n;
  const double big = std::pow(2.0, n / 2.0);
  const double plus = std::pow(2.0, -n / 2.0);
  const double norm = std::sqrt(static_cast<double>(dim - 1));
  Amplitudes amps(dim, Complex{-plus / norm});
  amps[dim - 1] = (big - plus) / norm;
  return StateVector(std::vector<int>(n, 2), std::move(amps));
}

double condition_probability(const StateVector& state, const Observables& obs,
                             const ZeroCondition& cond) {
  const int n = state.parties();
  std::vector<int> constrained;
  for (int p = 0; p < n; ++p)
    if (cond.slots[p]) constrained.push_back(p);
  std::vector<std::size_t> pick(constrained.size(), 0);
  double total = 0.0;
  while (true) {
    PartialEvent ev(n);
    for (std::size_t k = 0; k < constrained.size(); ++k) {
      const auto& slot = *cond.slots[constrained[k]];
      ev[constrained[k]] = LocalEvent{slot.setting, slot.outcomes[pick[k]]};
    }
    total += marginal_probability(state, obs, ev);
    std::size_t k = constrained.size();
    while (k-- > 0) {
      if (++pick[k] < cond.slots[constrained[k]]->outcomes.size()) break;
      pick[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return total;
}

bool is_permutation_symmetric(const StateVector& state, double tol) {
  const int n = state.parties();
  const auto& dims = state.dims();
  for (int p = 0; p + 1 < n; ++p) {
    if (dims[p] != dims[p + 1]) return false;
    for (std::size_t i = 0; i < state.size(); ++i) {
      OutcomeTuple o = state.outcome_of(i);
      std::swap(o[p], o[p + 1]);
      if (std::abs(state.amp(i) - state.amp(state.index_of(o))) > tol) return false;
    }
  }
  return true;
}

ConditionReport verify_hardy_conditions(const StateVector& state, const Observables& obs,
                                        const HardySpec& spec, double tol) {
  check_spec_observables(spec, obs);
  if (state.dims() != spec.dims)
    throw Error(ErrorCode::kDimensionMismatch, "state dims do not match the Hardy spec");
  ConditionReport report;
  const int n = spec.parties();
  auto conds = zero_conditions(spec);
  if (spec.variant == HardyVariant::kModified && is_permutation_symmetric(state, tol) &&
      same_observables(obs, tol)) {
    report.symmetric_checks = true;
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < n; ++s) {
        if (s == r || s == (r + 1) % n) continue;
        ZeroCondition c;
        c.slots.assign(n, std::nullopt);
        c.slots[r] = SlotConstraint{Setting::kV, outcomes_except_last(spec.dims[r])};
        c.slots[s] = SlotConstraint{Setting::kU, {1}};
        c.label = party_label('v', r, "!=d") + "," + party_label('u', s, "=1");
        conds.insert(conds.end() - 1, std::move(c));
      }
    }
  }
  bool pass = true;
  for (const auto& c : conds) {
    const double p = condition_probability(state, obs, c);
    const bool ok = p < tol;
    pass = pass && ok;
    report.conditions.push_back(ConditionValue{c.label, p, true, ok});
  }
  report.q = born_probability(state, obs, SettingTuple(n, Setting::kU), OutcomeTuple(n, 1));
  const bool q_ok = report.q > tol;
  report.conditions.push_back(ConditionValue{"q: all u=1", report.q, false, q_ok});
  report.pass = pass && q_ok;
  return report;
}

std::vector<Bipartition> all_bipartitions(int parties) {
  std::vector<Bipartition> cuts;
  if (parties < 2) return cuts;
  // Party 0 is fixed on the listed side; iterate over subsets of the rest
  // that leave at least one party on the other side.
  const std::uint64_t rest = std::uint64_t{1} << (parties - 1);
  for (std::uint64_t mask = 0; mask + 1 < rest; ++mask) {
    Bipartition b{{0}};
    for (int p = 1; p < parties; ++p)
      if (mask & (std::uint64_t{1} << (p - 1))) b.parties.push_back(p);
    cuts.push_back(std::move(b));
  }
  return cuts;
}

EntanglementReport verify_genuine_entanglement(const StateVector& state, double tol) {
  EntanglementReport report;
  report.genuine = state.parties() >= 2;
  for (auto& cut : all_bipartitions(state.parties())) {
    const int rank = schmidt_rank(state, cut, tol);
    report.genuine = report.genuine && rank >= 2;
    report.cuts.push_back(CutRank{std::move(cut), rank});
  }
  return report;
}

}  // namespace hardyveto
