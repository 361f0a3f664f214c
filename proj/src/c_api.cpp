#include "hardyveto/hardyveto.h"

#include <cmath>
#include <cstring>
#include <string>

#include "hardyveto/bounds.hpp"
#include "hardyveto/error.hpp"
#include "hardyveto/hardy_builder.hpp"
#include "hardyveto/privacy_audit.hpp"
#include "hardyveto/quantum_core.hpp"
#include "hardyveto/serialization.hpp"
#include "hardyveto/veto_protocol.hpp"

using namespace hardyveto;

struct hv_state {
  StateVector value;
};
struct hv_observables {
  Observables value;
};
struct hv_simulation {
  SimulationResult value;
};

namespace {

thread_local std::string g_last_error;

hv_status fail(hv_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
hv_status guarded(F&& body) {
  try {
    body();
    return HV_OK;
  } catch (const Error& e) {
    return fail(static_cast<hv_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(HV_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HV_ERR_TOO_LARGE, "out of memory");
  } catch (const std::exception& e) {
    return fail(HV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HV_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

HardyVariant to_variant(hv_variant v) {
  switch (v) {
    case HV_VARIANT_CONVENTIONAL: return HardyVariant::kConventional;
    case HV_VARIANT_MODIFIED: return HardyVariant::kModified;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown Hardy variant");
}

HardySpec spec_for(const Observables& obs, HardyVariant variant) {
  HardySpec spec;
  spec.variant = variant;
  for (const auto& o : obs) spec.dims.push_back(o.dim());
  return spec;
}

ProtocolParams to_params(const hv_protocol_params* p) {
  require(p != nullptr, "params is null");
  ProtocolParams out;
  out.n = p->n;
  out.rounds = p->rounds;
  out.p_test = p->p_test;
  if (p->list_length != 0) out.list_length = p->list_length;
  if (p->tau_plus != 0) out.tau_plus = p->tau_plus;
  if (p->tau_minus != 0) out.tau_minus = p->tau_minus;
  out.noise = p->noise;
  out.seed = p->seed;
  switch (p->ratio_mode) {
    case HV_RATIO_BORN_DERIVED: out.ratio_mode = RatioMode::kBornDerived; break;
    case HV_RATIO_PAPER_STATED: out.ratio_mode = RatioMode::kPaperStated; break;
    default: throw Error(ErrorCode::kInvalidArgument, "unknown ratio mode");
  }
  out.test_tolerance = p->test_tolerance;
  out.sifting = p->sifting != 0;
  out.validate();
  return out;
}

}  // namespace

extern "C" {

const char* hv_version(void) { return "0.1.0"; }

const char* hv_status_name(hv_status status) {
  if (status == HV_OK) return "OK";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* hv_last_error(void) { return g_last_error.c_str(); }

void hv_string_free(char* s) { delete[] s; }

hv_status hv_state_create(const int* dims, size_t n_parties, const double* amps, size_t n_amps,
                          hv_state** out) {
  return guarded([&] {
    require(dims && amps && out, "null argument");
    std::vector<int> d(dims, dims + n_parties);
    Amplitudes a(n_amps);
    for (size_t i = 0; i < n_amps; ++i) a[i] = Complex(amps[2 * i], amps[2 * i + 1]);
    *out = new hv_state{StateVector(std::move(d), std::move(a))};
  });
}

hv_status hv_state_from_json(const char* json, hv_state** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new hv_state{state_from_json(Json::parse(json))};
  });
}

hv_status hv_state_to_json(const hv_state* state, char** json_out) {
  return guarded([&] {
    require(state && json_out, "null argument");
    *json_out = copy_string(state_to_json(state->value).dump());
  });
}

hv_status hv_state_veto(int n, hv_state** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new hv_state{build_veto_state(n)};
  });
}

void hv_state_free(hv_state* state) { delete state; }

size_t hv_state_parties(const hv_state* state) { return state ? state->value.dims().size() : 0; }

size_t hv_state_size(const hv_state* state) { return state ? state->value.size() : 0; }

hv_status hv_state_amplitude(const hv_state* state, size_t index, double* re, double* im) {
  return guarded([&] {
    require(state && re && im, "null argument");
    if (index >= state->value.size()) throw Error(ErrorCode::kDimensionMismatch, "amplitude index out of range");
    *re = state->value.amp(index).real();
    *im = state->value.amp(index).imag();
  });
}

hv_status hv_observables_protocol(size_t n, hv_observables** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    require(n >= 1, "need at least one party");
    *out = new hv_observables{Observables(n, ObservablePair::pauli_z_minus_x())};
  });
}

hv_status hv_observables_qubit(const double* alpha_re, const double* alpha_im, const double* beta_re,
                               const double* beta_im, size_t n, hv_observables** out) {
  return guarded([&] {
    require(alpha_re && out, "null argument");
    require(n >= 1, "need at least one party");
    Observables obs;
    for (size_t i = 0; i < n; ++i) {
      const Complex alpha(alpha_re[i], alpha_im ? alpha_im[i] : 0.0);
      Complex beta;
      if (beta_re) {
        beta = Complex(beta_re[i], beta_im ? beta_im[i] : 0.0);
      } else {
        const double rest = 1.0 - std::norm(alpha);
        if (rest < -kNormTol) throw Error(ErrorCode::kInvalidArgument, "|alpha| exceeds 1");
        beta = std::sqrt(std::max(rest, 0.0));
      }
      obs.push_back(ObservablePair::qubit(alpha, beta));
    }
    *out = new hv_observables{std::move(obs)};
  });
}

void hv_observables_free(hv_observables* obs) { delete obs; }

hv_status hv_born_probability(const hv_state* state, const hv_observables* obs, const int* settings,
                              const int* outcomes, double* out) {
  return guarded([&] {
    require(state && obs && settings && outcomes && out, "null argument");
    const size_t n = obs->value.size();
    SettingTuple s(n);
    OutcomeTuple o(outcomes, outcomes + n);
    for (size_t i = 0; i < n; ++i) {
      require(settings[i] == HV_U || settings[i] == HV_V, "setting must be HV_U or HV_V");
      s[i] = settings[i] == HV_U ? Setting::kU : Setting::kV;
    }
    *out = born_probability(state->value, obs->value, s, o);
  });
}

hv_status hv_schmidt_rank(const hv_state* state, const int* side, size_t side_len, double tol, int* rank_out) {
  return guarded([&] {
    require(state && rank_out && (side || side_len == 0), "null argument");
    Bipartition cut;
    for (size_t i = 0; i < side_len; ++i) cut.parties.push_back(side[i] - 1);
    *rank_out = schmidt_rank(state->value, cut, tol);
  });
}

hv_status hv_hardy_build(const hv_observables* obs, hv_variant variant, hv_state** state_out, double* q_out,
                         size_t* dim_complement_out, int* unique_out) {
  return guarded([&] {
    require(obs && state_out, "null argument");
    const HardySpec spec = spec_for(obs->value, to_variant(variant));
    HardyConstruction built = build_hardy_state(spec, obs->value);
    HardyState hs = built.state ? *built.state : best_state_in_subspace(built.subspace);
    if (q_out) *q_out = hs.q;
    if (dim_complement_out) *dim_complement_out = built.subspace.dim_complement();
    if (unique_out) *unique_out = built.state.has_value() ? 1 : 0;
    *state_out = new hv_state{std::move(hs.state)};
  });
}

hv_status hv_hardy_report(const hv_state* state, const hv_observables* obs, hv_variant variant, char** json_out,
                          int* pass_out) {
  return guarded([&] {
    require(state && obs && json_out, "null argument");
    const HardySpec spec = spec_for(obs->value, to_variant(variant));
    if (spec.dims != state->value.dims()) throw Error(ErrorCode::kDimensionMismatch, "state and observables differ in shape");
    const ConditionReport report = verify_hardy_conditions(state->value, obs->value, spec);
    const EntanglementReport ent = verify_genuine_entanglement(state->value);
    const HardySubspace sub = build_hardy_subspace(spec, obs->value);
    const Json doc = hardy_state_document(state->value, report.q, sub.dim_complement(), report, ent);
    if (pass_out) *pass_out = report.pass ? 1 : 0;
    *json_out = copy_string(doc.dump(2));
  });
}

hv_status hv_q_value_3qubit(const double abs_alpha[3], double* q_out) {
  return guarded([&] {
    require(abs_alpha && q_out, "null argument");
    std::array<Complex, 3> a{}, b{};
    for (int i = 0; i < 3; ++i) {
      require(abs_alpha[i] > 0.0 && abs_alpha[i] < 1.0, "|alpha| must lie in (0, 1)");
      a[i] = abs_alpha[i];
      b[i] = std::sqrt(1.0 - abs_alpha[i] * abs_alpha[i]);
    }
    *q_out = q_value_3qubit(a, b);
  });
}

hv_status hv_maximize_q_3qubit(double* q_max_out, double* abs_alpha_out) {
  return guarded([&] {
    require(q_max_out != nullptr, "null argument");
    const QubitMaximum m = maximize_q_3qubit();
    *q_max_out = m.q_max;
    if (abs_alpha_out) *abs_alpha_out = m.abs_alpha;
  });
}

hv_status hv_bound(int n, int d, hv_variant variant, char** json_out) {
  return guarded([&] {
    require(json_out != nullptr, "null argument");
    const HardySpec spec = HardySpec::uniform(n, d, to_variant(variant));
    *json_out = copy_string(bound_to_json(compute_bound_summary(spec)).dump(2));
  });
}

hv_status hv_lhv_max_q(int n, int d, hv_variant variant, char** fraction_out) {
  return guarded([&] {
    require(fraction_out != nullptr, "null argument");
    const HardySpec spec = HardySpec::uniform(n, d, to_variant(variant));
    *fraction_out = copy_string(to_string(enumerate_lhv_max_q(spec).max_q));
  });
}

hv_status hv_ns_max_q(int n, int d, hv_variant variant, char** fraction_out) {
  return guarded([&] {
    require(fraction_out != nullptr, "null argument");
    const HardySpec spec = HardySpec::uniform(n, d, to_variant(variant));
    *fraction_out = copy_string(to_string(max_q_nosignaling(spec).max_q));
  });
}

void hv_protocol_params_default(hv_protocol_params* params) {
  if (!params) return;
  const ProtocolParams d;
  params->n = d.n;
  params->rounds = d.rounds;
  params->p_test = d.p_test;
  params->list_length = 0;
  params->tau_plus = 0;
  params->tau_minus = 0;
  params->noise = d.noise;
  params->seed = d.seed;
  params->ratio_mode = HV_RATIO_BORN_DERIVED;
  params->test_tolerance = d.test_tolerance;
  params->sifting = 1;
}

hv_status hv_simulate(const hv_protocol_params* params, const char* votes, hv_simulation** out) {
  return guarded([&] {
    require(votes && out, "null argument");
    const ProtocolParams p = to_params(params);
    *out = new hv_simulation{simulate(p, parse_votes(votes))};
  });
}

int hv_simulation_aborted(const hv_simulation* sim) { return sim && sim->value.aborted ? 1 : 0; }

hv_verdict hv_simulation_verdict(const hv_simulation* sim) {
  if (!sim || sim->value.aborted || !sim->value.transcript) return HV_VERDICT_NONE;
  switch (sim->value.transcript->result.verdict) {
    case Verdict::kApprovedUnanimousFavor: return HV_VERDICT_APPROVED_UNANIMOUS_FAVOR;
    case Verdict::kVetoedMixed: return HV_VERDICT_VETOED_MIXED;
    case Verdict::kVetoedAllAgainst: return HV_VERDICT_VETOED_ALL_AGAINST;
  }
  return HV_VERDICT_NONE;
}

hv_status hv_simulation_to_json(const hv_simulation* sim, char** json_out) {
  return guarded([&] {
    require(sim && json_out, "null argument");
    *json_out = copy_string(simulation_to_json(sim->value).dump(2));
  });
}

void hv_simulation_free(hv_simulation* sim) { delete sim; }

hv_status hv_audit(const hv_protocol_params* params, const char* base_votes, int member, size_t runs,
                   double alpha, char** json_out, int* pass_out) {
  return guarded([&] {
    require(base_votes && json_out, "null argument");
    AuditPlan plan;
    plan.params = to_params(params);
    plan.base_votes = parse_votes(base_votes);
    require(member >= 1 && member <= static_cast<int>(plan.base_votes.size()), "member out of range");
    plan.member = member - 1;
    plan.runs = runs;
    plan.alpha = alpha;
    const AuditReport report = run_privacy_audit(plan);
    if (pass_out) *pass_out = report.pass ? 1 : 0;
    *json_out = copy_string(audit_to_json(report).dump(2));
  });
}

}  // extern "C"
