#include "hardyveto/serialization.hpp"

#include "hardyveto/error.hpp"

namespace hardyveto {

Json state_to_json(const StateVector& state) {
  Json amps = Json::array();
  for (const auto& a : state.amps()) amps.push_back({a.real(), a.imag()});
  return Json{{"dims", state.dims()}, {"amps", std::move(amps)}};
}

StateVector state_from_json(const Json& doc) {
  try {
    std::vector<int> dims = doc.at("dims").get<std::vector<int>>();
    Amplitudes amps;
    for (const auto& a : doc.at("amps")) {
      if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::kParse, "amplitude must be [re, im]");
      amps.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    return StateVector(std::move(dims), std::move(amps));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad state document: ") + e.what());
  }
}

Json condition_report_to_json(const ConditionReport& report) {
  Json conds = Json::array();
  for (const auto& c : report.conditions)
    conds.push_back({{"label", c.label}, {"value", c.value}, {"must_vanish", c.must_vanish}, {"pass", c.pass}});
  return Json{{"pass", report.pass}, {"q", report.q}, {"symmetric_checks", report.symmetric_checks},
              {"conditions", std::move(conds)}};
}

Json entanglement_to_json(const EntanglementReport& report) {
  Json cuts = Json::array();
  for (const auto& c : report.cuts) {
    std::vector<int> one_based;
    for (int p : c.cut.parties) one_based.push_back(p + 1);
    cuts.push_back({{"side", one_based}, {"schmidt_rank", c.rank}});
  }
  return Json{{"genuine", report.genuine}, {"cuts", std::move(cuts)}};
}

Json hardy_state_document(const StateVector& state, double q, std::optional<std::size_t> dim_complement,
                          const ConditionReport& conditions, const EntanglementReport& entanglement) {
  Json doc;
  doc["q"] = q;
  doc["dim_complement"] = dim_complement ? Json(*dim_complement) : Json(nullptr);
  doc["state"] = state_to_json(state);
  doc["conditions"] = condition_report_to_json(conditions);
  doc["entanglement"] = entanglement_to_json(entanglement);
  return doc;
}

BoundSummary compute_bound_summary(const HardySpec& spec) {
  BoundSummary s{spec, enumerate_lhv_max_q(spec).max_q, max_q_nosignaling(spec).max_q, std::nullopt};
  bool all_qubits = true;
  for (int d : spec.dims) all_qubits = all_qubits && d == 2;
  Observables obs;
  for (int d : spec.dims) obs.push_back(all_qubits ? ObservablePair::pauli_z_minus_x() : ObservablePair::computational_fourier(d));
  try {
    const HardyConstruction c = build_hardy_state(spec, obs);
    s.quantum_q = c.state ? c.state->q : best_state_in_subspace(c.subspace).q;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoHardyState) throw;
  }
  return s;
}

Json bound_to_json(const BoundSummary& s) {
  Json doc;
  doc["variant"] = variant_name(s.spec.variant);
  doc["n"] = s.spec.parties();
  doc["dims"] = s.spec.dims;
  doc["lhv_max"] = to_string(s.lhv_max);
  doc["ns_max"] = to_string(s.ns_max);
  doc["quantum_q"] = s.quantum_q ? Json(*s.quantum_q) : Json(nullptr);
  return doc;
}

Json simulation_to_json(const SimulationResult& r) {
  const ProtocolParams& p = r.params;
  Json params;
  params["n"] = p.n;
  params["rounds"] = p.rounds;
  params["p_test"] = p.p_test;
  params["list_length"] = r.list_length;
  params["noise"] = p.noise;
  params["seed"] = p.seed;
  params["ratio_mode"] = ratio_mode_name(p.ratio_mode);
  params["test_tolerance"] = p.test_tolerance;
  params["sifting"] = p.sifting;

  Json test;
  test["status"] = test_status_name(r.test_status);
  if (r.test_report) {
    test["test_rounds"] = r.test_report->test_rounds;
    Json conds = Json::array();
    for (const auto& c : r.test_report->conditions) {
      conds.push_back({{"label", c.label}, {"events", c.events}, {"trials", c.trials}, {"frequency", c.frequency},
                       {"expected", c.expected}, {"pass", c.pass}});
    }
    test["conditions"] = std::move(conds);
  }

  Json doc;
  doc["params"] = std::move(params);
  doc["votes_hidden"] = true;
  doc["vote_rounds"] = r.vote_rounds;
  doc["test_check"] = std::move(test);
  doc["aborted"] = r.aborted;
  if (r.transcript) {
    const auto& t = *r.transcript;
    doc["common_count"] = t.common.size();
    doc["count_plus"] = t.result.count_plus;
    doc["count_minus"] = t.result.count_minus;
    doc["tau_plus"] = t.thresholds.tau_plus;
    doc["tau_minus"] = t.thresholds.tau_minus;
    doc["verdict"] = verdict_name(t.result.verdict);
  } else {
    doc["common_count"] = 0;
    doc["count_plus"] = nullptr;
    doc["count_minus"] = nullptr;
    doc["tau_plus"] = nullptr;
    doc["tau_minus"] = nullptr;
    doc["verdict"] = nullptr;
  }
  doc["privacy"] = {{"target_ratio", r.privacy.target.text()},
                    {"list_lengths", r.privacy.list_lengths},
                    {"collected_plus_fraction", r.privacy.collected_plus_fraction}};
  doc["warnings"] = r.warnings;
  return doc;
}

Json audit_to_json(const AuditReport& a) {
  Json tests = Json::array();
  for (const auto& t : a.tests) {
    tests.push_back({{"name", t.name}, {"statistic", t.result.statistic}, {"df", t.result.df},
                     {"p_value", t.result.p_value}, {"pass", t.pass}});
  }
  Json doc;
  doc["member"] = a.member + 1;
  doc["favor_runs"] = a.favor_runs;
  doc["veto_runs"] = a.veto_runs;
  doc["alpha"] = a.alpha;
  doc["corrected_alpha"] = a.corrected_alpha;
  doc["tests"] = std::move(tests);
  doc["pass"] = a.pass;
  return doc;
}

}  // namespace hardyveto
