#pragma once

#include <json.hpp>

#include <optional>

#include "hardyveto/bounds.hpp"
#include "hardyveto/hardy_builder.hpp"
#include "hardyveto/privacy_audit.hpp"
#include "hardyveto/quantum_core.hpp"
#include "hardyveto/veto_protocol.hpp"

namespace hardyveto {

using Json = nlohmann::ordered_json;

// {"dims": [...], "amps": [[re, im], ...]}
Json state_to_json(const StateVector& state);
StateVector state_from_json(const Json& doc);

Json condition_report_to_json(const ConditionReport& report);
Json entanglement_to_json(const EntanglementReport& report);

// State, q, dim_complement, condition residuals and entanglement certificate.
Json hardy_state_document(const StateVector& state, double q, std::optional<std::size_t> dim_complement,
                          const ConditionReport& conditions, const EntanglementReport& entanglement);

struct BoundSummary {
  HardySpec spec;
  Rational lhv_max;
  Rational ns_max;
  std::optional<double> quantum_q;
};

BoundSummary compute_bound_summary(const HardySpec& spec);
Json bound_to_json(const BoundSummary& summary);

Json simulation_to_json(const SimulationResult& result);
Json audit_to_json(const AuditReport& report);

}  // namespace hardyveto
