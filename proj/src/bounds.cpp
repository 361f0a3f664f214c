#include "hardyveto/bounds.hpp"

#include <algorithm>

#include "hardyveto/error.hpp"

namespace hardyveto {

BehaviorLayout::BehaviorLayout(std::vector<int> dims)
    : dims_(std::move(dims)), contexts_(std::size_t{1} << dims_.size()), outcomes_(total_dimension(dims_)) {}

std::size_t BehaviorLayout::context_index(const SettingTuple& s) const {
  if (s.size() != dims_.size()) throw Error(ErrorCode::kDimensionMismatch, "context length mismatch");
  std::size_t idx = 0;
  for (Setting x : s) idx = (idx << 1) | (x == Setting::kV ? 1u : 0u);
  return idx;
}

SettingTuple BehaviorLayout::context_settings(std::size_t ctx) const {
  const int n = parties();
  SettingTuple s(n);
  for (int p = 0; p < n; ++p) s[p] = (ctx >> (n - 1 - p)) & 1u ? Setting::kV : Setting::kU;
  return s;
}

std::size_t BehaviorLayout::outcome_index(const OutcomeTuple& o) const {
  std::size_t idx = 0;
  for (std::size_t p = 0; p < dims_.size(); ++p) idx = idx * dims_[p] + static_cast<std::size_t>(o[p] - 1);
  return idx;
}

OutcomeTuple BehaviorLayout::outcome_tuple(std::size_t idx) const {
  OutcomeTuple o(dims_.size());
  for (std::size_t p = dims_.size(); p-- > 0;) {
    o[p] = static_cast<int>(idx % dims_[p]) + 1;
    idx /= dims_[p];
  }
  return o;
}

std::vector<LinearConstraint> normalization_constraints(const HardySpec& spec) {
  spec.validate();
  BehaviorLayout layout(spec.dims);
  std::vector<LinearConstraint> out;
  for (std::size_t c = 0; c < layout.contexts(); ++c) {
    LinearConstraint row;
    row.rhs = 1;
    row.label = "norm ctx " + std::to_string(c);
    for (std::size_t o = 0; o < layout.outcomes_per_context(); ++o) row.terms.push_back({layout.variable(c, o), 1});
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<LinearConstraint> nosignaling_constraints(const HardySpec& spec) {
  spec.validate();
  BehaviorLayout layout(spec.dims);
  const int n = spec.parties();
  std::vector<LinearConstraint> out;
  for (int r = 0; r < n; ++r) {
    const std::size_t bit = std::size_t{1} << (n - 1 - r);
    for (std::size_t ctx = 0; ctx < layout.contexts(); ++ctx) {
      if (ctx & bit) continue;  // pair ctx (r measures U) with ctx | bit (r measures V)
      const std::size_t other = ctx | bit;
      // Outcome tuples grouped by the outcomes of the remote parties.
      std::vector<std::vector<std::size_t>> groups;
      std::vector<std::size_t> group_of(layout.outcomes_per_context());
      std::vector<std::pair<OutcomeTuple, std::size_t>> seen;
      for (std::size_t o = 0; o < layout.outcomes_per_context(); ++o) {
        OutcomeTuple remote = layout.outcome_tuple(o);
        remote[r] = 0;
        auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& s) { return s.first == remote; });
        if (it == seen.end()) {
          seen.emplace_back(remote, groups.size());
          groups.emplace_back();
          it = seen.end() - 1;
        }
        groups[it->second].push_back(o);
      }
      for (std::size_t g = 0; g < groups.size(); ++g) {
        LinearConstraint row;
        row.rhs = 0;
        row.label = "ns party " + std::to_string(r + 1) + " ctx " + std::to_string(ctx) + " group " + std::to_string(g);
        for (std::size_t o : groups[g]) {
          row.terms.push_back({layout.variable(ctx, o), 1});
          row.terms.push_back({layout.variable(other, o), -1});
        }
        out.push_back(std::move(row));
      }
    }
  }
  return out;
}

SettingTuple designated_context(const ZeroCondition& cond) {
  SettingTuple s;
  for (const auto& slot : cond.slots) s.push_back(slot ? slot->setting : Setting::kU);
  return s;
}

LinearConstraint zero_constraint_in_context(const HardySpec& spec, const ZeroCondition& cond,
                                            const SettingTuple& context) {
  BehaviorLayout layout(spec.dims);
  const int n = spec.parties();
  for (int p = 0; p < n; ++p) {
    if (cond.slots[p] && cond.slots[p]->setting != context[p])
      throw Error(ErrorCode::kInvalidArgument, "context does not contain the condition's settings");
  }
  const std::size_t ctx = layout.context_index(context);
  LinearConstraint row;
  row.rhs = 0;
  row.label = cond.label;
  for (std::size_t o = 0; o < layout.outcomes_per_context(); ++o) {
    const OutcomeTuple out = layout.outcome_tuple(o);
    bool match = true;
    for (int p = 0; p < n && match; ++p) {
      if (!cond.slots[p]) continue;
      const auto& allowed = cond.slots[p]->outcomes;
      match = std::find(allowed.begin(), allowed.end(), out[p]) != allowed.end();
    }
    if (match) row.terms.push_back({layout.variable(ctx, o), 1});
  }
  return row;
}

std::vector<LinearConstraint> hardy_zero_constraints(const HardySpec& spec) {
  std::vector<LinearConstraint> out;
  for (const auto& cond : zero_conditions(spec))
    out.push_back(zero_constraint_in_context(spec, cond, designated_context(cond)));
  return out;
}

BehaviorTable<double> quantum_behavior(const StateVector& state, const Observables& obs) {
  BehaviorTable<double> table{BehaviorLayout(state.dims()), {}};
  table.entries.reserve(table.layout.size());
  for (std::size_t c = 0; c < table.layout.contexts(); ++c) {
    const auto dist = context_distribution(state, obs, table.layout.context_settings(c));
    table.entries.insert(table.entries.end(), dist.begin(), dist.end());
  }
  return table;
}

LhvResult enumerate_lhv_max_q(const HardySpec& spec) {
  spec.validate();
  const int n = spec.parties();
  std::uint64_t total = 1;
  for (int d : spec.dims) {
    total *= static_cast<std::uint64_t>(d) * d;
    if (total > kMaxLhvStrategies)
      throw Error(ErrorCode::kTooLarge, "too many deterministic strategies to enumerate");
  }
  const auto conds = zero_conditions(spec);
  // LHV behaviors are convex mixtures of deterministic strategies and q is
  // linear, so the maximum over the polytope is attained at a vertex.
  LhvResult result;
  result.max_q = -1;
  result.strategies = total;
  DeterministicStrategy s{std::vector<std::array<int, 2>>(n, {1, 1})};
  for (std::uint64_t k = 0; k < total; ++k) {
    std::uint64_t rest = k;
    for (int p = n - 1; p >= 0; --p) {
      const int d = spec.dims[p];
      s.outputs[p][1] = static_cast<int>(rest % d) + 1;
      rest /= d;
      s.outputs[p][0] = static_cast<int>(rest % d) + 1;
      rest /= d;
    }
    bool violates = false;
    for (const auto& c : conds) {
      bool fires = true;
      for (int p = 0; p < n && fires; ++p) {
        if (!c.slots[p]) continue;
        const auto& allowed = c.slots[p]->outcomes;
        fires = std::find(allowed.begin(), allowed.end(), s.output(p, c.slots[p]->setting)) != allowed.end();
      }
      if (fires) {
        violates = true;
        break;
      }
    }
    if (violates) continue;
    ++result.survivors;
    const bool success = std::all_of(s.outputs.begin(), s.outputs.end(), [](const auto& o) { return o[0] == 1; });
    const Rational value = success ? 1 : 0;
    if (value > result.max_q) {
      result.max_q = value;
      result.witness = s;
    }
  }
  if (result.survivors == 0) result.max_q = 0;
  return result;
}

LinearProgram hardy_nosignaling_lp(const HardySpec& spec) {
  BehaviorLayout layout(spec.dims);
  LinearProgram lp;
  lp.num_vars = layout.size();
  lp.objective.assign(lp.num_vars, Rational(0));
  lp.objective[layout.variable(0, 0)] = 1;  // all-U context, all outcomes 1
  for (auto* part : {&normalization_constraints, &nosignaling_constraints, &hardy_zero_constraints}) {
    for (auto& row : (*part)(spec)) lp.equalities.push_back(std::move(row));
  }
  return lp;
}

NoSignalingResult max_q_nosignaling(const HardySpec& spec) {
  const LinearProgram lp = hardy_nosignaling_lp(spec);
  const LpSolution sol = simplex_solve(lp);
  return NoSignalingResult{sol.optimum, sol.x, lp.num_vars, lp.equalities.size(), sol.pivots};
}

}  // namespace hardyveto
