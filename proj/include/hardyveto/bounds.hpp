#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hardyveto/hardy_builder.hpp"
#include "hardyveto/quantum_core.hpp"
#include "hardyveto/simplex.hpp"

namespace hardyveto {

// Indexing of behavior entries: contexts are setting tuples read as binary
// numbers (U = 0, party 0 most significant); outcome tuples use the same
// mixed radix as StateVector. Variable = context * outcomes + outcome.
class BehaviorLayout {
 public:
  explicit BehaviorLayout(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int parties() const { return static_cast<int>(dims_.size()); }
  std::size_t contexts() const { return contexts_; }
  std::size_t outcomes_per_context() const { return outcomes_; }
  std::size_t size() const { return contexts_ * outcomes_; }

  std::size_t context_index(const SettingTuple& s) const;
  SettingTuple context_settings(std::size_t ctx) const;
  std::size_t outcome_index(const OutcomeTuple& o) const;
  OutcomeTuple outcome_tuple(std::size_t idx) const;
  std::size_t variable(std::size_t ctx, std::size_t outcome) const { return ctx * outcomes_ + outcome; }

 private:
  std::vector<int> dims_;
  std::size_t contexts_;
  std::size_t outcomes_;
};

template <class T>
struct BehaviorTable {
  BehaviorLayout layout;
  std::vector<T> entries;

  const T& at(const SettingTuple& s, const OutcomeTuple& o) const {
    return entries[layout.variable(layout.context_index(s), layout.outcome_index(o))];
  }
};

// Sum over x_r of P(context, x) equals the same sum with r's setting
// flipped, for every party r, remote context and remote outcome.
std::vector<LinearConstraint> nosignaling_constraints(const HardySpec& spec);

// Each context's entries sum to one.
std::vector<LinearConstraint> normalization_constraints(const HardySpec& spec);

// The event of `cond`, marginalized over its free parties, in `context`
// (whose entries on constrained parties must match the condition).
LinearConstraint zero_constraint_in_context(const HardySpec& spec, const ZeroCondition& cond,
                                            const SettingTuple& context);

// Smallest containing context: free parties measure U.
SettingTuple designated_context(const ZeroCondition& cond);

// One equality per zero condition, in its designated context.
std::vector<LinearConstraint> hardy_zero_constraints(const HardySpec& spec);

BehaviorTable<double> quantum_behavior(const StateVector& state, const Observables& obs);

struct DeterministicStrategy {
  // outputs[p] = {outcome for U, outcome for V}
  std::vector<std::array<int, 2>> outputs;

  int output(int party, Setting s) const { return outputs[party][s == Setting::kU ? 0 : 1]; }
};

struct LhvResult {
  Rational max_q;
  DeterministicStrategy witness;
  std::uint64_t strategies = 0;
  std::uint64_t survivors = 0;
};

inline constexpr std::uint64_t kMaxLhvStrategies = 10'000'000;

// Searches all deterministic local strategies. Throws kTooLarge when the
// number of strategies exceeds kMaxLhvStrategies.
LhvResult enumerate_lhv_max_q(const HardySpec& spec);

struct NoSignalingResult {
  Rational max_q;
  std::vector<Rational> behavior;  // optimal point, indexed by BehaviorLayout
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::size_t pivots = 0;
};

LinearProgram hardy_nosignaling_lp(const HardySpec& spec);

// Maximum of P(all u = 1) over no-signaling behaviors obeying the zero
// conditions of spec.variant.
NoSignalingResult max_q_nosignaling(const HardySpec& spec);

}  // namespace hardyveto
