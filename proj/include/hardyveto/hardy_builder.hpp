#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hardyveto/quantum_core.hpp"

namespace hardyveto {

enum class HardyVariant {
  kConventional,  // n-1 parties fixed at u=1, one party v != d
  kModified,      // cyclic two-party conditions v_r != d_r, u_{r+1} = 1
};

const char* variant_name(HardyVariant v);
HardyVariant parse_variant(const std::string& name);

struct HardySpec {
  std::vector<int> dims;
  HardyVariant variant = HardyVariant::kModified;

  static HardySpec qubits(int n, HardyVariant variant);
  static HardySpec uniform(int n, int d, HardyVariant variant);
  int parties() const { return static_cast<int>(dims.size()); }
  // Throws kInvalidArgument unless n >= 2 and every d_i >= 2.
  void validate() const;
};

// A constrained slot: the party measures `setting` and sees one of `outcomes`.
struct SlotConstraint {
  Setting setting;
  std::vector<int> outcomes;
};

// One zero-probability line of the Hardy conditions. Unconstrained parties
// (nullopt slots) are marginalized.
struct ZeroCondition {
  std::string label;
  std::vector<std::optional<SlotConstraint>> slots;
  bool all_v = false;
};

std::vector<ZeroCondition> zero_conditions(const HardySpec& spec);

// Product basis vectors consistent with some zero condition. Free slots are
// expanded in the u eigenbasis. The all-v product |v_i = d_i> comes first.
// The list may contain linearly dependent vectors.
std::vector<Amplitudes> zero_condition_products(const HardySpec& spec, const Observables& obs);

// |u_i = 1> for every party.
Amplitudes all_u_one_product(const Observables& obs);

struct HardySubspace {
  HardySpec spec;
  Observables observables;
  std::vector<Amplitudes> products;
  std::vector<Amplitudes> span_basis;  // S
  std::vector<Amplitudes> complement;  // S-perp

  std::size_t dim_span() const { return span_basis.size(); }
  std::size_t dim_complement() const { return complement.size(); }
};

HardySubspace build_hardy_subspace(const HardySpec& spec, const Observables& obs,
                                   double tol = kDefaultTol);

struct HardyState {
  StateVector state;
  double q = 0.0;
  bool unique = false;
};

struct HardyConstruction {
  HardySubspace subspace;
  std::optional<HardyState> state;  // set only when S-perp is one-dimensional
};

// When S-perp is one-dimensional the Hardy state is its spanning vector
// (phase fixed so the first nonzero amplitude is real positive). Otherwise
// only the subspace is returned. Throws kNoHardyState if the unique
// candidate has q <= tol.
HardyConstruction build_hardy_state(const HardySpec& spec, const Observables& obs,
                                    double tol = kDefaultTol);

// The state in S-perp with the largest q: the normalized projection of
// |u_i = 1> onto S-perp. Throws kNoHardyState if that projection vanishes.
HardyState best_state_in_subspace(const HardySubspace& subspace, double tol = kDefaultTol);

// q = |a1 a2 a3|^2 |b1 b2 b3|^2 / (1 - |a1 a2 a3|^2)
double q_value_3qubit(const std::array<Complex, 3>& alpha, const std::array<Complex, 3>& beta);

struct QubitMaximum {
  double q_max = 0.0;
  double abs_alpha = 0.0;  // shared by all three parties at the optimum
  double abs_beta = 0.0;
  std::array<Complex, 3> alpha{};
  std::array<Complex, 3> beta{};
};

// Maximizes q over the symmetric line |alpha_j|^2 = a, where q reduces to
// a^3 (1-a)^3 / (1 - a^3).
QubitMaximum maximize_q_3qubit();

inline constexpr int kMaxVetoParties = 12;

// (2^{n/2} |1>^n - |+>^n) / sqrt(2^n - 1), 2 <= n <= 12.
StateVector build_veto_state(int n);

struct ConditionValue {
  std::string label;
  double value = 0.0;
  bool must_vanish = true;  // false for the q condition
  bool pass = false;
};

struct ConditionReport {
  std::vector<ConditionValue> conditions;
  double q = 0.0;
  bool symmetric_checks = false;
  bool pass = false;
};

double condition_probability(const StateVector& state, const Observables& obs,
                             const ZeroCondition& cond);

// Evaluates every zero condition and q. For permutation-symmetric states
// with identical local observables, also checks every ordered pair (r, s)
// rather than only s = r + 1.
ConditionReport verify_hardy_conditions(const StateVector& state, const Observables& obs,
                                        const HardySpec& spec, double tol = kDefaultTol);

struct CutRank {
  Bipartition cut;
  int rank = 0;
};

struct EntanglementReport {
  bool genuine = false;
  std::vector<CutRank> cuts;
};

// All 2^{n-1} - 1 bipartitions (party 0 is always on the listed side).
std::vector<Bipartition> all_bipartitions(int parties);

EntanglementReport verify_genuine_entanglement(const StateVector& state, double tol = kDefaultTol);

bool is_permutation_symmetric(const StateVector& state, double tol = kDefaultTol);

}  // namespace hardyveto
