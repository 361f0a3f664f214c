#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hardyveto/rng.hpp"

namespace hardyveto {

using Complex = std::complex<double>;
using Amplitudes = std::vector<Complex>;

// Rank and orthogonality decisions use this threshold on vector norms.
inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kNormTol = 1e-12;

enum class Setting : std::uint8_t { kU = 0, kV = 1 };

using SettingTuple = std::vector<Setting>;
// Outcomes are 1..d. For qubits, outcome 1 is reported as +1 and 2 as -1.
using OutcomeTuple = std::vector<int>;

inline int outcome_to_sign(int outcome) { return outcome == 1 ? +1 : -1; }
inline int sign_to_outcome(int sign) { return sign > 0 ? 1 : 2; }

char setting_char(Setting s);

// Normalized pure state on a tensor product of local spaces. Amplitudes are
// indexed mixed-radix with party 0 most significant.
class StateVector {
 public:
  // Normalizes `amps`; throws if the vector is zero or the length does not
  // match the product of `dims`.
  StateVector(std::vector<int> dims, Amplitudes amps);

  static StateVector basis_state(std::vector<int> dims, std::size_t index);

  const std::vector<int>& dims() const { return dims_; }
  std::span<const Complex> amps() const { return amps_; }
  const Amplitudes& amplitude_vector() const { return amps_; }
  Complex amp(std::size_t i) const { return amps_[i]; }
  std::size_t size() const { return amps_.size(); }
  int parties() const { return static_cast<int>(dims_.size()); }

  std::size_t index_of(const OutcomeTuple& outcomes) const;
  OutcomeTuple outcome_of(std::size_t index) const;

  // Multiplies by a unit phase so the first amplitude with |a| > tol is real
  // and positive.
  StateVector with_canonical_phase(double tol = kDefaultTol) const;

 private:
  std::vector<int> dims_;
  Amplitudes amps_;
};

std::size_t total_dimension(std::span<const int> dims);

// Eigenbases of the two local observables. Basis vector k of a setting is the
// eigenvector with outcome k + 1.
class ObservablePair {
 public:
  ObservablePair(std::vector<Amplitudes> u_basis, std::vector<Amplitudes> v_basis);

  // |u=1> = alpha|v=1> + beta|v=2>, |u=2> = conj(beta)|v=1> - conj(alpha)|v=2>,
  // with the v eigenbasis taken as the computational basis. Throws
  // kDegenerateObservables when |alpha| or |beta| is 0 or 1.
  static ObservablePair qubit(Complex alpha, Complex beta);

  // u = sigma_z, v = -sigma_x. Outcome 1 (+1): |0>, |->; outcome 2 (-1): |1>, |+>.
  static ObservablePair pauli_z_minus_x();

  // u = computational basis, v = discrete Fourier basis of dimension d.
  static ObservablePair computational_fourier(int d);

  int dim() const { return static_cast<int>(u_.size()); }
  const std::vector<Amplitudes>& basis(Setting s) const { return s == Setting::kU ? u_ : v_; }
  const Amplitudes& eigenvector(Setting s, int outcome) const;

  std::optional<Complex> alpha() const { return alpha_; }
  std::optional<Complex> beta() const { return beta_; }

 private:
  std::vector<Amplitudes> u_;
  std::vector<Amplitudes> v_;
  std::optional<Complex> alpha_;
  std::optional<Complex> beta_;
};

using Observables = std::vector<ObservablePair>;

struct LocalEvent {
  Setting setting;
  int outcome;
};
// One entry per party; nullopt marginalizes that party.
using PartialEvent = std::vector<std::optional<LocalEvent>>;

StateVector tensor_product(std::span<const Amplitudes> locals);

// Amplitudes of `state` in the product eigenbasis selected by `settings`;
// entry i is <e_{settings, outcome_of(i)} | state>.
Amplitudes context_amplitudes(const StateVector& state, const Observables& obs,
                              const SettingTuple& settings);

// Born distribution over all outcome tuples of one context.
std::vector<double> context_distribution(const StateVector& state, const Observables& obs,
                                         const SettingTuple& settings);

double born_probability(const StateVector& state, const Observables& obs,
                        const SettingTuple& settings, const OutcomeTuple& outcomes);

// Probability that every constrained party sees its outcome. Computed by
// projecting only the constrained parties, so the result cannot depend on
// the settings of the others.
double marginal_probability(const StateVector& state, const Observables& obs,
                            const PartialEvent& event);

struct GramSchmidtResult {
  std::vector<Amplitudes> basis;
  std::size_t rank = 0;
};

// Modified Gram-Schmidt with one re-orthogonalization pass. Inputs whose
// residual norm falls below tol are dropped.
GramSchmidtResult gram_schmidt(std::span<const Amplitudes> vectors, double tol = kDefaultTol);

// Orthonormal basis of the orthogonal complement of span(vectors) in the
// common space; D - rank vectors.
std::vector<Amplitudes> orthogonal_complement(std::span<const Amplitudes> vectors,
                                              double tol = kDefaultTol);

struct Bipartition {
  std::vector<int> parties;  // one side of the cut, 0-based
};

void validate_cut(const Bipartition& cut, int parties);

std::vector<double> schmidt_coefficients(const StateVector& state, const Bipartition& cut);
int schmidt_rank(const StateVector& state, const Bipartition& cut, double tol = kDefaultTol);

// Reusable cumulative distribution of one context.
class OutcomeSampler {
 public:
  explicit OutcomeSampler(std::vector<double> distribution);
  std::size_t sample(Rng& rng) const;
  std::span<const double> cdf() const { return cdf_; }

 private:
  std::vector<double> cdf_;
};

OutcomeTuple sample_outcome(const StateVector& state, const Observables& obs,
                            const SettingTuple& settings, Rng& rng);

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b);
double vector_norm(std::span<const Complex> a);

}  // namespace hardyveto
