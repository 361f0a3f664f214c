#include "hardyveto/quantum_core.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hardyveto/error.hpp"

namespace hardyveto {

namespace {

constexpr double kProbabilityFloor = 1e-18;

void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

// Contracts party `party` of a tensor with shape `dims` against the bra
// conj(vec), removing that party.
Amplitudes contract_party(const Amplitudes& amps, const std::vector<int>& dims, int party,
                          const Amplitudes& vec) {
  std::size_t left = 1, right = 1;
  for (int i = 0; i < party; ++i) left *= dims[i];
  for (std::size_t i = party + 1; i < dims.size(); ++i) right *= dims[i];
  const int d = dims[party];
  Amplitudes out(left * right, Complex{});
  for (std::size_t l = 0; l < left; ++l) {
    for (int a = 0; a < d; ++a) {
      const Complex c = std::conj(vec[a]);
      if (c == Complex{}) continue;
      const Complex* src = &amps[(l * d + a) * right];
      Complex* dst = &out[l * right];
      for (std::size_t r = 0; r < right; ++r) dst[r] += c * src[r];
    }
  }
  return out;
}

// Applies the local change of basis rows[k] -> <rows[k]| to one party.
void apply_bras(Amplitudes& amps, const std::vector<int>& dims, int party,
                const std::vector<Amplitudes>& rows) {
  std::size_t left = 1, right = 1;
  for (int i = 0; i < party; ++i) left *= dims[i];
  for (std::size_t i = party + 1; i < dims.size(); ++i) right *= dims[i];
  const int d = dims[party];
  std::vector<Complex> column(d);
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t r = 0; r < right; ++r) {
      for (int b = 0; b < d; ++b) column[b] = amps[(l * d + b) * right + r];
      for (int a = 0; a < d; ++a) {
        Complex acc{};
        for (int b = 0; b < d; ++b) acc += std::conj(rows[a][b]) * column[b];
        amps[(l * d + a) * right + r] = acc;
      }
    }
  }
}

void check_observables(const StateVector& state, const Observables& obs) {
  require(static_cast<int>(obs.size()) == state.parties(), ErrorCode::kDimensionMismatch,
          "observable count does not match party count");
  for (int i = 0; i < state.parties(); ++i) {
    require(obs[i].dim() == state.dims()[i], ErrorCode::kDimensionMismatch,
            "observable dimension does not match party " + std::to_string(i + 1));
  }
}

void check_orthonormal(const std::vector<Amplitudes>& basis, const char* name) {
  const std::size_t d = basis.size();
  require(d >= 1, ErrorCode::kInvalidArgument, std::string(name) + " basis is empty");
  for (const auto& v : basis) {
    require(v.size() == d, ErrorCode::kDimensionMismatch,
            std::string(name) + " basis vectors must have length equal to the basis size");
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const Complex ip = inner_product(basis[i], basis[j]);
      const Complex want = i == j ? Complex{1.0} : Complex{};
      require(std::abs(ip - want) < kNormTol, ErrorCode::kInvalidArgument,
              std::string(name) + " basis is not orthonormal");
    }
  }
}

}  // namespace

char setting_char(Setting s) { return s == Setting::kU ? 'U' : 'V'; }

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double vector_norm(std::span<const Complex> a) {
  double acc = 0.0;
  for (const auto& x : a) acc += std::norm(x);
  return std::sqrt(acc);
}

std::size_t total_dimension(std::span<const int> dims) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  return total;
}

StateVector::StateVector(std::vector<int> dims, Amplitudes amps)
    : dims_(std::move(dims)), amps_(std::move(amps)) {
  require(!dims_.empty(), ErrorCode::kInvalidArgument, "state needs at least one party");
  for (int d : dims_) require(d >= 1, ErrorCode::kInvalidArgument, "local dimension must be positive");
  require(amps_.size() == total_dimension(dims_), ErrorCode::kDimensionMismatch,
          "amplitude count " + std::to_string(amps_.size()) + " != product of dims " +
              std::to_string(total_dimension(dims_)));
  const double n = vector_norm(amps_);
  require(n > kNormTol, ErrorCode::kInvalidArgument, "state vector has zero norm");
  for (auto& a : amps_) a /= n;
}

StateVector StateVector::basis_state(std::vector<int> dims, std::size_t index) {
  Amplitudes amps(total_dimension(dims), Complex{});
  require(index < amps.size(), ErrorCode::kInvalidArgument, "basis index out of range");
  amps[index] = 1.0;
  return StateVector(std::move(dims), std::move(amps));
}

std::size_t StateVector::index_of(const OutcomeTuple& outcomes) const {
  require(outcomes.size() == dims_.size(), ErrorCode::kDimensionMismatch,
          "outcome tuple length does not match party count");
  std::size_t index = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    require(outcomes[i] >= 1 && outcomes[i] <= dims_[i], ErrorCode::kInvalidArgument,
            "outcome out of range for party " + std::to_string(i + 1));
    index = index * dims_[i] + static_cast<std::size_t>(outcomes[i] - 1);
  }
  return index;
}

OutcomeTuple StateVector::outcome_of(std::size_t index) const {
  OutcomeTuple out(dims_.size());
  for (std::size_t i = dims_.size(); i-- > 0;) {
    out[i] = static_cast<int>(index % dims_[i]) + 1;
    index /= dims_[i];
  }
  return out;
}

StateVector StateVector::with_canonical_phase(double tol) const {
  Amplitudes amps = amps_;
  for (const auto& a : amps) {
    if (std::abs(a) > tol) {
      const Complex phase = std::conj(a) / std::abs(a);
      for (auto& b : amps) b *= phase;
      break;
    }
  }
  return StateVector(dims_, std::move(amps));
}

ObservablePair::ObservablePair(std::vector<Amplitudes> u_basis, std::vector<Amplitudes> v_basis)
    : u_(std::move(u_basis)), v_(std::move(v_basis)) {
  check_orthonormal(u_, "u");
  check_orthonormal(v_, "v");
  require(u_.size() == v_.size(), ErrorCode::kDimensionMismatch,
          "u and v bases have different dimensions");
  // A shared eigenvector makes the Hardy conditions unsatisfiable.
  for (const auto& a : u_) {
    for (const auto& b : v_) {
      require(std::abs(std::abs(inner_product(a, b)) - 1.0) > kDefaultTol,
              ErrorCode::kDegenerateObservables, "u and v share an eigenvector");
    }
  }
}

ObservablePair ObservablePair::qubit(Complex alpha, Complex beta) {
  const double a = std::abs(alpha), b = std::abs(beta);
  require(std::abs(a * a + b * b - 1.0) < kDefaultTol, ErrorCode::kInvalidArgument,
          "|alpha|^2 + |beta|^2 must equal 1");
  require(a > kDefaultTol && b > kDefaultTol && a < 1.0 - kDefaultTol && b < 1.0 - kDefaultTol,
          ErrorCode::kDegenerateObservables,
          "u and v commute: need 0 < |alpha|, |beta| < 1");
  const double s = std::sqrt(a * a + b * b);
  alpha /= s;
  beta /= s;
  std::vector<Amplitudes> v = {{1.0, 0.0}, {0.0, 1.0}};
  std::vector<Amplitudes> u = {{alpha, beta}, {std::conj(beta), -std::conj(alpha)}};
  ObservablePair pair(std::move(u), std::move(v));
  pair.alpha_ = alpha;
  pair.beta_ = beta;
  return pair;
}

ObservablePair ObservablePair::pauli_z_minus_x() {
  const double h = 1.0 / std::sqrt(2.0);
  std::vector<Amplitudes> u = {{1.0, 0.0}, {0.0, 1.0}};
  std::vector<Amplitudes> v = {{h, -h}, {h, h}};
  ObservablePair pair(std::move(u), std::move(v));
  // |0> = (|-> + |+>)/sqrt2, so this is the qubit family at alpha = beta.
  pair.alpha_ = h;
  pair.beta_ = h;
  return pair;
}

ObservablePair ObservablePair::computational_fourier(int d) {
  require(d >= 2, ErrorCode::kInvalidArgument, "dimension must be >= 2");
  std::vector<Amplitudes> u(d, Amplitudes(d)), v(d, Amplitudes(d));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    u[k][k] = 1.0;
    for (int j = 0; j < d; ++j) v[k][j] = std::polar(scale, 2.0 * M_PI * j * k / d);
  }
  return ObservablePair(std::move(u), std::move(v));
}

const Amplitudes& ObservablePair::eigenvector(Setting s, int outcome) const {
  const auto& b = basis(s);
  require(outcome >= 1 && outcome <= static_cast<int>(b.size()), ErrorCode::kInvalidArgument,
          "outcome " + std::to_string(outcome) + " out of range");
  return b[outcome - 1];
}

StateVector tensor_product(std::span<const Amplitudes> locals) {
  require(!locals.empty(), ErrorCode::kInvalidArgument, "tensor product of nothing");
  std::vector<int> dims;
  Amplitudes amps{1.0};
  for (const auto& local : locals) {
    require(!local.empty(), ErrorCode::kInvalidArgument, "dimension-zero local vector");
    dims.push_back(static_cast<int>(local.size()));
    Amplitudes next;
    next.reserve(amps.size() * local.size());
    for (const auto& a : amps)
      for (const auto& b : local) next.push_back(a * b);
    amps = std::move(next);
  }
  return StateVector(std::move(dims), std::move(amps));
}

Amplitudes context_amplitudes(const StateVector& state, const Observables& obs,
                              const SettingTuple& settings) {
  check_observables(state, obs);
  require(static_cast<int>(settings.size()) == state.parties(), ErrorCode::kDimensionMismatch,
          "setting tuple length does not match party count");
  Amplitudes amps = state.amplitude_vector();
  for (int p = 0; p < state.parties(); ++p) apply_bras(amps, state.dims(), p, obs[p].basis(settings[p]));
  return amps;
}

std::vector<double> context_distribution(const StateVector& state, const Observables& obs,
                                         const SettingTuple& settings) {
  const Amplitudes amps = context_amplitudes(state, obs, settings);
  std::vector<double> probs(amps.size());
  std::transform(amps.begin(), amps.end(), probs.begin(), [](Complex a) { return std::norm(a); });
  return probs;
}

double born_probability(const StateVector& state, const Observables& obs,
                        const SettingTuple& settings, const OutcomeTuple& outcomes) {
  check_observables(state, obs);
  require(static_cast<int>(settings.size()) == state.parties(), ErrorCode::kDimensionMismatch,
          "setting tuple length does not match party count");
  state.index_of(outcomes);  // range check
  Amplitudes amps = state.amplitude_vector();
  std::vector<int> dims = state.dims();
  for (int p = state.parties() - 1; p >= 0; --p) {
    amps = contract_party(amps, dims, p, obs[p].eigenvector(settings[p], outcomes[p]));
    dims.erase(dims.begin() + p);
  }
  return std::norm(amps[0]);
}

double marginal_probability(const StateVector& state, const Observables& obs,
                            const PartialEvent& event) {
  check_observables(state, obs);
  require(static_cast<int>(event.size()) == state.parties(), ErrorCode::kDimensionMismatch,
          "event length does not match party count");
  require(std::any_of(event.begin(), event.end(), [](const auto& e) { return e.has_value(); }),
          ErrorCode::kInvalidArgument, "marginal over an empty party subset");
  Amplitudes amps = state.amplitude_vector();
  std::vector<int> dims = state.dims();
  for (int p = state.parties() - 1; p >= 0; --p) {
    if (!event[p]) continue;
    amps = contract_party(amps, dims, p, obs[p].eigenvector(event[p]->setting, event[p]->outcome));
    dims.erase(dims.begin() + p);
  }
  double acc = 0.0;
  for (const auto& a : amps) acc += std::norm(a);
  return acc;
}

GramSchmidtResult gram_schmidt(std::span<const Amplitudes> vectors, double tol) {
  GramSchmidtResult result;
  if (vectors.empty()) return result;
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    require(v.size() == dim, ErrorCode::kDimensionMismatch, "gram_schmidt inputs differ in dimension");
    Amplitudes w = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : result.basis) {
        const Complex c = inner_product(b, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= c * b[i];
      }
    }
    const double n = vector_norm(w);
    if (n < tol) continue;
    for (auto& x : w) x /= n;
    result.basis.push_back(std::move(w));
  }
  result.rank = result.basis.size();
  return result;
}

std::vector<Amplitudes> orthogonal_complement(std::span<const Amplitudes> vectors, double tol) {
  if (vectors.empty()) return {};
  const std::size_t dim = vectors.front().size();
  const GramSchmidtResult gs = gram_schmidt(vectors, tol);
  const std::size_t rank = gs.rank;
  std::vector<Amplitudes> complement;
  if (rank == dim) return complement;
  Eigen::MatrixXcd q;
  if (rank == 0) {
    q = Eigen::MatrixXcd::Identity(dim, dim);
  } else {
    Eigen::MatrixXcd b(dim, rank);
    for (std::size_t j = 0; j < rank; ++j)
      for (std::size_t i = 0; i < dim; ++i) b(i, j) = gs.basis[j][i];
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(b);
    q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
  }
  for (std::size_t j = rank; j < dim; ++j) {
    Amplitudes v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = q(i, j);
    complement.push_back(std::move(v));
  }
  return complement;
}

void validate_cut(const Bipartition& cut, int parties) {
  std::vector<int> sorted = cut.parties;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          ErrorCode::kInvalidArgument, "cut lists a party twice");
  require(!sorted.empty() && static_cast<int>(sorted.size()) <= parties - 1,
          ErrorCode::kInvalidArgument, "cut must be a non-empty proper subset");
  require(sorted.front() >= 0 && sorted.back() < parties, ErrorCode::kInvalidArgument,
          "cut party index out of range");
}

std::vector<double> schmidt_coefficients(const StateVector& state, const Bipartition& cut) {
  const int n = state.parties();
  validate_cut(cut, n);
  std::vector<bool> side(n, false);
  for (int p : cut.parties) side[p] = true;
  const auto& dims = state.dims();
  std::size_t rows = 1, cols = 1;
  for (int p = 0; p < n; ++p) (side[p] ? rows : cols) *= dims[p];
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const OutcomeTuple o = state.outcome_of(i);
    std::size_t r = 0, c = 0;
    for (int p = 0; p < n; ++p) {
      if (side[p]) r = r * dims[p] + (o[p] - 1);
      else c = c * dims[p] + (o[p] - 1);
    }
    m(r, c) = state.amp(i);
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

int schmidt_rank(const StateVector& state, const Bipartition& cut, double tol) {
  const auto sv = schmidt_coefficients(state, cut);
  return static_cast<int>(std::count_if(sv.begin(), sv.end(), [tol](double s) { return s > tol; }));
}

OutcomeSampler::OutcomeSampler(std::vector<double> distribution) : cdf_(std::move(distribution)) {
  require(!cdf_.empty(), ErrorCode::kInvalidArgument, "empty distribution");
  // Forbidden events come out of the Born rule as ~1e-33 rounding residue.
  for (auto& p : cdf_) {
    if (p < kProbabilityFloor) p = 0.0;
  }
  std::partial_sum(cdf_.begin(), cdf_.end(), cdf_.begin());
  const double total = cdf_.back();
  require(total > 0.0, ErrorCode::kInvalidArgument, "distribution has zero mass");
  for (auto& c : cdf_) c /= total;
}

std::size_t OutcomeSampler::sample(Rng& rng) const {
  const double x = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  if (i >= cdf_.size()) i = cdf_.size() - 1;
  return i;
}

OutcomeTuple sample_outcome(const StateVector& state, const Observables& obs,
                            const SettingTuple& settings, Rng& rng) {
  OutcomeSampler sampler(context_distribution(state, obs, settings));
  return state.outcome_of(sampler.sample(rng));
}

}  // namespace hardyveto
