#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hardyveto/quantum_core.hpp"
#include "hardyveto/rng.hpp"

namespace hardyveto {

enum class Vote : std::uint8_t { kFavor, kVeto };
using VoteVector = std::vector<Vote>;

// "FVF" -> {Favor, Veto, Favor}
VoteVector parse_votes(const std::string& text);
std::string format_votes(const VoteVector& votes);

enum class RatioMode { kBornDerived, kPaperStated };
const char* ratio_mode_name(RatioMode mode);
RatioMode parse_ratio_mode(const std::string& name);

enum class Verdict { kApprovedUnanimousFavor, kVetoedMixed, kVetoedAllAgainst };
const char* verdict_name(Verdict v);

// Verdict an honest run should produce for `votes`.
Verdict expected_verdict(const VoteVector& votes);

enum class RoundKind : std::uint8_t { kTest, kVote };

struct ProtocolParams {
  int n = 3;
  std::uint64_t rounds = 1'000'000;
  double p_test = 0.1;
  std::optional<std::uint64_t> list_length;  // default: default_list_length
  std::optional<std::uint64_t> tau_plus;     // default from threshold_rule
  std::optional<std::uint64_t> tau_minus;
  double noise = 0.0;  // per-qubit probability of replacing the outcome by a fair coin
  std::uint64_t seed = 0;
  RatioMode ratio_mode = RatioMode::kBornDerived;
  double test_tolerance = 0.01;  // max frequency tolerated for a zero condition
  bool sifting = true;           // false only for audit negative controls

  void validate() const;
};

inline constexpr int kMaxProtocolParties = 10;
inline constexpr std::uint64_t kMinTestRoundsPerContext = 1000;

// Settings and outcomes are bitmasks with party 0 in the most significant
// of n bits: setting bit set = V, outcome bit set = -1.
struct RoundRecord {
  std::uint64_t timing;
  RoundKind kind;
  std::uint32_t settings;
  std::uint32_t minus_mask;

  int sign(int party, int n) const { return (minus_mask >> (n - 1 - party)) & 1u ? -1 : +1; }
};

std::vector<RoundKind> designate_rounds(std::uint64_t rounds, double p_test, Rng& rng);

// Per-context Born distributions of a state under u = sigma_z, v = -sigma_x.
class MeasurementSource {
 public:
  explicit MeasurementSource(StateVector state);

  const StateVector& state() const { return state_; }
  int parties() const { return state_.parties(); }
  const OutcomeSampler& sampler(std::uint32_t settings) const { return samplers_[settings]; }
  const std::vector<double>& distribution(std::uint32_t settings) const { return distributions_[settings]; }

 private:
  StateVector state_;
  std::vector<OutcomeSampler> samplers_;
  std::vector<std::vector<double>> distributions_;
};

std::uint32_t settings_mask(const VoteVector& votes);

// VOTE rounds use the members' vote settings; TEST rounds draw each party's
// setting uniformly. Rounds are generated in fixed-size timing ranges with
// derived seeds, so the output does not depend on the worker count.
std::vector<RoundRecord> run_rounds(const ProtocolParams& params, const VoteVector& votes,
                                    const MeasurementSource& source,
                                    const std::vector<RoundKind>& kinds);

// Distribution after each party's outcome is independently replaced by a
// fair coin with probability `noise`.
std::vector<double> depolarize(const std::vector<double>& dist, int n, double noise);

struct ConditionEstimate {
  std::string label;
  std::uint64_t events = 0;
  std::uint64_t trials = 0;
  double frequency = 0.0;
  double expected = 0.0;
  bool must_vanish = true;
  bool pass = false;
};

struct TestCheckReport {
  std::vector<ConditionEstimate> conditions;
  std::uint64_t test_rounds = 0;
  bool pass = false;
};

// Compares the announced TEST data with the ideal veto state: q must lie
// within 5 sigma of its Born value, every zero condition (generalized CT2
// for all ordered pairs, and all-V -> all -1) must have frequency <= tol.
// Throws kInsufficientTestData when a context has fewer than
// kMinTestRoundsPerContext rounds.
TestCheckReport test_round_check(const std::vector<RoundRecord>& rounds, int n, double tol,
                                 std::uint64_t min_per_context = kMinTestRoundsPerContext);

struct TargetRatio {
  double plus = 1.0;
  double minus = 1.0;

  std::string text() const;
};

TargetRatio target_ratio(int n, RatioMode mode);

struct LedgerEntry {
  std::uint64_t timing;
  int sign;
};

struct PartyLedger {
  int member = 0;
  std::vector<LedgerEntry> retained;    // sorted by timing
  std::vector<std::uint64_t> submitted;  // timings sent to the referee

  std::optional<int> answer(std::uint64_t timing) const;
};

// VOTE-round (timing, own outcome) pairs of one member.
PartyLedger party_ledger(const std::vector<RoundRecord>& rounds, int member, int n);

// Probability of keeping a +1 row so that the expected kept +1 : -1
// proportion equals `ratio`. Throws kRatioUnreachable when that would need
// a probability above one.
double sift_keep_probability(std::uint64_t plus_count, std::uint64_t minus_count, const TargetRatio& ratio);

PartyLedger privacy_sift(const PartyLedger& ledger, Vote vote, const TargetRatio& ratio, Rng& rng);

// Expected fraction of VOTE rounds a vetoer still holds after sifting at
// noise 0 (1 when sifting is off). Noise only raises it.
double vetoer_retention(int n, RatioMode mode, bool sifting = true);

// floor(min(0.4, 0.95 * vetoer_retention) * vote_rounds). The cap only bites
// at N = 2, where a vetoer keeps exactly 0.4 of its rounds.
std::uint64_t default_list_length(const ProtocolParams& params, std::uint64_t vote_rounds);

// Uniformly random L-subset, kept in timing order; the submitted list holds
// timings only. Throws kListTooShort.
PartyLedger uniform_reduce(const PartyLedger& ledger, std::uint64_t list_length, Rng& rng);

struct IntersectResult {
  std::vector<std::uint64_t> common;
  bool small = false;  // |common| < 10 / q
};

IntersectResult referee_intersect(const std::vector<std::vector<std::uint64_t>>& submitted, double q);

struct Query {
  std::uint32_t row;
  std::uint16_t member;
};

struct OutcomeMatrix {
  int n = 0;
  std::vector<std::uint64_t> timings;
  std::vector<std::int8_t> entries;  // row-major, +1 / -1
  std::vector<Query> query_order;

  std::size_t rows() const { return timings.size(); }
  int at(std::size_t row, int member) const { return entries[row * n + member]; }
};

OutcomeMatrix referee_collect(const std::vector<std::uint64_t>& common,
                              const std::vector<PartyLedger>& parties, Rng& rng);

struct VerdictResult {
  std::uint64_t count_plus = 0;
  std::uint64_t count_minus = 0;
  Verdict verdict = Verdict::kVetoedMixed;
};

// Throws kEmptyMatrix.
VerdictResult referee_verdict(const OutcomeMatrix& matrix, std::uint64_t tau_plus, std::uint64_t tau_minus);

struct Thresholds {
  std::uint64_t tau_plus = 3;
  std::uint64_t tau_minus = 3;
};

// 3 at zero noise; otherwise max(3, ceil(expected count under a unanimous
// favor vote / 2)) for each of the all-(+1) and all-(-1) counts.
Thresholds threshold_rule(int n, double noise, std::uint64_t common_rows);

struct RefereeTranscript {
  std::vector<std::uint64_t> common;
  OutcomeMatrix matrix;
  VerdictResult result;
  Thresholds thresholds;
};

struct RunPrivacy {
  std::vector<std::uint64_t> list_lengths;
  std::vector<double> collected_plus_fraction;
  TargetRatio target;
};

enum class TestStatus { kPass, kFail, kInconclusive };
const char* test_status_name(TestStatus s);

struct SimulationResult {
  ProtocolParams params;
  std::uint64_t vote_rounds = 0;
  std::uint64_t list_length = 0;
  TestStatus test_status = TestStatus::kInconclusive;
  std::optional<TestCheckReport> test_report;
  bool aborted = false;  // TEST data rejected the source
  std::optional<RefereeTranscript> transcript;
  RunPrivacy privacy;
  std::vector<std::string> warnings;
};

struct SimulationOptions {
  // Replaces the ideal veto state, e.g. to model a faulty source.
  std::optional<StateVector> source_state;
};

SimulationResult simulate(const ProtocolParams& params, const VoteVector& votes,
                          const SimulationOptions& options = {});

}  // namespace hardyveto
