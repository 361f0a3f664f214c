#include "hardyveto/veto_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "hardyveto/error.hpp"
#include "hardyveto/hardy_builder.hpp"

namespace hardyveto {

namespace {

constexpr std::uint64_t kDesignationStream = 1;
constexpr std::uint64_t kRefereeStream = 2;
constexpr std::uint64_t kSiftStream = 1'000;
constexpr std::uint64_t kReduceStream = 2'000;
constexpr std::uint64_t kRoundStream = 1'000'000;
constexpr std::uint64_t kChunkRounds = 1 << 16;

double veto_q(int n) {
  const double dim = std::ldexp(1.0, n);
  return 1.0 / (dim * (dim - 1.0));
}

std::uint32_t all_bits(int n) { return (std::uint32_t{1} << n) - 1; }

std::uint32_t bit_of(int party, int n) { return std::uint32_t{1} << (n - 1 - party); }

}  // namespace

VoteVector parse_votes(const std::string& text) {
  VoteVector votes;
  for (char c : text) {
    switch (c) {
      case 'F': case 'f': votes.push_back(Vote::kFavor); break;
      case 'V': case 'v': votes.push_back(Vote::kVeto); break;
      default: throw Error(ErrorCode::kInvalidArgument, std::string("vote must be F or V, got '") + c + "'");
    }
  }
  return votes;
}

std::string format_votes(const VoteVector& votes) {
  std::string s;
  for (Vote v : votes) s.push_back(v == Vote::kFavor ? 'F' : 'V');
  return s;
}

const char* ratio_mode_name(RatioMode mode) {
  return mode == RatioMode::kBornDerived ? "born" : "paper";
}

RatioMode parse_ratio_mode(const std::string& name) {
  if (name == "born" || name == "BORN_DERIVED") return RatioMode::kBornDerived;
  if (name == "paper" || name == "PAPER_STATED") return RatioMode::kPaperStated;
  throw Error(ErrorCode::kInvalidArgument, "unknown ratio mode '" + name + "'");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kApprovedUnanimousFavor: return "APPROVED_UNANIMOUS_FAVOR";
    case Verdict::kVetoedMixed: return "VETOED_MIXED";
    case Verdict::kVetoedAllAgainst: return "VETOED_ALL_AGAINST";
  }
  return "?";
}

const char* test_status_name(TestStatus s) {
  switch (s) {
    case TestStatus::kPass: return "PASS";
    case TestStatus::kFail: return "FAIL";
    case TestStatus::kInconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

Verdict expected_verdict(const VoteVector& votes) {
  const auto vetoes = std::count(votes.begin(), votes.end(), Vote::kVeto);
  if (vetoes == 0) return Verdict::kApprovedUnanimousFavor;
  if (vetoes == static_cast<std::ptrdiff_t>(votes.size())) return Verdict::kVetoedAllAgainst;
  return Verdict::kVetoedMixed;
}

void ProtocolParams::validate() const {
  if (n < 2 || n > kMaxProtocolParties)
    throw Error(ErrorCode::kInvalidArgument, "jury size must be in [2, " + std::to_string(kMaxProtocolParties) + "]");
  if (rounds == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one round");
  if (!(p_test >= 0.0 && p_test < 1.0)) throw Error(ErrorCode::kInvalidArgument, "p_test must be in [0, 1)");
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "noise must be in [0, 1]");
  if ((tau_plus && *tau_plus < 1) || (tau_minus && *tau_minus < 1))
    throw Error(ErrorCode::kInvalidArgument, "thresholds must be >= 1");
  if (!(test_tolerance >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "test tolerance must be >= 0");
}

std::vector<RoundKind> designate_rounds(std::uint64_t rounds, double p_test, Rng& rng) {
  std::vector<RoundKind> kinds(rounds);
  for (auto& k : kinds) k = rng.bernoulli(p_test) ? RoundKind::kTest : RoundKind::kVote;
  return kinds;
}

MeasurementSource::MeasurementSource(StateVector state) : state_(std::move(state)) {
  const int n = state_.parties();
  for (int d : state_.dims())
    if (d != 2) throw Error(ErrorCode::kInvalidArgument, "protocol source must be a qubit state");
  if (n > kMaxProtocolParties) throw Error(ErrorCode::kTooLarge, "too many parties for the protocol source");
  const Observables obs(n, ObservablePair::pauli_z_minus_x());
  for (std::uint32_t ctx = 0; ctx <= all_bits(n); ++ctx) {
    SettingTuple s(n);
    for (int p = 0; p < n; ++p) s[p] = ctx & bit_of(p, n) ? Setting::kV : Setting::kU;
    distributions_.push_back(context_distribution(state_, obs, s));
    samplers_.emplace_back(distributions_.back());
  }
}

std::uint32_t settings_mask(const VoteVector& votes) {
  const int n = static_cast<int>(votes.size());
  std::uint32_t mask = 0;
  for (int p = 0; p < n; ++p)
    if (votes[p] == Vote::kVeto) mask |= bit_of(p, n);
  return mask;
}

std::vector<double> depolarize(const std::vector<double>& dist, int n, double noise) {
  std::vector<double> out = dist;
  for (int p = 0; p < n; ++p) {
    const std::uint32_t bit = bit_of(p, n);
    std::vector<double> next(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      next[i] += (1.0 - noise / 2.0) * out[i];
      next[i ^ bit] += (noise / 2.0) * out[i];
    }
    out = std::move(next);
  }
  return out;
}

std::vector<RoundRecord> run_rounds(const ProtocolParams& params, const VoteVector& votes,
                                    const MeasurementSource& source,
                                    const std::vector<RoundKind>& kinds) {
  const int n = params.n;
  if (static_cast<int>(votes.size()) != n || source.parties() != n)
    throw Error(ErrorCode::kDimensionMismatch, "votes, source and jury size disagree");
  const std::uint32_t vote_settings = settings_mask(votes);
  const std::uint64_t total = kinds.size();
  std::vector<RoundRecord> out(total);
  const std::uint64_t chunks = (total + kChunkRounds - 1) / kChunkRounds;

  auto fill_chunk = [&](std::uint64_t chunk) {
    Rng rng = Rng::derive(params.seed, kRoundStream + chunk);
    const std::uint64_t end = std::min(total, (chunk + 1) * kChunkRounds);
    for (std::uint64_t t = chunk * kChunkRounds; t < end; ++t) {
      RoundRecord& r = out[t];
      r.timing = t;
      r.kind = kinds[t];
      r.settings = r.kind == RoundKind::kVote ? vote_settings
                                              : static_cast<std::uint32_t>(rng.next() >> (64 - n));
      std::uint32_t minus = static_cast<std::uint32_t>(source.sampler(r.settings).sample(rng));
      if (params.noise > 0.0) {
        for (int p = 0; p < n; ++p) {
          if (rng.bernoulli(params.noise)) {
            const std::uint32_t bit = bit_of(p, n);
            minus = rng.bernoulli(0.5) ? (minus | bit) : (minus & ~bit);
          }
        }
      }
      r.minus_mask = minus;
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                          static_cast<unsigned>(chunks)));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) fill_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) fill_chunk(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

TestCheckReport test_round_check(const std::vector<RoundRecord>& rounds, int n, double tol,
                                 std::uint64_t min_per_context) {
  const std::uint32_t contexts = all_bits(n) + 1;
  std::vector<std::uint64_t> per_context(contexts, 0);
  // counts[ctx][outcome mask]
  std::vector<std::vector<std::uint64_t>> counts(contexts, std::vector<std::uint64_t>(contexts, 0));
  TestCheckReport report;
  for (const auto& r : rounds) {
    if (r.kind != RoundKind::kTest) continue;
    ++report.test_rounds;
    ++per_context[r.settings];
    ++counts[r.settings][r.minus_mask];
  }
  for (std::uint32_t c = 0; c < contexts; ++c) {
    if (per_context[c] < min_per_context)
      throw Error(ErrorCode::kInsufficientTestData,
                  "context " + std::to_string(c) + " has " + std::to_string(per_context[c]) +
                      " test rounds, need " + std::to_string(min_per_context));
  }

  const MeasurementSource ideal(build_veto_state(n));
  bool pass = true;

  {
    ConditionEstimate q;
    q.label = "CT1: all u=+1";
    q.must_vanish = false;
    q.trials = per_context[0];
    q.events = counts[0][0];
    q.frequency = static_cast<double>(q.events) / static_cast<double>(q.trials);
    q.expected = ideal.distribution(0)[0];
    const double sigma = std::sqrt(q.expected * (1.0 - q.expected) / static_cast<double>(q.trials));
    q.pass = std::abs(q.frequency - q.expected) <= 5.0 * sigma;
    pass = pass && q.pass;
    report.conditions.push_back(q);
  }
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      if (r == s) continue;
      ConditionEstimate e;
      e.label = "CT2: v" + std::to_string(r + 1) + "=+1,u" + std::to_string(s + 1) + "=+1";
      const std::uint32_t rb = bit_of(r, n), sb = bit_of(s, n);
      for (std::uint32_t c = 0; c < contexts; ++c) {
        if (!(c & rb) || (c & sb)) continue;
        e.trials += per_context[c];
        for (std::uint32_t o = 0; o < contexts; ++o) {
          if (!(o & rb) && !(o & sb)) {
            e.events += counts[c][o];
            e.expected += ideal.distribution(c)[o] * static_cast<double>(per_context[c]);
          }
        }
      }
      e.expected /= static_cast<double>(e.trials);
      e.frequency = static_cast<double>(e.events) / static_cast<double>(e.trials);
      e.pass = e.frequency <= tol;
      pass = pass && e.pass;
      report.conditions.push_back(e);
    }
  }
  {
    ConditionEstimate court;
    court.label = "COURT: all v=-1";
    const std::uint32_t all_v = all_bits(n);
    court.trials = per_context[all_v];
    court.events = counts[all_v][all_v];
    court.frequency = static_cast<double>(court.events) / static_cast<double>(court.trials);
    court.expected = ideal.distribution(all_v)[all_v];
    court.pass = court.frequency <= tol;
    pass = pass && court.pass;
    report.conditions.push_back(court);
  }
  report.pass = pass;
  return report;
}

std::string TargetRatio::text() const {
  std::ostringstream os;
  auto put = [&](double x) {
    if (std::abs(x - std::round(x)) < 1e-9) os << static_cast<long long>(std::llround(x));
    else os << x;
  };
  put(plus);
  os << ':';
  put(minus);
  return os.str();
}

TargetRatio target_ratio(int n, RatioMode mode) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "target ratio needs N >= 2");
  if (mode == RatioMode::kPaperStated) return TargetRatio{1.0, std::ldexp(1.0, n) - 2.0};
  const StateVector state = build_veto_state(n);
  const Observables obs(n, ObservablePair::pauli_z_minus_x());
  PartialEvent ev(n);
  ev[0] = LocalEvent{Setting::kU, 1};
  const double p_plus = marginal_probability(state, obs, ev);
  ev[0] = LocalEvent{Setting::kU, 2};
  const double p_minus = marginal_probability(state, obs, ev);
  return TargetRatio{1.0, p_minus / p_plus};
}

std::optional<int> PartyLedger::answer(std::uint64_t timing) const {
  auto it = std::lower_bound(retained.begin(), retained.end(), timing,
                             [](const LedgerEntry& e, std::uint64_t t) { return e.timing < t; });
  if (it == retained.end() || it->timing != timing) return std::nullopt;
  return it->sign;
}

PartyLedger party_ledger(const std::vector<RoundRecord>& rounds, int member, int n) {
  PartyLedger ledger;
  ledger.member = member;
  for (const auto& r : rounds) {
    if (r.kind == RoundKind::kVote) ledger.retained.push_back({r.timing, r.sign(member, n)});
  }
  return ledger;
}

double sift_keep_probability(std::uint64_t plus_count, std::uint64_t minus_count, const TargetRatio& ratio) {
  if (!(ratio.minus > 0.0) || !(ratio.plus > 0.0))
    throw Error(ErrorCode::kRatioUnreachable, "target ratio " + ratio.text() + " cannot be reached by dropping +1 rows");
  if (plus_count == 0) return 1.0;
  const double keep = (ratio.plus / ratio.minus) * static_cast<double>(minus_count) / static_cast<double>(plus_count);
  if (keep > 1.0)
    throw Error(ErrorCode::kRatioUnreachable,
                "raw +1 fraction is already below the target " + ratio.text());
  return keep;
}

PartyLedger privacy_sift(const PartyLedger& ledger, Vote vote, const TargetRatio& ratio, Rng& rng) {
  if (vote == Vote::kFavor) return ledger;
  std::uint64_t plus = 0, minus = 0;
  for (const auto& e : ledger.retained) (e.sign > 0 ? plus : minus) += 1;
  const double keep = sift_keep_probability(plus, minus, ratio);
  PartyLedger out;
  out.member = ledger.member;
  for (const auto& e : ledger.retained) {
    if (e.sign < 0 || rng.bernoulli(keep)) out.retained.push_back(e);
  }
  return out;
}

double vetoer_retention(int n, RatioMode mode, bool sifting) {
  if (!sifting) return 1.0;
  const StateVector state = build_veto_state(n);
  const Observables obs(n, ObservablePair::pauli_z_minus_x());
  PartialEvent ev(n);
  ev[0] = LocalEvent{Setting::kV, 1};
  const double p_plus = marginal_probability(state, obs, ev);
  const double p_minus = 1.0 - p_plus;
  const TargetRatio ratio = target_ratio(n, mode);
  return p_minus + p_plus * std::min(1.0, (ratio.plus / ratio.minus) * p_minus / p_plus);
}

std::uint64_t default_list_length(const ProtocolParams& params, std::uint64_t vote_rounds) {
  const double fraction = std::min(0.4, 0.95 * vetoer_retention(params.n, params.ratio_mode, params.sifting));
  return static_cast<std::uint64_t>(fraction * static_cast<double>(vote_rounds));
}

PartyLedger uniform_reduce(const PartyLedger& ledger, std::uint64_t list_length, Rng& rng) {
  const std::uint64_t size = ledger.retained.size();
  if (size < list_length)
    throw Error(ErrorCode::kListTooShort, "member " + std::to_string(ledger.member + 1) + " has " +
                                              std::to_string(size) + " entries, need " + std::to_string(list_length));
  std::vector<std::uint64_t> idx(size);
  for (std::uint64_t i = 0; i < size; ++i) idx[i] = i;
  for (std::uint64_t i = 0; i < list_length; ++i) std::swap(idx[i], idx[i + rng.below(size - i)]);
  idx.resize(list_length);
  std::sort(idx.begin(), idx.end());
  PartyLedger out;
  out.member = ledger.member;
  out.retained.reserve(list_length);
  out.submitted.reserve(list_length);
  for (std::uint64_t i : idx) {
    out.retained.push_back(ledger.retained[i]);
    out.submitted.push_back(ledger.retained[i].timing);
  }
  return out;
}

IntersectResult referee_intersect(const std::vector<std::vector<std::uint64_t>>& submitted, double q) {
  IntersectResult result;
  if (!submitted.empty()) {
    result.common = submitted.front();
    std::sort(result.common.begin(), result.common.end());
    for (std::size_t i = 1; i < submitted.size(); ++i) {
      std::vector<std::uint64_t> other = submitted[i];
      std::sort(other.begin(), other.end());
      std::vector<std::uint64_t> next;
      std::set_intersection(result.common.begin(), result.common.end(), other.begin(), other.end(),
                            std::back_inserter(next));
      result.common = std::move(next);
    }
  }
  result.small = q > 0.0 && static_cast<double>(result.common.size()) < 10.0 / q;
  return result;
}

OutcomeMatrix referee_collect(const std::vector<std::uint64_t>& common,
                              const std::vector<PartyLedger>& parties, Rng& rng) {
  OutcomeMatrix m;
  m.n = static_cast<int>(parties.size());
  m.timings = common;
  m.entries.assign(common.size() * m.n, 0);
  m.query_order.reserve(m.entries.size());
  for (std::uint32_t row = 0; row < common.size(); ++row)
    for (int p = 0; p < m.n; ++p) m.query_order.push_back({row, static_cast<std::uint16_t>(p)});
  for (std::size_t i = m.query_order.size(); i > 1; --i) std::swap(m.query_order[i - 1], m.query_order[rng.below(i)]);
  for (const auto& q : m.query_order) {
    const auto answer = parties[q.member].answer(common[q.row]);
    if (!answer)
      throw Error(ErrorCode::kInternal, "member " + std::to_string(q.member + 1) + " has no result for a common timing");
    m.entries[static_cast<std::size_t>(q.row) * m.n + q.member] = static_cast<std::int8_t>(*answer);
  }
  return m;
}

VerdictResult referee_verdict(const OutcomeMatrix& matrix, std::uint64_t tau_plus, std::uint64_t tau_minus) {
  if (matrix.rows() == 0) throw Error(ErrorCode::kEmptyMatrix, "no common timings to decide on");
  VerdictResult v;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    int sum = 0;
    for (int p = 0; p < matrix.n; ++p) sum += matrix.at(r, p);
    if (sum == matrix.n) ++v.count_plus;
    if (sum == -matrix.n) ++v.count_minus;
  }
  if (v.count_plus < tau_plus) v.verdict = Verdict::kVetoedMixed;
  else if (v.count_minus < tau_minus) v.verdict = Verdict::kVetoedAllAgainst;
  else v.verdict = Verdict::kApprovedUnanimousFavor;
  return v;
}

Thresholds threshold_rule(int n, double noise, std::uint64_t common_rows) {
  Thresholds t;
  if (noise <= 0.0) return t;
  const MeasurementSource ideal(build_veto_state(n));
  const auto dist = depolarize(ideal.distribution(0), n, noise);
  const double rows = static_cast<double>(common_rows);
  t.tau_plus = std::max<std::uint64_t>(3, static_cast<std::uint64_t>(std::ceil(0.5 * rows * dist.front())));
  t.tau_minus = std::max<std::uint64_t>(3, static_cast<std::uint64_t>(std::ceil(0.5 * rows * dist.back())));
  return t;
}

SimulationResult simulate(const ProtocolParams& params, const VoteVector& votes, const SimulationOptions& options) {
  params.validate();
  if (static_cast<int>(votes.size()) != params.n)
    throw Error(ErrorCode::kInvalidArgument, "expected " + std::to_string(params.n) + " votes");
  const int n = params.n;
  SimulationResult result;
  result.params = params;

  const MeasurementSource source(options.source_state ? *options.source_state : build_veto_state(n));
  Rng designation = Rng::derive(params.seed, kDesignationStream);
  const auto kinds = designate_rounds(params.rounds, params.p_test, designation);
  const auto rounds = run_rounds(params, votes, source, kinds);

  try {
    result.test_report = test_round_check(rounds, n, params.test_tolerance);
    result.test_status = result.test_report->pass ? TestStatus::kPass : TestStatus::kFail;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientTestData) throw;
    result.test_status = TestStatus::kInconclusive;
    result.warnings.push_back(std::string("test rounds inconclusive: ") + e.what());
  }
  result.vote_rounds = static_cast<std::uint64_t>(std::count(kinds.begin(), kinds.end(), RoundKind::kVote));
  result.list_length = params.list_length ? *params.list_length : default_list_length(params, result.vote_rounds);
  result.privacy.target = target_ratio(n, params.ratio_mode);
  if (result.test_status == TestStatus::kFail) {
    result.aborted = true;
    return result;
  }

  std::vector<PartyLedger> ledgers;
  std::vector<std::vector<std::uint64_t>> submitted;
  for (int p = 0; p < n; ++p) {
    PartyLedger ledger = party_ledger(rounds, p, n);
    if (params.sifting) {
      Rng sift = Rng::derive(params.seed, kSiftStream + p);
      ledger = privacy_sift(ledger, votes[p], result.privacy.target, sift);
    }
    Rng reduce = Rng::derive(params.seed, kReduceStream + p);
    ledger = uniform_reduce(ledger, result.list_length, reduce);
    submitted.push_back(ledger.submitted);
    result.privacy.list_lengths.push_back(ledger.submitted.size());
    ledgers.push_back(std::move(ledger));
  }

  RefereeTranscript transcript;
  const IntersectResult common = referee_intersect(submitted, veto_q(n));
  if (common.small)
    result.warnings.push_back("common list has " + std::to_string(common.common.size()) + " rows, below 10/q");
  transcript.common = common.common;
  Rng referee = Rng::derive(params.seed, kRefereeStream);
  transcript.matrix = referee_collect(transcript.common, ledgers, referee);
  Thresholds rule = threshold_rule(n, params.noise, transcript.common.size());
  transcript.thresholds.tau_plus = params.tau_plus.value_or(rule.tau_plus);
  transcript.thresholds.tau_minus = params.tau_minus.value_or(rule.tau_minus);
  transcript.result = referee_verdict(transcript.matrix, transcript.thresholds.tau_plus, transcript.thresholds.tau_minus);

  for (int p = 0; p < n; ++p) {
    std::uint64_t plus = 0;
    for (std::size_t r = 0; r < transcript.matrix.rows(); ++r) plus += transcript.matrix.at(r, p) > 0;
    const double rows = static_cast<double>(transcript.matrix.rows());
    result.privacy.collected_plus_fraction.push_back(rows > 0 ? static_cast<double>(plus) / rows : 0.0);
  }
  result.transcript = std::move(transcript);
  return result;
}

}  // namespace hardyveto
