#include <doctest.h>

#include <cmath>
#include <set>

#include "hardyveto/error.hpp"
#include "hardyveto/hardy_builder.hpp"
#include "hardyveto/serialization.hpp"
#include "hardyveto/veto_protocol.hpp"

using namespace hardyveto;

namespace {

ProtocolParams params_for(int n, std::uint64_t rounds, std::uint64_t seed) {
  ProtocolParams p;
  p.n = n;
  p.rounds = rounds;
  p.seed = seed;
  return p;
}

std::vector<RoundRecord> generate(const ProtocolParams& p, const std::string& votes, const StateVector& state) {
  Rng rng = Rng::derive(p.seed, 77);
  const auto kinds = designate_rounds(p.rounds, p.p_test, rng);
  return run_rounds(p, parse_votes(votes), MeasurementSource(state), kinds);
}

PartyLedger ledger_of(std::uint64_t plus, std::uint64_t minus) {
  PartyLedger l;
  for (std::uint64_t i = 0; i < plus + minus; ++i) l.retained.push_back({i, i < plus ? +1 : -1});
  return l;
}

bool within_sigma(double observed, double expected, double sigma, double k) { return std::abs(observed - expected) <= k * sigma; }

}  // namespace

TEST_CASE("votes and names") {
  CHECK(format_votes(parse_votes("FvF")) == "FVF");
  CHECK_THROWS_AS(parse_votes("FXF"), Error);
  CHECK(expected_verdict(parse_votes("FFF")) == Verdict::kApprovedUnanimousFavor);
  CHECK(expected_verdict(parse_votes("FVV")) == Verdict::kVetoedMixed);
  CHECK(expected_verdict(parse_votes("VVV")) == Verdict::kVetoedAllAgainst);
  CHECK(std::string(verdict_name(Verdict::kVetoedMixed)) == "VETOED_MIXED");
  CHECK(parse_ratio_mode("PAPER_STATED") == RatioMode::kPaperStated);
  CHECK_THROWS_AS(parse_ratio_mode("x"), Error);
}

TEST_CASE("parameter validation") {
  ProtocolParams p;
  CHECK_NOTHROW(p.validate());
  p.n = 1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ProtocolParams{};
  p.p_test = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ProtocolParams{};
  p.noise = -0.1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ProtocolParams{};
  CHECK_THROWS_AS(simulate(p, parse_votes("FF")), Error);
}

TEST_CASE("round designation") {
  Rng rng(1);
  const auto none = designate_rounds(1000, 0.0, rng);
  CHECK(std::count(none.begin(), none.end(), RoundKind::kVote) == 1000);
  const auto quarter = designate_rounds(100000, 0.25, rng);
  const double tests = static_cast<double>(std::count(quarter.begin(), quarter.end(), RoundKind::kTest));
  CHECK(within_sigma(tests, 25000, std::sqrt(100000 * 0.25 * 0.75), 5));
}

TEST_CASE("run_rounds statistics and forbidden events") {
  ProtocolParams p = params_for(3, 448000, 5);
  p.p_test = 0.0;
  const auto fff = generate(p, "FFF", build_veto_state(3));
  std::uint64_t plus = 0;
  for (const auto& r : fff) plus += r.minus_mask == 0;
  const double q = 1.0 / 56;
  CHECK(within_sigma(static_cast<double>(plus), 448000 * q, std::sqrt(448000 * q * (1 - q)), 5));

  p.rounds = 200000;
  for (const char* votes : {"FFV", "FVF", "VFF", "FVV", "VFV", "VVF"}) {
    const auto rounds = generate(p, votes, build_veto_state(3));
    std::uint64_t bad = 0;
    for (const auto& r : rounds) {
      const std::uint32_t plus_mask = ~r.minus_mask & 7u;
      // a V-chooser at +1 together with a U-chooser at +1
      if ((plus_mask & r.settings) && (plus_mask & ~r.settings & 7u)) ++bad;
    }
    CHECK(bad == 0);
  }

  ProtocolParams p2 = params_for(2, 200000, 6);
  p2.p_test = 0.0;
  const auto vv = generate(p2, "VV", build_veto_state(2));
  std::uint64_t all_minus = 0;
  for (const auto& r : vv) all_minus += r.minus_mask == 3u;
  CHECK(all_minus == 0);
}

TEST_CASE("run_rounds is reproducible per seed") {
  ProtocolParams p = params_for(3, 150000, 9);
  const auto a = generate(p, "FVF", build_veto_state(3));
  const auto b = generate(p, "FVF", build_veto_state(3));
  REQUIRE(a.size() == b.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    same = same && a[i].settings == b[i].settings && a[i].minus_mask == b[i].minus_mask && a[i].kind == b[i].kind;
  CHECK(same);
  p.seed = 10;
  const auto c = generate(p, "FVF", build_veto_state(3));
  bool differs = false;
  for (std::size_t i = 0; i < a.size() && !differs; ++i) differs = a[i].minus_mask != c[i].minus_mask;
  CHECK(differs);
  CHECK_THROWS_AS(generate(p, "FV", build_veto_state(3)), Error);
}

TEST_CASE("depolarizing noise") {
  const MeasurementSource src(build_veto_state(3));
  const auto& d = src.distribution(0);
  const auto same = depolarize(d, 3, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(same[i] == doctest::Approx(d[i]));
  const auto flat = depolarize(d, 3, 1.0);
  for (double x : flat) CHECK(x == doctest::Approx(0.125));
  const auto mid = depolarize(d, 3, 0.3);
  double total = 0.0;
  for (double x : mid) total += x;
  CHECK(total == doctest::Approx(1.0));

  // Sampled noisy test rounds follow the analytic mixture.
  ProtocolParams p = params_for(3, 400000, 2);
  p.p_test = 0.0;
  p.noise = 0.3;
  const auto rounds = generate(p, "FFF", build_veto_state(3));
  std::vector<double> freq(8, 0.0);
  for (const auto& r : rounds) freq[r.minus_mask] += 1.0 / 400000;
  for (int i = 0; i < 8; ++i) CHECK(within_sigma(freq[i], mid[i], std::sqrt(mid[i] / 400000), 5));
}

TEST_CASE("test-round check") {
  ProtocolParams p = params_for(3, 200000, 3);
  const auto honest = test_round_check(generate(p, "FVF", build_veto_state(3)), 3, 0.01);
  CHECK(honest.pass);
  CHECK(honest.conditions.size() == 1 + 6 + 1);
  for (const auto& c : honest.conditions)
    if (c.must_vanish) CHECK(c.events == 0);

  p.noise = 0.2;
  CHECK_FALSE(test_round_check(generate(p, "FVF", build_veto_state(3)), 3, 0.01).pass);

  p.noise = 0.0;
  const auto product = test_round_check(generate(p, "FFF", StateVector::basis_state({2, 2, 2}, 0)), 3, 0.01);
  CHECK_FALSE(product.pass);
  CHECK(product.conditions.back().frequency == doctest::Approx(0.125).epsilon(0.1));

  p.rounds = 20000;
  try {
    test_round_check(generate(p, "FFF", build_veto_state(3)), 3, 0.01);
    FAIL("expected InsufficientTestData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientTestData);
  }
}

TEST_CASE("target ratios") {
  CHECK(target_ratio(2, RatioMode::kPaperStated).text() == "1:2");
  CHECK(target_ratio(2, RatioMode::kBornDerived).text() == "1:5");
  CHECK(target_ratio(3, RatioMode::kBornDerived).text() == "1:13");
  CHECK(target_ratio(3, RatioMode::kPaperStated).text() == "1:6");
  for (int n = 2; n <= 6; ++n)
    CHECK(target_ratio(n, RatioMode::kBornDerived).minus == doctest::Approx(std::ldexp(1.0, n + 1) - 3).epsilon(1e-12));
  CHECK_THROWS_AS(target_ratio(1, RatioMode::kBornDerived), Error);
}

TEST_CASE("privacy sift") {
  const TargetRatio born3 = target_ratio(3, RatioMode::kBornDerived);
  CHECK(sift_keep_probability(4000, 3000, born3) == doctest::Approx(3.0 / 52).epsilon(1e-12));
  CHECK(sift_keep_probability(0, 10, born3) == 1.0);
  CHECK_THROWS_AS(sift_keep_probability(10, 10, TargetRatio{1.0, 0.0}), Error);
  CHECK_THROWS_AS(sift_keep_probability(1, 1000, born3), Error);

  Rng rng(12);
  const PartyLedger raw = ledger_of(40000, 30000);
  const PartyLedger same = privacy_sift(raw, Vote::kFavor, born3, rng);
  CHECK(same.retained.size() == raw.retained.size());
  const PartyLedger sifted = privacy_sift(raw, Vote::kVeto, born3, rng);
  std::uint64_t plus = 0, minus = 0;
  for (const auto& e : sifted.retained) (e.sign > 0 ? plus : minus) += 1;
  CHECK(minus == 30000);
  const double keep = 3.0 / 52;
  CHECK(within_sigma(static_cast<double>(plus), 40000 * keep, std::sqrt(40000 * keep * (1 - keep)), 5));
  CHECK(std::is_sorted(sifted.retained.begin(), sifted.retained.end(),
                       [](const LedgerEntry& a, const LedgerEntry& b) { return a.timing < b.timing; }));
}

TEST_CASE("vetoer retention and default list length") {
  CHECK(vetoer_retention(3, RatioMode::kBornDerived) == doctest::Approx(6.0 / 13).epsilon(1e-12));
  CHECK(vetoer_retention(2, RatioMode::kBornDerived) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(vetoer_retention(3, RatioMode::kBornDerived, false) == 1.0);
  ProtocolParams p;
  CHECK(default_list_length(p, 1000000) == 400000);
  p.n = 2;
  CHECK(default_list_length(p, 1000000) == 380000);
}

TEST_CASE("uniform reduction") {
  Rng rng(13);
  const PartyLedger small = ledger_of(50, 50);
  const auto same = uniform_reduce(small, 100, rng);
  CHECK(same.submitted.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) CHECK(same.submitted[i] == i);

  const PartyLedger big = ledger_of(50000, 50000);
  const auto cut = uniform_reduce(big, 10000, rng);
  CHECK(cut.submitted.size() == 10000);
  CHECK(cut.retained.size() == 10000);
  CHECK(std::is_sorted(cut.submitted.begin(), cut.submitted.end()));
  CHECK(std::set<std::uint64_t>(cut.submitted.begin(), cut.submitted.end()).size() == 10000);

  std::vector<int> hits(10, 0);
  const PartyLedger ten = ledger_of(5, 5);
  const int trials = 30000;
  for (int t = 0; t < trials; ++t)
    for (auto x : uniform_reduce(ten, 3, rng).submitted) ++hits[x];
  for (int h : hits) CHECK(within_sigma(h, trials * 0.3, std::sqrt(trials * 0.3 * 0.7), 5));

  try {
    uniform_reduce(small, 101, rng);
    FAIL("expected ListTooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kListTooShort);
  }
}

TEST_CASE("referee intersection, collection and verdict") {
  const std::vector<std::uint64_t> a{1, 3, 5, 7};
  auto same = referee_intersect({a, a, a}, 0.0);
  CHECK(same.common == a);
  CHECK_FALSE(same.small);
  auto none = referee_intersect({a, {2, 4}}, 0.1);
  CHECK(none.common.empty());
  CHECK(none.small);
  CHECK(referee_intersect({a, {7, 1, 2}}, 0.0).common == std::vector<std::uint64_t>{1, 7});

  Rng rng(2);
  std::vector<PartyLedger> parties(3);
  for (int p = 0; p < 3; ++p) {
    parties[p].member = p;
    for (std::uint64_t t : a) parties[p].retained.push_back({t, (t + p) % 3 == 0 ? -1 : +1});
  }
  const auto empty = referee_collect({}, parties, rng);
  CHECK(empty.rows() == 0);
  CHECK_THROWS_AS(referee_verdict(empty, 3, 3), Error);
  const auto m = referee_collect(a, parties, rng);
  REQUIRE(m.rows() == 4);
  CHECK(m.query_order.size() == 12);
  std::set<std::pair<std::uint32_t, std::uint16_t>> seen;
  for (const auto& q : m.query_order) seen.insert({q.row, q.member});
  CHECK(seen.size() == 12);
  for (std::size_t r = 0; r < 4; ++r)
    for (int p = 0; p < 3; ++p) CHECK(m.at(r, p) == *parties[p].answer(a[r]));
  CHECK_THROWS_AS(referee_collect({2}, parties, rng), Error);

  OutcomeMatrix mat;
  mat.n = 2;
  auto add = [&](int x, int y) {
    mat.timings.push_back(mat.timings.size());
    mat.entries.push_back(static_cast<std::int8_t>(x));
    mat.entries.push_back(static_cast<std::int8_t>(y));
  };
  for (int i = 0; i < 3; ++i) add(+1, +1);
  for (int i = 0; i < 2; ++i) add(-1, -1);
  add(+1, -1);
  auto v = referee_verdict(mat, 3, 3);
  CHECK(v.count_plus == 3);
  CHECK(v.count_minus == 2);
  CHECK(v.verdict == Verdict::kVetoedAllAgainst);
  CHECK(referee_verdict(mat, 4, 1).verdict == Verdict::kVetoedMixed);
  CHECK(referee_verdict(mat, 3, 2).verdict == Verdict::kApprovedUnanimousFavor);
}

TEST_CASE("threshold rule") {
  const auto zero = threshold_rule(3, 0.0, 100000);
  CHECK(zero.tau_plus == 3);
  CHECK(zero.tau_minus == 3);
  const auto noisy = threshold_rule(3, 0.1, 100000);
  const auto d = depolarize(MeasurementSource(build_veto_state(3)).distribution(0), 3, 0.1);
  CHECK(noisy.tau_plus == static_cast<std::uint64_t>(std::ceil(0.5 * 100000 * d.front())));
  CHECK(noisy.tau_minus == static_cast<std::uint64_t>(std::ceil(0.5 * 100000 * d.back())));
  CHECK(threshold_rule(3, 0.1, 10).tau_plus == 3);
}

TEST_CASE("end-to-end verdicts") {
  const ProtocolParams p = params_for(3, 1000000, 42);
  for (const char* votes : {"FFF", "FVF", "VVV", "VFF", "FVV"}) {
    const auto r = simulate(p, parse_votes(votes));
    CHECK_FALSE(r.aborted);
    CHECK(r.test_status == TestStatus::kPass);
    REQUIRE(r.transcript.has_value());
    CHECK(r.transcript->result.verdict == expected_verdict(parse_votes(votes)));
    CHECK(r.warnings.empty());
    for (auto len : r.privacy.list_lengths) CHECK(len == r.list_length);
    if (std::string(votes) == "FVF") CHECK(r.transcript->result.count_plus == 0);
    if (std::string(votes) == "VVV") CHECK(r.transcript->result.count_minus == 0);
    if (std::string(votes) == "FFF") {
      const double f = 0.4;
      const double expected = static_cast<double>(r.vote_rounds) * f * f * f;
      CHECK(within_sigma(static_cast<double>(r.transcript->common.size()), expected, std::sqrt(expected), 5));
    }
  }
}

TEST_CASE("two-member juries") {
  const ProtocolParams p = params_for(2, 400000, 8);
  for (const char* votes : {"FF", "FV", "VF", "VV"}) {
    const auto r = simulate(p, parse_votes(votes));
    REQUIRE(r.transcript.has_value());
    CHECK(r.transcript->result.verdict == expected_verdict(parse_votes(votes)));
  }
}

TEST_CASE("simulation is deterministic and noise aborts") {
  ProtocolParams p = params_for(3, 200000, 314);
  const auto a = simulation_to_json(simulate(p, parse_votes("VFV"))).dump();
  const auto b = simulation_to_json(simulate(p, parse_votes("VFV"))).dump();
  CHECK(a == b);
  p.noise = 0.3;
  const auto noisy = simulate(p, parse_votes("FVF"));
  CHECK(noisy.aborted);
  CHECK(noisy.test_status == TestStatus::kFail);
  CHECK_FALSE(noisy.transcript.has_value());

  // Too few test rounds: the check is inconclusive and the run proceeds.
  ProtocolParams thin = params_for(3, 200000, 1);
  thin.p_test = 0.01;
  const auto r = simulate(thin, parse_votes("FFF"));
  CHECK(r.test_status == TestStatus::kInconclusive);
  CHECK_FALSE(r.aborted);
  CHECK_FALSE(r.warnings.empty());
}
