#include "hardyveto/privacy_audit.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <map>

#include "hardyveto/error.hpp"

namespace hardyveto {

ChiSquareResult chi_square_homogeneity(const std::vector<std::vector<double>>& table) {
  ChiSquareResult out;
  if (table.size() < 2) return out;
  const std::size_t cats = table.front().size();
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < cats; ++c) {
    double total = 0.0;
    for (const auto& row : table) total += row[c];
    if (total > 0.0) keep.push_back(c);
  }
  std::vector<double> row_totals;
  for (const auto& row : table) {
    double t = 0.0;
    for (std::size_t c : keep) t += row[c];
    row_totals.push_back(t);
  }
  std::size_t live_rows = 0;
  double grand = 0.0;
  for (double t : row_totals) {
    live_rows += t > 0.0;
    grand += t;
  }
  if (keep.size() < 2 || live_rows < 2) return out;
  for (std::size_t c : keep) {
    double col = 0.0;
    for (const auto& row : table) col += row[c];
    for (std::size_t r = 0; r < table.size(); ++r) {
      if (row_totals[r] <= 0.0) continue;
      const double expected = row_totals[r] * col / grand;
      const double diff = table[r][c] - expected;
      out.statistic += diff * diff / expected;
    }
  }
  out.df = static_cast<int>((keep.size() - 1) * (live_rows - 1));
  boost::math::chi_squared dist(out.df);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

namespace {

std::vector<const SimulationResult*> usable(const std::vector<SimulationResult>& runs) {
  std::vector<const SimulationResult*> out;
  for (const auto& r : runs)
    if (!r.aborted && r.transcript) out.push_back(&r);
  return out;
}

}  // namespace

AuditReport privacy_audit(const std::vector<SimulationResult>& favor_runs,
                          const std::vector<SimulationResult>& veto_runs, int member, double alpha) {
  const auto favor = usable(favor_runs);
  const auto veto = usable(veto_runs);
  if (favor.size() < kMinAuditRuns || veto.size() < kMinAuditRuns)
    throw Error(ErrorCode::kInsufficientRuns, "privacy audit needs at least " + std::to_string(kMinAuditRuns) +
                                                  " completed runs per class");
  const int n = favor.front()->params.n;
  if (member < 0 || member >= n) throw Error(ErrorCode::kInvalidArgument, "audited member out of range");
  for (const auto* r : veto)
    if (r->params.n != n) throw Error(ErrorCode::kInvalidArgument, "runs disagree on jury size");

  AuditReport report;
  report.member = member;
  report.favor_runs = favor.size();
  report.veto_runs = veto.size();
  report.alpha = alpha;
  const std::vector<const std::vector<const SimulationResult*>*> classes = {&favor, &veto};

  {
    std::map<std::uint64_t, std::size_t> column;
    for (const auto* cls : classes)
      for (const auto* r : *cls) column.emplace(r->privacy.list_lengths[member], column.size());
    std::vector<std::vector<double>> table(2, std::vector<double>(column.size(), 0.0));
    for (std::size_t k = 0; k < 2; ++k)
      for (const auto* r : *classes[k]) table[k][column[r->privacy.list_lengths[member]]] += 1.0;
    report.tests.push_back({"list length", chi_square_homogeneity(table), false});
  }
  {
    std::vector<std::vector<double>> table(2, std::vector<double>(2, 0.0));
    for (std::size_t k = 0; k < 2; ++k) {
      for (const auto* r : *classes[k]) {
        const auto& m = r->transcript->matrix;
        for (std::size_t row = 0; row < m.rows(); ++row) table[k][m.at(row, member) > 0 ? 0 : 1] += 1.0;
      }
    }
    report.tests.push_back({"+1:-1 proportion", chi_square_homogeneity(table), false});
  }
  for (int other = 0; other < n; ++other) {
    if (other == member) continue;
    std::vector<std::vector<double>> table(2, std::vector<double>(4, 0.0));
    for (std::size_t k = 0; k < 2; ++k) {
      for (const auto* r : *classes[k]) {
        const auto& m = r->transcript->matrix;
        for (std::size_t row = 0; row < m.rows(); ++row) {
          const int cell = (m.at(row, member) > 0 ? 0 : 2) + (m.at(row, other) > 0 ? 0 : 1);
          table[k][cell] += 1.0;
        }
      }
    }
    report.tests.push_back({"joint with member " + std::to_string(other + 1), chi_square_homogeneity(table), false});
  }

  report.corrected_alpha = alpha / static_cast<double>(report.tests.size());
  report.pass = true;
  for (auto& t : report.tests) {
    t.pass = t.result.p_value >= report.corrected_alpha;
    report.pass = report.pass && t.pass;
  }
  return report;
}

AuditReport run_privacy_audit(const AuditPlan& plan) {
  plan.params.validate();
  if (static_cast<int>(plan.base_votes.size()) != plan.params.n)
    throw Error(ErrorCode::kInvalidArgument, "base votes must have one entry per member");
  if (plan.member < 0 || plan.member >= plan.params.n)
    throw Error(ErrorCode::kInvalidArgument, "audited member out of range");
  if (plan.runs < kMinAuditRuns)
    throw Error(ErrorCode::kInsufficientRuns, "privacy audit needs at least " + std::to_string(kMinAuditRuns) + " runs");
  VoteVector favor_votes = plan.base_votes, veto_votes = plan.base_votes;
  favor_votes[plan.member] = Vote::kFavor;
  veto_votes[plan.member] = Vote::kVeto;
  std::vector<SimulationResult> favor, veto;
  for (std::size_t i = 0; i < plan.runs; ++i) {
    ProtocolParams p = plan.params;
    p.seed = plan.params.seed + i;
    // Keep only what the audit reads.
    auto slim = [](SimulationResult r) {
      if (r.transcript) {
        r.transcript->common.clear();
        r.transcript->common.shrink_to_fit();
        r.transcript->matrix.query_order.clear();
        r.transcript->matrix.query_order.shrink_to_fit();
      }
      return r;
    };
    favor.push_back(slim(simulate(p, favor_votes)));
    veto.push_back(slim(simulate(p, veto_votes)));
  }
  return privacy_audit(favor, veto, plan.member, plan.alpha);
}

}  // namespace hardyveto
