#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardyveto/veto_protocol.hpp"

namespace hardyveto {

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Homogeneity test on a rows x categories table of counts. Categories with
// zero total are dropped; fewer than two remaining categories give p = 1.
ChiSquareResult chi_square_homogeneity(const std::vector<std::vector<double>>& table);

struct AuditTest {
  std::string name;
  ChiSquareResult result;
  bool pass = false;
};

struct AuditReport {
  int member = 0;
  std::size_t favor_runs = 0;
  std::size_t veto_runs = 0;
  double alpha = 0.01;
  double corrected_alpha = 0.01;  // alpha / number of tests
  std::vector<AuditTest> tests;
  bool pass = false;
};

inline constexpr std::size_t kMinAuditRuns = 30;

// Compares what the referee sees of `member` between runs where that member
// voted FAVOR and runs where it voted VETO: submitted list length, the
// member's +1 : -1 proportion among collected answers, and the joint
// (member, other) answer distribution for each other member. Counts are
// pooled over runs. Throws kInsufficientRuns below kMinAuditRuns per class.
AuditReport privacy_audit(const std::vector<SimulationResult>& favor_runs,
                          const std::vector<SimulationResult>& veto_runs, int member, double alpha = 0.01);

struct AuditPlan {
  ProtocolParams params;
  VoteVector base_votes;  // votes of everyone else; base_votes[member] is overwritten
  int member = 0;
  std::size_t runs = 50;
  double alpha = 0.01;
};

// Runs `runs` paired simulations per class (run i of both classes uses seed
// params.seed + i) and audits them. Aborted runs are excluded; if that leaves
// fewer than kMinAuditRuns, kInsufficientRuns is thrown.
AuditReport run_privacy_audit(const AuditPlan& plan);

}  // namespace hardyveto
