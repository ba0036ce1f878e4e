#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace omega {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  double limit = 0;
};

struct AcceptanceOptions {
  uint64_t seed = 20240601;
  // Empty = all criteria; otherwise ids such as "AC-3".
  std::vector<std::string> only;
};

std::vector<std::string> acceptance_ids();
CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);
std::string format_result(const CriterionResult& r);

} // namespace omega
