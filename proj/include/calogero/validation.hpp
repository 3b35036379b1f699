#pragma once

#include <string>
#include <vector>

namespace calogero::validation {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

/// Runs acceptance criteria 1-10 (or the listed subset). Exceptions count as failures.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {});

/// "criterion <id> PASS|FAIL <name>: <detail>"
std::string format_line(const CriterionResult& r);

}  // namespace calogero::validation
