#pragma once

#include <string>
#include <vector>

namespace rectnet {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// The validation suite. Each criterion is pinned to its stated scale and
// tolerance; `quick` reduces replicate counts for criteria 1-5 and 8-9 and
// skips the rest.
CriterionResult run_criterion(int id, bool quick = false, unsigned threads = 0);
std::vector<int> criterion_ids(bool quick = false);
const char* criterion_name(int id);

}  // namespace rectnet
