// Acceptance suite runner: one pass/fail line per criterion.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "rectnet/acceptance.hpp"

int main(int argc, char** argv) {
  bool quick = false;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    } else {
      ids.push_back(std::atoi(argv[i]));
    }
  }
  if (ids.empty()) ids = rectnet::criterion_ids(quick);
  bool all = true;
  for (int id : ids) {
    auto r = rectnet::run_criterion(id, quick);
    std::printf("%s criterion %2d: %s -- %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
