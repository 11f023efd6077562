// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure.

#include <cstdio>
#include <iostream>

#include "hypwalk/parallel.hpp"
#include "hypwalk/report.hpp"

int main() {
  hypwalk::set_threads(4);
  auto results = hypwalk::run_acceptance(&std::cout);
  int failures = 0;
  for (const auto& r : results) failures += r.pass ? 0 : 1;
  if (failures == 0) {
    std::cout << "all " << results.size() << " criteria passed" << std::endl;
    return 0;
  }
  std::cout << failures << " of " << results.size() << " criteria failed" << std::endl;
  return 1;
}
