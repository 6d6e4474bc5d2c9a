// Acceptance suite: one [PASS]/[FAIL] line per criterion.
//
//   acceptance            run all criteria
//   acceptance 4 6        run the listed criteria
//
// Exit status is nonzero if any selected criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "ddpopt/checks.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= ddpopt::kCheckCount; ++i) ids.push_back(i);

  bool all = true;
  for (const int id : ids) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = ddpopt::run_check(id);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s -- %s [%.2f s]\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && r.passed;
  }
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
