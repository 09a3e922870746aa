// Acceptance suite: runs every verification criterion at its stated
// tolerance and prints one pass/fail line per criterion.

#include <cstdio>

#include "capindex/verify.hpp"

int main() {
  const auto results = capindex::run_acceptance();
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.detail.c_str());
    all = all && r.pass;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(std::count_if(results.begin(), results.end(),
                                             [](const auto& r) { return r.pass; })),
              results.size());
  return all ? 0 : 1;
}
