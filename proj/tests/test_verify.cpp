// Sanity of the verification harness itself: a too-coarse grid and a
// tampered counting tolerance must surface as reported failures, not as
// silent passes.

#include <catch2/catch_amalgamated.hpp>

#include "capindex/verify.hpp"

using namespace capindex;

TEST_CASE("default acceptance run: only the documented red criterion fails") {
  const auto results = run_acceptance();
  REQUIRE(results.size() == 11);
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) {
      ++failures;
      // the one known-red check: the index at r = 0.95 is 8 on both
      // computation paths while the criterion demands >= 10
      CHECK(r.id == "4-cylinder-window");
      CHECK(r.detail.find("MI(0.95)=8") != std::string::npos);
    }
  }
  CHECK(failures == 1);
}

TEST_CASE("coarse grid surfaces as reported failures") {
  ReportConfig cfg;
  cfg.grid_n = 8;
  const auto results = run_acceptance(cfg);
  int failures = 0;
  bool saw_grid_error = false;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
    if (r.detail.find("grid_n must be >= 64") != std::string::npos) saw_grid_error = true;
  }
  CHECK(failures >= 3);
  CHECK(saw_grid_error);
  // grid-independent criteria still pass
  for (const auto& r : results)
    if (r.id == "3-root-anchors") CHECK(r.pass);
}

TEST_CASE("tampered counting tolerance surfaces as reported failures") {
  ReportConfig cfg;
  cfg.eps_count = 10.0;
  const auto results = run_acceptance(cfg);
  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  CHECK(failures >= 3);
}
