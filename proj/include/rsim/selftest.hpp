#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rsim {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  int instances = 1000;
  std::uint64_t seed = 20240601;
  std::uint64_t mc_samples = 10000000;
  std::function<void(const SuiteResult&)> on_suite;
};

/// Brute-force oracle suites: rate_control, power_for_user, fixed_rate_select,
/// expected_mutual_info against Monte Carlo, and an encoder-queue replay.
std::vector<SuiteResult> run_selftest(const SelftestOptions& options = {});

}  // namespace rsim
