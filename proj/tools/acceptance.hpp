#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace responsekit::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values against their tolerances
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;
inline constexpr int kCriterionCount = 11;

// Runs one criterion (1..11). Numeric failures and runtime overruns both
// mark the criterion as failed; exceptions are caught and reported.
CriterionResult run_criterion(int id, std::uint64_t seed = kDefaultSeed);

// Runs the listed criteria (all when empty) in order.
std::vector<CriterionResult> run_all(std::uint64_t seed = kDefaultSeed,
                                     const std::vector<int>& only = {});

// One line per criterion: `[PASS] 5 ou-linear-response (12.3 s / 120 s): ...`
std::string format_line(const CriterionResult& r);
std::string format_summary(const std::vector<CriterionResult>& results);

}  // namespace responsekit::acceptance
