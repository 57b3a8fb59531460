#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace responsekit {

// One reproducible random stream identified by (master seed, stream index).
// Trajectory k of a Monte-Carlo run always draws from Stream(seed, k), so a
// run gives the same numbers whether it is executed serially or in parallel.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t index);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Derives a labelled child seed from a master seed (e.g. "respond",
// "teacher"), so subcommands never share streams by accident.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label);

}  // namespace responsekit
