#include "responsekit/random.hpp"

namespace responsekit {

namespace {

std::seed_seq make_seed_seq(std::uint64_t master_seed, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(master_seed),
                       static_cast<std::uint32_t>(master_seed >> 32),
                       static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32), 0x5eedU};
}

}  // namespace

Stream::Stream(std::uint64_t master_seed, std::uint64_t index) {
  auto seq = make_seed_seq(master_seed, index);
  engine_.seed(seq);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label) {
  // FNV-1a over the label, then a splitmix64 finaliser over (seed ^ hash).
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = master_seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace responsekit
