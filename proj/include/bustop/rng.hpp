#pragma once

#include <cstdint>
#include <initializer_list>

namespace bustop {

// xoshiro256** seeded through SplitMix64. Streams are split by hashing the
// parent seed with a path of stream tags, so every unit of parallel work can
// derive its own generator without sharing state:
//
//   Rng::derive(seed, {type_index, stage, k})
//
// Only integer arithmetic is used; doubles come from the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);
  static std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [0, n), n > 0; unbiased (Lemire with rejection).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace bustop
