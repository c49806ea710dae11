#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace ptmatch {

// Stream labels used by the instance sampler and the comparison stage.
inline constexpr std::string_view kStreamParent = "parent";
inline constexpr std::string_view kStreamThinG = "thin-G";
inline constexpr std::string_view kStreamThinGPrime = "thin-G'";
inline constexpr std::string_view kStreamPerm = "perm";
inline constexpr std::string_view kStreamIndexSet = "index-set";

std::uint64_t splitmix64(std::uint64_t x);

// Independent, reproducible random stream identified by (seed, label).
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard; all derived variates are computed here rather than through
// <random> distributions so results do not depend on the standard library.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double prob) { return uniform() < prob; }
  // Uniform integer in [0, bound); unbiased (rejection). bound > 0.
  std::uint64_t below(std::uint64_t bound);

  const std::string& label() const { return label_; }

 private:
  std::mt19937_64 engine_;
  std::string label_;
};

}  // namespace ptmatch
