#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ptmatch/graph.h"
#include "ptmatch/random.h"

namespace ptmatch {

// Correlated Erdos-Renyi parameters. The parent graph has edge probability
// q = p / (1 - alpha); each child keeps a parent edge with probability
// 1 - alpha, so both children are marginally G(n, p).
struct ModelParams {
  std::size_t n = 0;
  double p = 0.0;
  double alpha = 0.0;

  double q() const { return p / (1.0 - alpha); }
  // Throws ParamError unless n >= 1, p in (0, 1], alpha in [0, 1 - p].
  void validate() const;
};

class Permutation {
 public:
  Permutation() = default;
  // Throws InputError unless `forward` is a bijection on {0..n-1}.
  explicit Permutation(std::vector<Vertex> forward);

  static Permutation identity(std::size_t n);
  static Permutation uniform(std::size_t n, RandomStream& rng);

  std::size_t size() const { return forward_.size(); }
  Vertex operator()(Vertex i) const { return forward_[i]; }
  Vertex inverse_of(Vertex j) const { return inverse_[j]; }
  const std::vector<Vertex>& forward() const { return forward_; }
  const std::vector<Vertex>& inverse() const { return inverse_; }
  Permutation inverted() const { return Permutation(inverse_); }

  bool operator==(const Permutation& other) const { return forward_ == other.forward_; }

 private:
  std::vector<Vertex> forward_;
  std::vector<Vertex> inverse_;
};

enum class PermutationPolicy { kUniform, kIdentity };

struct SamplerOptions {
  PermutationPolicy permutation = PermutationPolicy::kUniform;
  // Pair enumeration is used while n(n-1)/2 stays at or below this many
  // pairs; larger instances switch to geometric skip sampling.
  std::uint64_t pair_budget = 100'000'000;
};

// One sampled problem. `g` is the latent child before relabeling, kept for
// diagnostics together with the parent `g0`; the matcher only sees g_pi and
// g_prime.
struct CorrelatedInstance {
  ModelParams params;
  std::uint64_t seed = 0;
  Graph g0;
  Graph g;
  Graph g_pi;
  Graph g_prime;
  Permutation pi;
  bool skip_sampled = false;
  std::vector<std::string> streams;
};

CorrelatedInstance sample_instance(const ModelParams& params, std::uint64_t seed,
                                   const SamplerOptions& options = {});

// Relabels vertex i as pi(i). Throws InputError on a size mismatch.
Graph apply_permutation(const Graph& g, const Permutation& pi);

// Fraction of indices on which the two permutations agree.
double overlap_fraction(const Permutation& estimate, const Permutation& truth);

}  // namespace ptmatch
