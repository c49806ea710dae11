#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ptmatch/graph.h"
#include "ptmatch/matcher.h"
#include "ptmatch/model.h"

namespace ptmatch {

// How a round's partial matching is completed to a bijection.
enum class ExtensionPolicy {
  // Free columns are paired with free rows in increasing order.
  kArbitrary,
  // Free columns first keep their previous-round target when that row is
  // still free; the rest are paired in increasing order.
  kKeepPrevious,
};

struct RefineParams {
  std::size_t n = 0;
  double p = 0.0;
  double epsilon = 1.0;
  double threshold = 0.0;  // epsilon^2 p n / 512
  int rounds = 1;          // ceil(log2 n)
  ExtensionPolicy extension = ExtensionPolicy::kArbitrary;
  bool early_exit = true;  // stop once a round reproduces its input
  int threads = 1;

  // Throws ParamError unless epsilon in (0, 1], threshold > 0, rounds >= 1.
  void validate() const;
};

// Resolves the defaults from (n, p, epsilon). Unset rounds means
// ceil(log2 n).
RefineParams make_refine_params(std::size_t n, double p, double epsilon,
                                std::optional<int> rounds = std::nullopt);

// clamp(np / ln n - 1, 0.05, 1).
double default_epsilon(std::size_t n, double p);

// Sparse counts c(i, i') = |current^{-1}(N_{G^pi}(i)) ∩ N_{G'}(i')|, one sorted
// row per G^pi vertex; only positive counts are stored.
struct IntersectionCounts {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<Vertex, std::uint32_t>>> rows;

  // Per-row and per-column numbers of entries with count >= threshold.
  struct Tallies {
    std::vector<std::uint32_t> row;
    std::vector<std::uint32_t> col;
  };
  Tallies tally(double threshold) const;
  std::uint32_t get(Vertex i, Vertex ip) const;
  bool operator==(const IntersectionCounts&) const = default;
};

IntersectionCounts intersection_counts(const Graph& g_pi, const Graph& g_prime,
                                       const Matching& current, int threads = 1);

// One refinement step: assigns i' -> i iff c(i, i') >= threshold and (i, i')
// is the only above-threshold entry in both its row and its column. Returns
// a partial assignment indexed by i' (kUnassigned elsewhere); injective by
// construction.
std::vector<Vertex> refine_round(const IntersectionCounts& counts, const RefineParams& params);

struct RoundTrace {
  int round = 0;
  std::size_t assigned = 0;  // entries fixed by the round before extension
  std::optional<std::size_t> errors;  // mismatches after extension, with truth
};

struct RefineResult {
  Matching matching;
  std::vector<RoundTrace> trace;
  bool early_exit = false;
};

// Runs the rounds of count + refine + extend starting from `initial`.
// Throws InputError if sizes disagree or `initial` is not bijective.
RefineResult refine_matching(const Graph& g_pi, const Graph& g_prime, const Matching& initial,
                             const RefineParams& params,
                             const Permutation* truth = nullptr);

}  // namespace ptmatch
