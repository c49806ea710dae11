#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ptmatch/comparison.h"
#include "ptmatch/graph.h"
#include "ptmatch/matcher.h"
#include "ptmatch/refinement.h"

namespace ptmatch {

// Caller-facing knobs; anything unset falls back to the defaults below.
//   depth   ceil(22 ln ln n)
//   w       floor((ln n)^5), lowered to 2^(depth-1) so that 2w <= 2^depth
//   slack   1 / sqrt(ln n)
//   epsilon clamp(np / ln n - 1, 0.05, 1)
//   rounds  ceil(log2 n)
//   refine_threshold  epsilon^2 p n / 512
struct PipelineParams {
  std::optional<double> p;
  bool estimate_p = false;
  std::optional<int> depth;
  std::optional<std::uint64_t> w;
  std::optional<double> slack;
  std::optional<double> epsilon;
  std::optional<int> rounds;
  std::optional<double> refine_threshold;
  std::uint64_t seed = 0;
  int threads = 1;
  ExtensionPolicy extension = ExtensionPolicy::kArbitrary;
  bool early_exit = true;
};

struct ResolvedParams {
  std::size_t n = 0;
  double p = 0.0;
  bool p_estimated = false;
  int depth = 0;
  std::uint64_t w_requested = 0;
  std::uint64_t w = 0;
  bool w_clamped = false;
  double slack = 0.0;
  double epsilon = 0.0;
  double refine_threshold = 0.0;
  bool refine_threshold_overridden = false;
  int rounds = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  ExtensionPolicy extension = ExtensionPolicy::kArbitrary;
  bool early_exit = true;
};

// Throws ParamError when p is missing (and not estimated) or a resolved value
// is out of range; InputError when the graphs differ in size.
ResolvedParams resolve_params(const Graph& g_pi, const Graph& g_prime,
                              const PipelineParams& params);

struct StageTimings {
  double signatures = 0.0;
  double comparison = 0.0;
  double matching = 0.0;
  double refinement = 0.0;
  double total = 0.0;
};

struct Provenance {
  ResolvedParams params;
  std::vector<std::uint64_t> index_set;
  bool index_set_clamped = false;
  double comparison_threshold = 0.0;
  std::size_t empty_support_pi = 0;
  std::size_t empty_support_prime = 0;
  std::size_t b_nnz = 0;
  std::size_t peeled = 0;
  std::vector<RoundTrace> rounds;
  StageTimings timings;
};

struct PipelineResult {
  Matching matching;
  Matching almost_exact;  // peel output before refinement
  CandidateMatrix b;
  Provenance provenance;
};

// Signatures -> comparison -> greedy peel.
PipelineResult match_almost_exact(const Graph& g_pi, const Graph& g_prime,
                                  const PipelineParams& params);

// match_almost_exact followed by refinement. `truth`, when given, only feeds
// the per-round error trace.
PipelineResult match_exact(const Graph& g_pi, const Graph& g_prime, const PipelineParams& params,
                           const Permutation* truth = nullptr);

// "key = value" lines.
void write_provenance(std::ostream& os, const Provenance& prov);

}  // namespace ptmatch
