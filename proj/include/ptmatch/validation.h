#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ptmatch/comparison.h"
#include "ptmatch/graph.h"
#include "ptmatch/matcher.h"
#include "ptmatch/model.h"

namespace ptmatch {

// ---------------------------------------------------------------------------
// Exhaustive oracle

struct BruteForceResult {
  Permutation sigma;       // G' label -> G^pi label
  std::size_t overlap = 0;  // |{edges (i,j) of G' : (sigma(i), sigma(j)) in G^pi}|
};

// Edge-overlap maximizer over all n! permutations; the lexicographically
// smallest maximizer wins ties. Throws ParamError for n > 9.
BruteForceResult brute_force_best_matching(const Graph& g_pi, const Graph& g_prime);

// Objective evaluated at an arbitrary sigma.
std::size_t edge_overlap(const Graph& g_pi, const Graph& g_prime, const Permutation& sigma);

// ---------------------------------------------------------------------------
// Typicality of parent-graph vertices

struct TypicalityParams {
  int m = 1;
  double kappa = 0.1;
  double K = 2.0;
  double delta = 0.1;

  // Throws ParamError unless m >= 1, kappa in (0, 1/2), K > 1, delta > 0.
  void validate() const;
};

struct VertexTypicality {
  bool a[6] = {false, false, false, false, false, false};  // A1..A6
  bool typical() const { return a[0] && a[1] && a[2] && a[3] && a[4] && a[5]; }
};

struct TypicalityReport {
  std::vector<VertexTypicality> vertices;
  std::size_t condition_counts[6] = {0, 0, 0, 0, 0, 0};
  std::size_t typical_count = 0;
  double fraction_typical = 0.0;
};

// Evaluates the six conditions per vertex of the parent graph, with nq the
// parent's expected degree:
//   A1 the (m+1)-ball is a tree
//   A2 every degree in the (m+1)-ball is <= K nq
//   A3 |S(l)| > (1-kappa) nq 3^(l-1) and |B(l)| <= K (nq)^l for l = 1..m
//   A4 at most kappa/(K 3^l) |S(l)| sphere vertices have degree <= (1-kappa) nq,
//      l = 0..m
//   A5 at most kappa/(K 3^l) |S(l)| sphere vertices have fewer than
//      (1/2-kappa) nq outward neighbors of degree > nq + delta sqrt(nq),
//      l = 0..m-1
//   A6 as A5 with degree < nq - delta sqrt(nq)
TypicalityReport typicality_report(const Graph& g0, const TypicalityParams& params, std::size_t n,
                                   double q, int threads = 1);
VertexTypicality vertex_typicality(const Graph& g0, Vertex i, const TypicalityParams& params,
                                   double nq);

// ---------------------------------------------------------------------------
// Class overlaps between the partition trees of a vertex in G and in G'

struct ClassOverlapStats {
  double reference = 0.0;  // (np/2)^m (1 - 8 kappa)^m
  // Per latent vertex i: min over all 2^m keys s of |T_s^m(i,G) ∩ T_s^m(i,G')|.
  std::vector<std::size_t> min_overlap;
  // Per vertex: min over keys with T_s^m(i,G) nonempty of |T ∩ T'| / |T|
  // (1.0 when every class is empty).
  std::vector<double> min_ratio;
  // Per vertex: whether the parent graph's (m+1)-ball is a tree.
  std::vector<char> tree_ball;
  std::size_t smallest = 0;
  double median = 0.0;
  std::size_t tree_vertices = 0;
  std::size_t tree_vertices_meeting_reference = 0;
};

// Partition trees are built in latent coordinates: G is recovered from G^pi
// through pi. Throws ParamError unless 1 <= m <= 63.
ClassOverlapStats class_overlap_stats(const CorrelatedInstance& instance, int m, double np,
                                      double kappa, int threads = 1);

// ---------------------------------------------------------------------------
// Dense reference implementations

struct DenseSignature {
  std::vector<double> f;  // indexed by key bits, size 2^m
  std::vector<double> v;
};

// Materializes all 2^m classes as explicit vertex sets. m <= 12.
DenseSignature naive_signature(const Graph& g, Vertex root, int m, double np, double p);

// Full-sum comparison over dense signatures. Throws ParamError for n > 256
// or m > 12.
CandidateMatrix naive_comparison_matrix(const Graph& g_pi, const Graph& g_prime, double p, int m,
                                        const IndexSet& j, double slack);

// Dense n x n counts by explicit set intersection. Throws ParamError for
// n > 64.
std::vector<std::vector<std::uint32_t>> naive_intersection_counts(const Graph& g_pi,
                                                                  const Graph& g_prime,
                                                                  const Matching& current);

// Literal quantified refinement step over dense counts.
std::vector<Vertex> naive_refine_round(const std::vector<std::vector<std::uint32_t>>& counts,
                                       double threshold);

}  // namespace ptmatch
