#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ptmatch/graph.h"
#include "ptmatch/random.h"
#include "ptmatch/signatures.h"

namespace ptmatch {

// Sparsification index set J: 2w distinct depth-m class keys, sorted.
struct IndexSet {
  int depth = 0;
  std::uint64_t w = 0;
  std::vector<std::uint64_t> keys;
  // Set when 2w exceeded 2^depth and J fell back to every key.
  bool clamped = false;
};

// Uniform 2w-subset of {-1,+1}^m without replacement (Floyd's algorithm).
// Throws ParamError for w == 0 or m outside [1, 64].
IndexSet sample_index_set(int depth, std::uint64_t w, RandomStream& rng);

// Variance-normalized sparsified distance over J. A term with zero total
// variance contributes 0 when the two f values agree and +infinity
// otherwise. Throws InputError when the depths disagree.
double signature_distance(const VertexSignature& a, const VertexSignature& b, const IndexSet& j,
                          int depth_a, int depth_b);

// Sparse boolean n x n matrix; rows are G^pi vertices, columns G' vertices.
struct CandidateMatrix {
  std::size_t n = 0;
  std::vector<std::vector<Vertex>> rows;  // sorted, duplicate-free

  std::size_t nnz() const;
  bool get(Vertex i, Vertex j) const;
  CandidateMatrix transposed() const;
  bool operator==(const CandidateMatrix&) const = default;
};

struct ComparisonParams {
  double p = 0.0;
  int depth = 1;
  std::uint64_t w = 1;
  double slack = 0.0;  // threshold is |J| (1 - slack)
  int threads = 1;
};

struct ComparisonResult {
  CandidateMatrix b;
  IndexSet j;
  double threshold = 0.0;
  // Vertices whose signature is zero on every key of J. Such a vertex is at
  // distance 0 from any other J-empty vertex and therefore matches it.
  std::vector<Vertex> empty_support_pi;
  std::vector<Vertex> empty_support_prime;
};

// Compares precomputed signatures: B(i, i') = 1 iff distance < threshold.
ComparisonResult compare_signatures(const SignatureSet& sig_pi, const SignatureSet& sig_prime,
                                    const IndexSet& j, double slack, int threads = 1);

// Full comparison stage: computes all 2n signatures with np = n p, draws J
// from `rng`, and fills B. Throws InputError if the graphs differ in size.
ComparisonResult comparison_matrix(const Graph& g_pi, const Graph& g_prime,
                                   const ComparisonParams& params, RandomStream& rng);

// "i: i1 i2 ..." per row, preceded by an "n <n>" line.
void write_candidate_matrix(std::ostream& os, const CandidateMatrix& b);
CandidateMatrix read_candidate_matrix(std::istream& is);

}  // namespace ptmatch
