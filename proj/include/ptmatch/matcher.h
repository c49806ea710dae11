#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "ptmatch/comparison.h"
#include "ptmatch/graph.h"
#include "ptmatch/model.h"

namespace ptmatch {

enum class Origin : unsigned char { kPeeled, kExtended };

// Bijection from G' labels to G^pi labels: assign[i'] = i. The estimation
// target is pi itself.
struct Matching {
  std::size_t n = 0;
  std::vector<Vertex> assign;
  std::vector<Origin> origin;

  Permutation to_permutation() const { return Permutation(assign); }
  bool operator==(const Matching&) const = default;
};

// Greedy peel. The edge taken at each step is the lexicographically smallest
// remaining (i, i'); leftover rows and columns are paired in increasing
// order.
Matching approximate_matching(const CandidateMatrix& b);

// Same peel with the selection order supplied by the caller: edges are
// visited in `order` and taken whenever both endpoints are still free. Any
// permutation of B's edges realizes a valid run of the peel. Throws
// InputError if an edge of `order` is not an edge of B.
Matching approximate_matching_in_order(const CandidateMatrix& b, std::span<const Edge> order);

// Completes a partial assignment (kUnassigned entries) by pairing the free
// columns with the free rows in increasing order.
inline constexpr Vertex kUnassigned = static_cast<Vertex>(-1);
Matching extend_to_bijection(std::vector<Vertex> partial, std::vector<Origin> origin);

// Number of i' with assign[i'] != truth(i'). Throws InputError on a size
// mismatch.
std::size_t matching_mismatches(const Matching& est, const Permutation& truth);

// "i_prime i origin" per line after a "# i_prime i origin" header.
void write_matching(std::ostream& os, const Matching& m);
Matching read_matching(std::istream& is);

}  // namespace ptmatch
