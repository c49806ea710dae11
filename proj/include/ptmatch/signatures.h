#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ptmatch/graph.h"

namespace ptmatch {

// Sign sequence s in {-1,+1}^depth packed into a word: bit k is set iff the
// (k+1)-th sign is +1, i.e. the split taken when descending from level k to
// level k+1 went to the high-degree side.
struct ClassKey {
  int depth = 0;
  std::uint64_t bits = 0;

  auto operator<=>(const ClassKey&) const = default;
  // "-+-..." with s_1 first.
  std::string sign_string() const;
};

inline constexpr int kMaxDepth = 64;

struct PartitionClass {
  std::uint64_t bits = 0;
  std::vector<Vertex> members;  // sorted
};

// Nonempty classes T_s^l for l = 0..depth, each level sorted by key bits.
struct PartitionTree {
  Vertex root = 0;
  int depth = 0;
  std::vector<std::vector<PartitionClass>> levels;

  // Members of T_s^l, or nullptr when the class is empty.
  const std::vector<Vertex>* find(int level, std::uint64_t bits) const;
};

// One stored coordinate of a vertex signature. Coordinates that are absent
// carry f = 0 and v = 0.
struct SignatureEntry {
  std::uint64_t bits = 0;
  double f = 0.0;
  double v = 0.0;

  bool operator==(const SignatureEntry&) const = default;
};

// Sparse (f, v) pair for one vertex, sorted by key bits.
struct VertexSignature {
  std::vector<SignatureEntry> entries;

  const SignatureEntry* find(std::uint64_t bits) const;
  bool operator==(const VertexSignature&) const = default;
};

struct SignatureParams {
  int depth = 1;
  double np = 1.0;  // degree threshold and centering value
  double p = 0.5;   // enters only through the variance unit np(1 - p)

  // Throws ParamError unless 1 <= depth <= kMaxDepth, np > 0, p in (0, 1].
  void validate() const;
};

struct SignatureSet {
  SignatureParams params;
  std::vector<VertexSignature> vertices;
};

// Scratch reused across roots of the same graph. Not thread-safe; use one
// per worker.
class SignatureWorkspace {
 public:
  explicit SignatureWorkspace(std::size_t n)
      : bfs_(n), stamp_(n, 0), mask_(n, 0), level_(n, kFar) {}

  PartitionTree partition_tree(const Graph& g, Vertex root, const SignatureParams& params);
  VertexSignature vertex_signature(const Graph& g, Vertex root, const SignatureParams& params);

 private:
  // Appends N(members) restricted to distance `target` to `out`, each vertex
  // once.
  void frontier(const Graph& g, const std::vector<Vertex>& members, int target,
                std::vector<Vertex>& out);

  // Depth <= 6: every class key fits in one 64-bit membership mask per
  // vertex, so the tree is never materialized.
  VertexSignature masked_signature(const Graph& g, Vertex root, const SignatureParams& params);
  // Any depth: explicit classes.
  VertexSignature listed_signature(const Graph& g, Vertex root, const SignatureParams& params);

  BfsWorkspace bfs_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t token_ = 0;
  static constexpr std::uint8_t kFar = 0xFF;
  std::vector<std::uint64_t> mask_;
  std::vector<std::uint8_t> level_;
  std::vector<Vertex> order_;

  friend VertexSignature listed_vertex_signature(const Graph&, Vertex, const SignatureParams&);
};

// Builds the partition tree: level-(k+1) children of T_s^k are the vertices of
// N(T_s^k) at distance k+1 from the root, split at degree >= np (+1) versus
// degree < np (-1). A vertex reachable from several parent classes (non-tree
// ball) is placed under each of them.
PartitionTree partition_tree(const Graph& g, Vertex root, const SignatureParams& params);

// f_s sums deg(j) - 1 - np over the distance-(depth+1) neighbors j of T_s^depth,
// v_s = np(1-p) times their number. The sum is formed from integer degree
// totals, so the value is independent of vertex labels and summation order.
VertexSignature vertex_signature(const Graph& g, Vertex root, const SignatureParams& params);

// Reference path that always expands explicit classes; used to cross-check
// the bitmask path.
VertexSignature listed_vertex_signature(const Graph& g, Vertex root, const SignatureParams& params);

// Convenience overload with np = n * p.
VertexSignature vertex_signature(const Graph& g, Vertex root, int depth, std::size_t n, double p);

// All n signatures; parallel over vertices with deterministic output.
SignatureSet compute_signatures(const Graph& g, const SignatureParams& params, int threads = 1);

// ceil(22 ln ln n). Throws ParamError for n < 16.
int default_depth(std::size_t n);

// Line-oriented dump: "vertex signs f v" per stored coordinate.
void write_signature_dump(std::ostream& os, const SignatureSet& set);

}  // namespace ptmatch
