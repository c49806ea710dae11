#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ptmatch {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

// Immutable undirected simple graph in compressed sparse row form.
// Neighbor lists are strictly increasing; the structure is symmetric and
// loop-free. Safe to share across threads once constructed.
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an arbitrary edge list. Duplicates and reversed
  // duplicates collapse to one edge. Throws InputError on an out-of-range
  // endpoint or a self-loop.
  static Graph from_edge_list(std::size_t n, std::span<const Edge> edges);

  std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return edge_count_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(Vertex u, Vertex v) const;

  // Canonical edge list: u < v, sorted lexicographically.
  std::vector<Edge> to_edge_list() const;

  bool operator==(const Graph& other) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::size_t edge_count_ = 0;
};

// BFS layers around a center. layers[l] is the distance-l sphere; parents[l][k]
// is the BFS predecessor of layers[l][k] (the center is its own parent).
struct SphereDecomposition {
  Vertex center = 0;
  int radius = 0;
  std::vector<std::vector<Vertex>> layers;
  std::vector<std::vector<Vertex>> parents;
};

SphereDecomposition bfs_spheres(const Graph& g, Vertex center, int radius);

// True iff the subgraph induced on the radius-r ball is a tree. Stops at the
// first non-tree edge, so the cost is bounded by the edges inside the ball.
bool neighborhood_is_tree(const Graph& g, Vertex center, int radius);

// Reusable distance scratch for repeated bounded BFS on one graph. Each
// call to run() touches only the explored ball, so per-call cost does not
// depend on n.
class BfsWorkspace {
 public:
  explicit BfsWorkspace(std::size_t n) : dist_(n, kUnreached) {}

  static constexpr int kUnreached = -1;

  // Explores the ball of the given radius; the visited list is in BFS
  // order, so it is grouped by distance.
  void run(const Graph& g, Vertex center, int radius);
  int distance(Vertex v) const { return dist_[v]; }
  std::span<const Vertex> visited() const { return visited_; }

 private:
  void reset();

  std::vector<int> dist_;
  std::vector<Vertex> visited_;
};

}  // namespace ptmatch
