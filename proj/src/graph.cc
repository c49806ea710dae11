#include "ptmatch/graph.h"

#include <algorithm>
#include <string>

#include "ptmatch/errors.h"

namespace ptmatch {

Graph Graph::from_edge_list(std::size_t n, std::span<const Edge> edges) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw InputError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                       ") out of range for n=" + std::to_string(n));
    }
    if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  Graph g;
  g.edge_count_ = canon.size();
  g.offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : canon) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.adjacency_.resize(2 * canon.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Canonical order fills each row in increasing order for the u-side; the
  // v-side needs an explicit sort.
  for (const auto& [u, v] : canon) {
    g.adjacency_[cursor[u]++] = v;
    g.adjacency_[cursor[v]++] = u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + g.offsets_[i], g.adjacency_.begin() + g.offsets_[i + 1]);
  }
  return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::to_edge_list() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (Vertex u = 0; u < num_vertices(); ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

SphereDecomposition bfs_spheres(const Graph& g, Vertex center, int radius) {
  SphereDecomposition out;
  out.center = center;
  out.radius = radius;
  out.layers.assign(radius + 1, {});
  out.parents.assign(radius + 1, {});
  std::vector<char> seen(g.num_vertices(), 0);
  seen[center] = 1;
  out.layers[0].push_back(center);
  out.parents[0].push_back(center);
  for (int l = 0; l < radius; ++l) {
    for (Vertex u : out.layers[l]) {
      for (Vertex w : g.neighbors(u)) {
        if (seen[w]) continue;
        seen[w] = 1;
        out.layers[l + 1].push_back(w);
        out.parents[l + 1].push_back(u);
      }
    }
    if (out.layers[l + 1].empty()) break;
  }
  return out;
}

bool neighborhood_is_tree(const Graph& g, Vertex center, int radius) {
  std::vector<int> dist(g.num_vertices(), -1);
  std::vector<Vertex> parent(g.num_vertices(), center);
  std::vector<Vertex> frontier{center}, next;
  dist[center] = 0;
  for (int l = 0; l <= radius && !frontier.empty(); ++l) {
    next.clear();
    for (Vertex u : frontier) {
      for (Vertex w : g.neighbors(u)) {
        if (u != center && w == parent[u]) continue;
        if (dist[w] >= 0) return false;  // second route to w inside the ball
        if (l == radius) continue;       // w lies outside the ball
        dist[w] = l + 1;
        parent[w] = u;
        next.push_back(w);
      }
    }
    frontier.swap(next);
  }
  return true;
}

void BfsWorkspace::reset() {
  for (Vertex v : visited_) dist_[v] = kUnreached;
  visited_.clear();
}

void BfsWorkspace::run(const Graph& g, Vertex center, int radius) {
  reset();
  dist_[center] = 0;
  visited_.push_back(center);
  for (std::size_t head = 0; head < visited_.size(); ++head) {
    const Vertex u = visited_[head];
    const int d = dist_[u];
    if (d == radius) break;
    for (Vertex w : g.neighbors(u)) {
      if (dist_[w] != kUnreached) continue;
      dist_[w] = d + 1;
      visited_.push_back(w);
    }
  }
}

}  // namespace ptmatch
