#include "ptmatch/signatures.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ptmatch/errors.h"
#include "ptmatch/parallel.h"

namespace ptmatch {

std::string ClassKey::sign_string() const {
  std::string s;
  s.reserve(depth);
  for (int k = 0; k < depth; ++k) s.push_back(((bits >> k) & 1U) ? '+' : '-');
  return s;
}

const std::vector<Vertex>* PartitionTree::find(int level, std::uint64_t bits) const {
  if (level < 0 || level >= static_cast<int>(levels.size())) return nullptr;
  const auto& row = levels[level];
  auto it = std::lower_bound(row.begin(), row.end(), bits,
                             [](const PartitionClass& c, std::uint64_t b) { return c.bits < b; });
  if (it == row.end() || it->bits != bits) return nullptr;
  return &it->members;
}

const SignatureEntry* VertexSignature::find(std::uint64_t bits) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), bits,
                             [](const SignatureEntry& e, std::uint64_t b) { return e.bits < b; });
  if (it == entries.end() || it->bits != bits) return nullptr;
  return &*it;
}

void SignatureParams::validate() const {
  if (depth < 1 || depth > kMaxDepth) {
    throw ParamError("depth must lie in [1, 64], got " + std::to_string(depth));
  }
  if (!(np > 0.0)) throw ParamError("np must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw ParamError("p must lie in (0, 1]");
}

void SignatureWorkspace::frontier(const Graph& g, const std::vector<Vertex>& members, int target,
                                  std::vector<Vertex>& out) {
  if (++token_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    token_ = 1;
  }
  for (Vertex u : members) {
    for (Vertex w : g.neighbors(u)) {
      if (bfs_.distance(w) != target || stamp_[w] == token_) continue;
      stamp_[w] = token_;
      out.push_back(w);
    }
  }
}

PartitionTree SignatureWorkspace::partition_tree(const Graph& g, Vertex root,
                                                 const SignatureParams& params) {
  params.validate();
  const int m = params.depth;
  PartitionTree tree;
  tree.root = root;
  tree.depth = m;
  tree.levels.resize(m + 1);
  tree.levels[0].push_back({0, {root}});
  bfs_.run(g, root, m + 1);

  std::vector<Vertex> children;
  for (int k = 0; k < m; ++k) {
    auto& next = tree.levels[k + 1];
    for (const auto& cls : tree.levels[k]) {
      children.clear();
      frontier(g, cls.members, k + 1, children);
      std::sort(children.begin(), children.end());
      PartitionClass low{cls.bits, {}};
      PartitionClass high{cls.bits | (std::uint64_t{1} << k), {}};
      for (Vertex j : children) {
        (static_cast<double>(g.degree(j)) >= params.np ? high : low).members.push_back(j);
      }
      if (!low.members.empty()) next.push_back(std::move(low));
      if (!high.members.empty()) next.push_back(std::move(high));
    }
    std::sort(next.begin(), next.end(),
              [](const PartitionClass& a, const PartitionClass& b) { return a.bits < b.bits; });
    if (next.empty()) break;
  }
  return tree;
}

VertexSignature SignatureWorkspace::vertex_signature(const Graph& g, Vertex root,
                                                     const SignatureParams& params) {
  params.validate();
  return params.depth <= 6 ? masked_signature(g, root, params) : listed_signature(g, root, params);
}

VertexSignature SignatureWorkspace::listed_signature(const Graph& g, Vertex root,
                                                     const SignatureParams& params) {
  const PartitionTree tree = partition_tree(g, root, params);
  const int m = params.depth;
  const double unit = params.np * (1.0 - params.p);
  VertexSignature sig;
  std::vector<Vertex> front;
  for (const auto& cls : tree.levels[m]) {
    front.clear();
    frontier(g, cls.members, m + 1, front);
    if (front.empty()) continue;
    std::uint64_t degree_total = 0;
    for (Vertex j : front) degree_total += g.degree(j) - 1;
    const double count = static_cast<double>(front.size());
    sig.entries.push_back(
        {cls.bits, static_cast<double>(degree_total) - count * params.np, unit * count});
  }
  return sig;
}

VertexSignature SignatureWorkspace::masked_signature(const Graph& g, Vertex root,
                                                     const SignatureParams& params) {
  const int m = params.depth;
  // mask_[w] for w at distance d <= m has bit s set iff w is in T_s^d. A
  // vertex at distance d+1 belongs to (s, sign) exactly when one of its
  // distance-d neighbors is in T_s^d, so its mask is the OR of those masks
  // moved to the +1 half when its degree clears np. The BFS accumulates the
  // OR while scanning; a vertex's mask is complete once it is dequeued.
  order_.clear();
  order_.push_back(root);
  level_[root] = 0;
  mask_[root] = 1;
  std::size_t frontier_begin = order_.size();
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const Vertex u = order_[head];
    const int d = level_[u];
    if (d == m + 1) {
      frontier_begin = head;
      break;
    }
    if (d > 0 && static_cast<double>(g.degree(u)) >= params.np) {
      mask_[u] <<= std::uint64_t{1} << (d - 1);
    }
    const std::uint64_t own = mask_[u];
    const auto next = static_cast<std::uint8_t>(d + 1);
    for (Vertex w : g.neighbors(u)) {
      if (level_[w] == kFar) {
        level_[w] = next;
        mask_[w] = own;
        order_.push_back(w);
      } else if (level_[w] == next) {
        mask_[w] |= own;
      }
    }
    frontier_begin = order_.size();
  }

  std::uint64_t count[64] = {};
  std::uint64_t degree_total[64] = {};
  for (std::size_t i = frontier_begin; i < order_.size(); ++i) {
    const Vertex w = order_[i];
    const std::uint64_t excess = g.degree(w) - 1;
    for (std::uint64_t bits = mask_[w]; bits != 0; bits &= bits - 1) {
      const int s = __builtin_ctzll(bits);
      ++count[s];
      degree_total[s] += excess;
    }
  }
  for (Vertex w : order_) level_[w] = kFar;

  const double unit = params.np * (1.0 - params.p);
  VertexSignature sig;
  const int keys = 1 << m;
  for (int s = 0; s < keys; ++s) {
    if (count[s] == 0) continue;
    const double c = static_cast<double>(count[s]);
    sig.entries.push_back(
        {static_cast<std::uint64_t>(s), static_cast<double>(degree_total[s]) - c * params.np,
         unit * c});
  }
  return sig;
}

VertexSignature listed_vertex_signature(const Graph& g, Vertex root,
                                        const SignatureParams& params) {
  params.validate();
  SignatureWorkspace ws(g.num_vertices());
  return ws.listed_signature(g, root, params);
}

PartitionTree partition_tree(const Graph& g, Vertex root, const SignatureParams& params) {
  SignatureWorkspace ws(g.num_vertices());
  return ws.partition_tree(g, root, params);
}

VertexSignature vertex_signature(const Graph& g, Vertex root, const SignatureParams& params) {
  SignatureWorkspace ws(g.num_vertices());
  return ws.vertex_signature(g, root, params);
}

VertexSignature vertex_signature(const Graph& g, Vertex root, int depth, std::size_t n, double p) {
  return vertex_signature(g, root, SignatureParams{depth, static_cast<double>(n) * p, p});
}

SignatureSet compute_signatures(const Graph& g, const SignatureParams& params, int threads) {
  params.validate();
  SignatureSet set;
  set.params = params;
  set.vertices.resize(g.num_vertices());
  parallel_for(
      g.num_vertices(), threads, [&] { return SignatureWorkspace(g.num_vertices()); },
      [&](SignatureWorkspace& ws, std::size_t i) {
        set.vertices[i] = ws.vertex_signature(g, static_cast<Vertex>(i), params);
      });
  return set;
}

int default_depth(std::size_t n) {
  if (n < 16) throw ParamError("default depth needs n >= 16, got " + std::to_string(n));
  return static_cast<int>(std::ceil(22.0 * std::log(std::log(static_cast<double>(n)))));
}

void write_signature_dump(std::ostream& os, const SignatureSet& set) {
  const auto old_precision = os.precision(17);
  os << "# depth " << set.params.depth << " np " << set.params.np << " p " << set.params.p
     << "\n";
  for (std::size_t i = 0; i < set.vertices.size(); ++i) {
    for (const auto& e : set.vertices[i].entries) {
      os << i << ' ' << ClassKey{set.params.depth, e.bits}.sign_string() << ' ' << e.f << ' '
         << e.v << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace ptmatch
