#include "ptmatch/model.h"

#include <cmath>
#include <string>

#include "ptmatch/errors.h"

namespace ptmatch {

void ModelParams::validate() const {
  if (n == 0) throw ParamError("n must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw ParamError("p must lie in (0, 1], got " + std::to_string(p));
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ParamError("alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
  // q = p / (1 - alpha) <= 1 with a few ulps of slack for alpha == 1 - p.
  if (q() > 1.0 + 1e-12) {
    throw ParamError("alpha > 1 - p gives parent edge probability q = " + std::to_string(q()) +
                     " > 1");
  }
}

Permutation::Permutation(std::vector<Vertex> forward)
    : forward_(std::move(forward)), inverse_(forward_.size()) {
  std::vector<char> hit(forward_.size(), 0);
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    const Vertex j = forward_[i];
    if (j >= forward_.size() || hit[j]) throw InputError("not a permutation");
    hit[j] = 1;
    inverse_[j] = static_cast<Vertex>(i);
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<Vertex> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<Vertex>(i);
  return Permutation(std::move(f));
}

Permutation Permutation::uniform(std::size_t n, RandomStream& rng) {
  std::vector<Vertex> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<Vertex>(i);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(f[i - 1], f[rng.below(i)]);
  }
  return Permutation(std::move(f));
}

namespace {

std::vector<Edge> sample_parent_pairs(std::size_t n, double q, RandomStream& rng) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      if (rng.bernoulli(q)) edges.emplace_back(u, v);
    }
  }
  return edges;
}

// Batagelj-Brandes geometric skipping over the lower triangle. Emits edges
// as (w, v) with w < v in the same lexicographic-by-v order the jumps visit.
std::vector<Edge> sample_parent_skip(std::size_t n, double q, RandomStream& rng) {
  std::vector<Edge> edges;
  if (q >= 1.0) return sample_parent_pairs(n, q, rng);
  const double log_miss = std::log1p(-q);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = rng.uniform();
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_miss));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
  }
  return edges;
}

std::vector<Edge> thin(const std::vector<Edge>& parent, double keep, RandomStream& rng) {
  std::vector<Edge> kept;
  kept.reserve(parent.size());
  for (const auto& e : parent) {
    if (rng.bernoulli(keep)) kept.push_back(e);
  }
  return kept;
}

}  // namespace

CorrelatedInstance sample_instance(const ModelParams& params, std::uint64_t seed,
                                   const SamplerOptions& options) {
  params.validate();
  const std::size_t n = params.n;
  const double q = std::min(1.0, params.q());
  const double keep = 1.0 - params.alpha;

  CorrelatedInstance inst;
  inst.params = params;
  inst.seed = seed;

  RandomStream parent_rng(seed, kStreamParent);
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  inst.skip_sampled = pairs > options.pair_budget;
  // Thinning walks the parent edges in canonical order so both paths feed
  // the thinning streams identically.
  const Graph g0 = Graph::from_edge_list(
      n, inst.skip_sampled ? sample_parent_skip(n, q, parent_rng)
                           : sample_parent_pairs(n, q, parent_rng));
  const std::vector<Edge> parent_edges = g0.to_edge_list();

  RandomStream thin_g(seed, kStreamThinG);
  RandomStream thin_gp(seed, kStreamThinGPrime);
  inst.g = Graph::from_edge_list(n, thin(parent_edges, keep, thin_g));
  inst.g_prime = Graph::from_edge_list(n, thin(parent_edges, keep, thin_gp));
  inst.g0 = g0;

  if (options.permutation == PermutationPolicy::kIdentity) {
    inst.pi = Permutation::identity(n);
  } else {
    RandomStream perm_rng(seed, kStreamPerm);
    inst.pi = Permutation::uniform(n, perm_rng);
  }
  inst.g_pi = apply_permutation(inst.g, inst.pi);
  inst.streams = {std::string(kStreamParent), std::string(kStreamThinG),
                  std::string(kStreamThinGPrime), std::string(kStreamPerm)};
  return inst;
}

Graph apply_permutation(const Graph& g, const Permutation& pi) {
  if (pi.size() != g.num_vertices()) {
    throw InputError("permutation size " + std::to_string(pi.size()) + " != graph size " +
                     std::to_string(g.num_vertices()));
  }
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const auto& [u, v] : g.to_edge_list()) edges.emplace_back(pi(u), pi(v));
  return Graph::from_edge_list(g.num_vertices(), edges);
}

double overlap_fraction(const Permutation& estimate, const Permutation& truth) {
  if (estimate.size() != truth.size()) throw InputError("permutation sizes differ");
  if (truth.size() == 0) return 1.0;
  std::size_t agree = 0;
  for (Vertex i = 0; i < truth.size(); ++i) agree += estimate(i) == truth(i);
  return static_cast<double>(agree) / static_cast<double>(truth.size());
}

}  // namespace ptmatch
