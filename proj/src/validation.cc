#include "ptmatch/validation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "ptmatch/errors.h"
#include "ptmatch/parallel.h"
#include "ptmatch/signatures.h"

namespace ptmatch {

std::size_t edge_overlap(const Graph& g_pi, const Graph& g_prime, const Permutation& sigma) {
  if (sigma.size() != g_prime.num_vertices() || g_pi.num_vertices() != g_prime.num_vertices()) {
    throw InputError("edge_overlap: size mismatch");
  }
  std::size_t hits = 0;
  for (const auto& [u, v] : g_prime.to_edge_list()) hits += g_pi.has_edge(sigma(u), sigma(v));
  return hits;
}

BruteForceResult brute_force_best_matching(const Graph& g_pi, const Graph& g_prime) {
  const std::size_t n = g_prime.num_vertices();
  if (n > 9) throw ParamError("brute force limited to n <= 9, got " + std::to_string(n));
  if (g_pi.num_vertices() != n) throw InputError("brute force: graphs differ in size");
  std::uint16_t adj[9] = {};
  for (const auto& [u, v] : g_pi.to_edge_list()) {
    adj[u] |= static_cast<std::uint16_t>(1U << v);
    adj[v] |= static_cast<std::uint16_t>(1U << u);
  }
  const std::vector<Edge> edges = g_prime.to_edge_list();
  std::vector<Vertex> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<Vertex> best = sigma;
  std::size_t best_overlap = 0;
  bool first = true;
  // next_permutation enumerates in lexicographic order; strict improvement
  // keeps the earliest maximizer.
  do {
    std::size_t hits = 0;
    for (const auto& [u, v] : edges) hits += (adj[sigma[u]] >> sigma[v]) & 1U;
    if (first || hits > best_overlap) {
      best_overlap = hits;
      best = sigma;
      first = false;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return {Permutation(best), best_overlap};
}

void TypicalityParams::validate() const {
  if (m < 1) throw ParamError("typicality: m must be >= 1");
  if (!(kappa > 0.0 && kappa < 0.5)) throw ParamError("typicality: kappa must lie in (0, 1/2)");
  if (!(K > 1.0)) throw ParamError("typicality: K must exceed 1");
  if (!(delta > 0.0)) throw ParamError("typicality: delta must be positive");
}

VertexTypicality vertex_typicality(const Graph& g0, Vertex i, const TypicalityParams& params,
                                   double nq) {
  const int m = params.m;
  const double kappa = params.kappa;
  const double K = params.K;
  const SphereDecomposition sd = bfs_spheres(g0, i, m + 1);
  auto sphere = [&](int l) -> const std::vector<Vertex>& { return sd.layers[l]; };
  std::vector<std::pair<Vertex, int>> ball;
  for (int l = 0; l <= m + 1; ++l) {
    for (Vertex v : sphere(l)) ball.emplace_back(v, l);
  }
  std::sort(ball.begin(), ball.end());
  auto distance = [&](Vertex v) {
    auto it = std::lower_bound(ball.begin(), ball.end(), std::make_pair(v, -1));
    return it != ball.end() && it->first == v ? it->second : -1;
  };

  VertexTypicality t;
  t.a[0] = neighborhood_is_tree(g0, i, m + 1);

  t.a[1] = true;
  for (const auto& [v, l] : ball) {
    if (static_cast<double>(g0.degree(v)) > K * nq) {
      t.a[1] = false;
      break;
    }
  }

  t.a[2] = true;
  std::size_t ball_size = 1;
  for (int l = 1; l <= m; ++l) {
    const double s = static_cast<double>(sphere(l).size());
    ball_size += sphere(l).size();
    if (!(s > (1.0 - kappa) * nq * std::pow(3.0, l - 1)) ||
        !(static_cast<double>(ball_size) <= K * std::pow(nq, l))) {
      t.a[2] = false;
      break;
    }
  }

  t.a[3] = true;
  for (int l = 0; l <= m; ++l) {
    std::size_t low = 0;
    for (Vertex v : sphere(l)) low += !(static_cast<double>(g0.degree(v)) > (1.0 - kappa) * nq);
    const double allowed = kappa / (K * std::pow(3.0, l)) * static_cast<double>(sphere(l).size());
    if (static_cast<double>(low) > allowed) {
      t.a[3] = false;
      break;
    }
  }

  const double spread = params.delta * std::sqrt(nq);
  const double need = (0.5 - kappa) * nq;
  auto deviation_condition = [&](bool upper) {
    for (int l = 0; l < m; ++l) {
      std::size_t outside = 0;
      for (Vertex j : sphere(l)) {
        std::size_t count = 0;
        for (Vertex jp : g0.neighbors(j)) {
          if (distance(jp) != l + 1) continue;
          const double d = static_cast<double>(g0.degree(jp));
          count += upper ? d > nq + spread : d < nq - spread;
        }
        outside += !(static_cast<double>(count) >= need);
      }
      const double allowed = kappa / (K * std::pow(3.0, l)) * static_cast<double>(sphere(l).size());
      if (static_cast<double>(outside) > allowed) return false;
    }
    return true;
  };
  t.a[4] = deviation_condition(true);
  t.a[5] = deviation_condition(false);
  return t;
}

TypicalityReport typicality_report(const Graph& g0, const TypicalityParams& params, std::size_t n,
                                   double q, int threads) {
  params.validate();
  if (g0.num_vertices() != n) throw InputError("typicality: n does not match the graph");
  const double nq = static_cast<double>(n) * q;
  TypicalityReport report;
  report.vertices.resize(n);
  parallel_for(
      n, threads, [] { return 0; },
      [&](int&, std::size_t i) {
        report.vertices[i] = vertex_typicality(g0, static_cast<Vertex>(i), params, nq);
      });
  for (const auto& v : report.vertices) {
    for (int c = 0; c < 6; ++c) report.condition_counts[c] += v.a[c];
    report.typical_count += v.typical();
  }
  report.fraction_typical =
      n == 0 ? 0.0 : static_cast<double>(report.typical_count) / static_cast<double>(n);
  return report;
}

ClassOverlapStats class_overlap_stats(const CorrelatedInstance& instance, int m, double np,
                                      double kappa, int threads) {
  if (m < 1 || m > 63) throw ParamError("class overlap depth must lie in [1, 63]");
  const Graph g = apply_permutation(instance.g_pi, instance.pi.inverted());
  const Graph& gp = instance.g_prime;
  const std::size_t n = g.num_vertices();
  const SignatureParams sp{m, np, instance.params.p};
  const std::uint64_t keys = std::uint64_t{1} << m;

  ClassOverlapStats st;
  st.reference = std::pow(np / 2.0, m) * std::pow(1.0 - 8.0 * kappa, m);
  st.min_overlap.assign(n, 0);
  st.min_ratio.assign(n, 1.0);
  st.tree_ball.assign(n, 0);
  struct Workspaces {
    SignatureWorkspace a, b;
  };
  parallel_for(
      n, threads, [&] { return Workspaces{SignatureWorkspace(n), SignatureWorkspace(n)}; },
      [&](Workspaces& ws, std::size_t idx) {
        const Vertex i = static_cast<Vertex>(idx);
        const PartitionTree ta = ws.a.partition_tree(g, i, sp);
        const PartitionTree tb = ws.b.partition_tree(gp, i, sp);
        const auto& level = ta.levels[m];
        std::size_t smallest = std::numeric_limits<std::size_t>::max();
        double ratio = 1.0;
        for (const auto& cls : level) {
          const std::vector<Vertex>* other = tb.find(m, cls.bits);
          std::size_t common = 0;
          if (other != nullptr) {
            std::vector<Vertex> inter;
            std::set_intersection(cls.members.begin(), cls.members.end(), other->begin(),
                                  other->end(), std::back_inserter(inter));
            common = inter.size();
          }
          smallest = std::min(smallest, common);
          ratio = std::min(ratio, static_cast<double>(common) /
                                      static_cast<double>(cls.members.size()));
        }
        // A key with an empty class in G has zero overlap.
        if (level.size() < keys) smallest = 0;
        st.min_overlap[i] = smallest == std::numeric_limits<std::size_t>::max() ? 0 : smallest;
        st.min_ratio[i] = ratio;
        st.tree_ball[i] = neighborhood_is_tree(instance.g0, i, m + 1);
      });

  if (n > 0) {
    std::vector<std::size_t> sorted = st.min_overlap;
    std::sort(sorted.begin(), sorted.end());
    st.smallest = sorted.front();
    st.median = n % 2 ? static_cast<double>(sorted[n / 2])
                      : 0.5 * static_cast<double>(sorted[n / 2 - 1] + sorted[n / 2]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!st.tree_ball[i]) continue;
    ++st.tree_vertices;
    st.tree_vertices_meeting_reference += static_cast<double>(st.min_overlap[i]) >= st.reference;
  }
  return st;
}

DenseSignature naive_signature(const Graph& g, Vertex root, int m, double np, double p) {
  if (m < 1 || m > 12) throw ParamError("naive signature supports 1 <= m <= 12");
  const std::size_t n = g.num_vertices();
  // Plain BFS distances from the root.
  std::vector<int> dist(n, -1);
  std::vector<Vertex> queue{root};
  dist[root] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    for (Vertex w : g.neighbors(queue[h])) {
      if (dist[w] < 0) {
        dist[w] = dist[queue[h]] + 1;
        queue.push_back(w);
      }
    }
  }
  auto neighbors_at = [&](const std::set<Vertex>& cls, int d) {
    std::set<Vertex> out;
    for (Vertex u : cls) {
      for (Vertex w : g.neighbors(u)) {
        if (dist[w] == d) out.insert(w);
      }
    }
    return out;
  };
  std::vector<std::set<Vertex>> level{{root}};
  for (int k = 0; k < m; ++k) {
    std::vector<std::set<Vertex>> next(std::size_t{1} << (k + 1));
    for (std::size_t s = 0; s < level.size(); ++s) {
      for (Vertex j : neighbors_at(level[s], k + 1)) {
        const bool high = static_cast<double>(g.degree(j)) >= np;
        next[s | (high ? std::size_t{1} << k : 0)].insert(j);
      }
    }
    level = std::move(next);
  }
  DenseSignature sig;
  sig.f.assign(level.size(), 0.0);
  sig.v.assign(level.size(), 0.0);
  for (std::size_t s = 0; s < level.size(); ++s) {
    const std::set<Vertex> front = neighbors_at(level[s], m + 1);
    if (front.empty()) continue;
    std::uint64_t total = 0;
    for (Vertex j : front) total += g.degree(j) - 1;
    const double count = static_cast<double>(front.size());
    sig.f[s] = static_cast<double>(total) - count * np;
    sig.v[s] = np * (1.0 - p) * count;
  }
  return sig;
}

CandidateMatrix naive_comparison_matrix(const Graph& g_pi, const Graph& g_prime, double p, int m,
                                        const IndexSet& j, double slack) {
  const std::size_t n = g_pi.num_vertices();
  if (n > 256) throw ParamError("naive comparison limited to n <= 256");
  if (m > 12) throw ParamError("naive comparison limited to m <= 12");
  if (g_prime.num_vertices() != n) throw InputError("naive comparison: size mismatch");
  const double np = static_cast<double>(n) * p;
  std::vector<DenseSignature> a, b;
  for (Vertex i = 0; i < n; ++i) {
    a.push_back(naive_signature(g_pi, i, m, np, p));
    b.push_back(naive_signature(g_prime, i, m, np, p));
  }
  const double threshold = static_cast<double>(j.keys.size()) * (1.0 - slack);
  CandidateMatrix out;
  out.n = n;
  out.rows.assign(n, {});
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex ip = 0; ip < n; ++ip) {
      double sum = 0.0;
      for (std::uint64_t s : j.keys) {
        const double var = a[i].v[s] + b[ip].v[s];
        const double diff = a[i].f[s] - b[ip].f[s];
        if (var == 0.0) {
          sum += diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        } else {
          sum += diff * diff / var;
        }
      }
      if (sum < threshold) out.rows[i].push_back(ip);
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> naive_intersection_counts(const Graph& g_pi,
                                                                  const Graph& g_prime,
                                                                  const Matching& current) {
  const std::size_t n = g_pi.num_vertices();
  if (n > 64) throw ParamError("naive intersection counts limited to n <= 64");
  if (g_prime.num_vertices() != n || current.assign.size() != n) {
    throw InputError("naive intersection counts: size mismatch");
  }
  std::vector<std::vector<std::uint32_t>> counts(n, std::vector<std::uint32_t>(n, 0));
  for (Vertex i = 0; i < n; ++i) {
    // Preimage of N(i) under the current matching, as G' labels.
    std::set<Vertex> pre;
    for (Vertex v = 0; v < n; ++v) {
      if (g_pi.has_edge(i, current.assign[v])) pre.insert(v);
    }
    for (Vertex ip = 0; ip < n; ++ip) {
      std::uint32_t c = 0;
      for (Vertex v : pre) c += g_prime.has_edge(ip, v);
      counts[i][ip] = c;
    }
  }
  return counts;
}

std::vector<Vertex> naive_refine_round(const std::vector<std::vector<std::uint32_t>>& counts,
                                       double threshold) {
  const std::size_t n = counts.size();
  std::vector<Vertex> partial(n, kUnassigned);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ip = 0; ip < n; ++ip) {
      if (!(counts[i][ip] >= threshold)) continue;
      bool unique = true;
      for (std::size_t jp = 0; jp < n && unique; ++jp) {
        if (jp != ip && !(counts[i][jp] < threshold)) unique = false;
      }
      for (std::size_t j = 0; j < n && unique; ++j) {
        if (j != i && !(counts[j][ip] < threshold)) unique = false;
      }
      if (unique) partial[ip] = static_cast<Vertex>(i);
    }
  }
  return partial;
}

}  // namespace ptmatch
