#include "ptmatch/refinement.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptmatch/errors.h"
#include "ptmatch/parallel.h"

namespace ptmatch {

void RefineParams::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ParamError("epsilon must lie in (0, 1], got " + std::to_string(epsilon));
  }
  if (!(threshold > 0.0)) throw ParamError("refinement threshold must be positive");
  if (rounds < 1) throw ParamError("refinement needs at least one round");
}

double default_epsilon(std::size_t n, double p) {
  const double np = static_cast<double>(n) * p;
  const double log_n = std::log(static_cast<double>(n));
  if (!(log_n > 0.0)) return 1.0;
  return std::clamp(np / log_n - 1.0, 0.05, 1.0);
}

RefineParams make_refine_params(std::size_t n, double p, double epsilon,
                                std::optional<int> rounds) {
  RefineParams r;
  r.n = n;
  r.p = p;
  r.epsilon = epsilon;
  r.threshold = epsilon * epsilon * p * static_cast<double>(n) / 512.0;
  r.rounds = rounds.value_or(
      n <= 1 ? 1 : static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))));
  r.validate();
  return r;
}

IntersectionCounts::Tallies IntersectionCounts::tally(double threshold) const {
  Tallies t{std::vector<std::uint32_t>(n, 0), std::vector<std::uint32_t>(n, 0)};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [ip, c] : rows[i]) {
      if (c < threshold) continue;
      ++t.row[i];
      ++t.col[ip];
    }
  }
  return t;
}

std::uint32_t IntersectionCounts::get(Vertex i, Vertex ip) const {
  const auto& row = rows[i];
  auto it = std::lower_bound(row.begin(), row.end(), ip,
                             [](const auto& e, Vertex v) { return e.first < v; });
  return it != row.end() && it->first == ip ? it->second : 0;
}

IntersectionCounts intersection_counts(const Graph& g_pi, const Graph& g_prime,
                                       const Matching& current, int threads) {
  const std::size_t n = g_pi.num_vertices();
  if (g_prime.num_vertices() != n || current.assign.size() != n) {
    throw InputError("intersection_counts: size mismatch");
  }
  // to_prime[u] is the G' label that the current matching sends to u.
  const std::vector<Vertex> to_prime = current.to_permutation().inverse();

  struct Scratch {
    std::vector<std::uint32_t> acc;
    std::vector<Vertex> touched;
  };
  IntersectionCounts out;
  out.n = n;
  out.rows.assign(n, {});
  parallel_for(
      n, threads, [n] { return Scratch{std::vector<std::uint32_t>(n, 0), {}}; },
      [&](Scratch& s, std::size_t i) {
        for (Vertex u : g_pi.neighbors(static_cast<Vertex>(i))) {
          for (Vertex ip : g_prime.neighbors(to_prime[u])) {
            if (s.acc[ip]++ == 0) s.touched.push_back(ip);
          }
        }
        std::sort(s.touched.begin(), s.touched.end());
        auto& row = out.rows[i];
        row.reserve(s.touched.size());
        for (Vertex ip : s.touched) {
          row.emplace_back(ip, s.acc[ip]);
          s.acc[ip] = 0;
        }
        s.touched.clear();
      });
  return out;
}

std::vector<Vertex> refine_round(const IntersectionCounts& counts, const RefineParams& params) {
  const auto tallies = counts.tally(params.threshold);
  std::vector<Vertex> partial(counts.n, kUnassigned);
  for (std::size_t i = 0; i < counts.rows.size(); ++i) {
    if (tallies.row[i] != 1) continue;
    for (const auto& [ip, c] : counts.rows[i]) {
      if (c >= params.threshold) {
        if (tallies.col[ip] == 1) partial[ip] = static_cast<Vertex>(i);
        break;
      }
    }
  }
  return partial;
}

namespace {

Matching extend(std::vector<Vertex> partial, const Matching& previous, ExtensionPolicy policy) {
  const std::size_t n = partial.size();
  std::vector<Origin> origin(n, Origin::kPeeled);
  if (policy == ExtensionPolicy::kKeepPrevious) {
    std::vector<char> row_used(n, 0);
    for (Vertex i : partial) {
      if (i != kUnassigned) row_used[i] = 1;
    }
    for (std::size_t ip = 0; ip < n; ++ip) {
      if (partial[ip] != kUnassigned) continue;
      const Vertex prev = previous.assign[ip];
      if (!row_used[prev]) {
        partial[ip] = prev;
        row_used[prev] = 1;
        origin[ip] = Origin::kExtended;
      }
    }
  }
  return extend_to_bijection(std::move(partial), std::move(origin));
}

}  // namespace

RefineResult refine_matching(const Graph& g_pi, const Graph& g_prime, const Matching& initial,
                             const RefineParams& params, const Permutation* truth) {
  params.validate();
  const std::size_t n = g_pi.num_vertices();
  if (g_prime.num_vertices() != n || initial.assign.size() != n) {
    throw InputError("refine_matching: size mismatch");
  }
  if (truth != nullptr && truth->size() != n) throw InputError("refine_matching: truth size");
  const Permutation bijective_check(initial.assign);

  RefineResult result;
  result.matching = initial;
  for (int round = 1; round <= params.rounds; ++round) {
    const IntersectionCounts counts = intersection_counts(g_pi, g_prime, result.matching,
                                                          params.threads);
    std::vector<Vertex> partial = refine_round(counts, params);
    RoundTrace rt;
    rt.round = round;
    rt.assigned = static_cast<std::size_t>(
        std::count_if(partial.begin(), partial.end(), [](Vertex v) { return v != kUnassigned; }));
    Matching next = extend(std::move(partial), result.matching, params.extension);
    if (truth != nullptr) rt.errors = matching_mismatches(next, *truth);
    result.trace.push_back(rt);
    const bool fixed_point = next.assign == result.matching.assign;
    result.matching = std::move(next);
    if (params.early_exit && fixed_point) {
      result.early_exit = round < params.rounds;
      break;
    }
  }
  return result;
}

}  // namespace ptmatch
