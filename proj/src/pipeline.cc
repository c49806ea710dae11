#include "ptmatch/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include "ptmatch/errors.h"
#include "ptmatch/random.h"
#include "ptmatch/signatures.h"

namespace ptmatch {

ResolvedParams resolve_params(const Graph& g_pi, const Graph& g_prime,
                              const PipelineParams& params) {
  if (g_pi.num_vertices() != g_prime.num_vertices()) {
    throw InputError("graphs differ in vertex count: " + std::to_string(g_pi.num_vertices()) +
                     " vs " + std::to_string(g_prime.num_vertices()));
  }
  ResolvedParams r;
  r.n = g_pi.num_vertices();
  if (r.n < 2) throw ParamError("pipeline needs at least two vertices");
  const double pairs = static_cast<double>(r.n) * static_cast<double>(r.n - 1);
  if (params.estimate_p) {
    // Mean of the two empirical edge densities.
    r.p = static_cast<double>(g_pi.num_edges() + g_prime.num_edges()) / pairs;
    r.p_estimated = true;
    if (!(r.p > 0.0)) throw ParamError("cannot estimate p from edgeless graphs");
  } else {
    if (!params.p) throw ParamError("p is required (or request estimation)");
    r.p = *params.p;
  }
  if (!(r.p > 0.0 && r.p <= 1.0)) throw ParamError("p must lie in (0, 1]");

  const double log_n = std::log(static_cast<double>(r.n));
  r.depth = params.depth ? *params.depth : default_depth(r.n);
  if (r.depth < 1 || r.depth > kMaxDepth) throw ParamError("depth must lie in [1, 64]");
  r.w_requested = params.w ? *params.w
                           : static_cast<std::uint64_t>(std::floor(std::pow(log_n, 5.0)));
  if (r.w_requested == 0) throw ParamError("w must be at least 1");
  r.w = r.w_requested;
  if (r.depth < 64 && r.w > (std::uint64_t{1} << (r.depth - 1))) {
    r.w = std::uint64_t{1} << (r.depth - 1);
    r.w_clamped = true;
  }
  r.slack = params.slack ? *params.slack : 1.0 / std::sqrt(log_n);
  if (!(r.slack >= 0.0 && r.slack < 1.0)) throw ParamError("slack must lie in [0, 1)");
  r.epsilon = params.epsilon ? *params.epsilon : default_epsilon(r.n, r.p);
  const RefineParams rp = make_refine_params(r.n, r.p, r.epsilon, params.rounds);
  r.refine_threshold = rp.threshold;
  if (params.refine_threshold) {
    if (!(*params.refine_threshold > 0.0)) throw ParamError("refine threshold must be positive");
    r.refine_threshold = *params.refine_threshold;
    r.refine_threshold_overridden = true;
  }
  r.rounds = rp.rounds;
  r.seed = params.seed;
  r.threads = std::max(1, params.threads);
  r.extension = params.extension;
  r.early_exit = params.early_exit;
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

PipelineResult run(const Graph& g_pi, const Graph& g_prime, const PipelineParams& params,
                   bool refine, const Permutation* truth) {
  const auto t0 = Clock::now();
  PipelineResult out;
  Provenance& prov = out.provenance;
  prov.params = resolve_params(g_pi, g_prime, params);
  const ResolvedParams& r = prov.params;

  const SignatureParams sp{r.depth, static_cast<double>(r.n) * r.p, r.p};
  RandomStream index_rng(r.seed, kStreamIndexSet);
  const IndexSet j = sample_index_set(r.depth, r.w, index_rng);
  const SignatureSet sig_pi = compute_signatures(g_pi, sp, r.threads);
  const SignatureSet sig_prime = compute_signatures(g_prime, sp, r.threads);
  const auto t1 = Clock::now();

  ComparisonResult cmp = compare_signatures(sig_pi, sig_prime, j, r.slack, r.threads);
  prov.index_set = cmp.j.keys;
  prov.index_set_clamped = cmp.j.clamped;
  prov.comparison_threshold = cmp.threshold;
  prov.empty_support_pi = cmp.empty_support_pi.size();
  prov.empty_support_prime = cmp.empty_support_prime.size();
  prov.b_nnz = cmp.b.nnz();
  const auto t2 = Clock::now();

  out.almost_exact = approximate_matching(cmp.b);
  for (Origin o : out.almost_exact.origin) prov.peeled += o == Origin::kPeeled;
  out.b = std::move(cmp.b);
  const auto t3 = Clock::now();

  if (refine) {
    RefineParams rp = make_refine_params(r.n, r.p, r.epsilon, r.rounds);
    rp.threshold = r.refine_threshold;
    rp.extension = r.extension;
    rp.early_exit = r.early_exit;
    rp.threads = r.threads;
    RefineResult rr = refine_matching(g_pi, g_prime, out.almost_exact, rp, truth);
    out.matching = std::move(rr.matching);
    prov.rounds = std::move(rr.trace);
  } else {
    out.matching = out.almost_exact;
  }
  const auto t4 = Clock::now();

  prov.timings.signatures = seconds(t0, t1);
  prov.timings.comparison = seconds(t1, t2);
  prov.timings.matching = seconds(t2, t3);
  prov.timings.refinement = seconds(t3, t4);
  prov.timings.total = seconds(t0, t4);
  return out;
}

}  // namespace

PipelineResult match_almost_exact(const Graph& g_pi, const Graph& g_prime,
                                  const PipelineParams& params) {
  return run(g_pi, g_prime, params, false, nullptr);
}

PipelineResult match_exact(const Graph& g_pi, const Graph& g_prime, const PipelineParams& params,
                           const Permutation* truth) {
  return run(g_pi, g_prime, params, true, truth);
}

void write_provenance(std::ostream& os, const Provenance& prov) {
  const ResolvedParams& r = prov.params;
  const auto old_precision = os.precision(17);
  os << "n = " << r.n << '\n'
     << "p = " << r.p << '\n'
     << "p_estimated = " << r.p_estimated << '\n'
     << "depth = " << r.depth << '\n'
     << "w_requested = " << r.w_requested << '\n'
     << "w = " << r.w << '\n'
     << "w_clamped = " << r.w_clamped << '\n'
     << "slack = " << r.slack << '\n'
     << "epsilon = " << r.epsilon << '\n'
     << "refine_threshold = " << r.refine_threshold << '\n'
     << "refine_threshold_overridden = " << r.refine_threshold_overridden << '\n'
     << "rounds = " << r.rounds << '\n'
     << "extension = " << (r.extension == ExtensionPolicy::kArbitrary ? "arbitrary" : "keep-previous")
     << '\n'
     << "early_exit = " << r.early_exit << '\n'
     << "seed = " << r.seed << '\n'
     << "threads = " << r.threads << '\n'
     << "index_set_clamped = " << prov.index_set_clamped << '\n'
     << "index_set =";
  for (std::uint64_t k : prov.index_set) os << ' ' << ClassKey{r.depth, k}.sign_string();
  os << '\n'
     << "comparison_threshold = " << prov.comparison_threshold << '\n'
     << "empty_support_pi = " << prov.empty_support_pi << '\n'
     << "empty_support_prime = " << prov.empty_support_prime << '\n'
     << "b_nnz = " << prov.b_nnz << '\n'
     << "peeled = " << prov.peeled << '\n';
  for (const auto& t : prov.rounds) {
    os << "round." << t.round << ".assigned = " << t.assigned << '\n';
    if (t.errors) os << "round." << t.round << ".errors = " << *t.errors << '\n';
  }
  os << "time.signatures = " << prov.timings.signatures << '\n'
     << "time.comparison = " << prov.timings.comparison << '\n'
     << "time.matching = " << prov.timings.matching << '\n'
     << "time.refinement = " << prov.timings.refinement << '\n'
     << "time.total = " << prov.timings.total << '\n';
  os.precision(old_precision);
}

}  // namespace ptmatch
