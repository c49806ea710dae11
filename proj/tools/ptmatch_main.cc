// ptmatch: command-line front end.
//
// Exit codes: 0 success, 2 parameter or input error, 3 I/O error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptmatch/comparison.h"
#include "ptmatch/errors.h"
#include "ptmatch/harness.h"
#include "ptmatch/io.h"
#include "ptmatch/matcher.h"
#include "ptmatch/model.h"
#include "ptmatch/pipeline.h"
#include "ptmatch/refinement.h"
#include "ptmatch/signatures.h"
#include "ptmatch/validation.h"

namespace fs = std::filesystem;
using namespace ptmatch;

namespace {

constexpr int kExitParam = 2;
constexpr int kExitIo = 3;

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string config;
};

// ---------------------------------------------------------------------------
// Config file: "key = value" per line, '#' starts a comment. Keys are long
// flag names without the dashes.

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

// Fills options left unset on the command line. Keys that match no option
// of the root or the active subcommand are rejected.
void apply_config(CLI::App& app, CLI::App* sub,
                  const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [key, value] : entries) {
    if (key == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr) throw ParamError("config: unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

// ---------------------------------------------------------------------------
// Helpers

template <typename T>
const T& need(const std::optional<T>& v, const char* flag) {
  if (!v) throw ParamError(std::string("missing required --") + flag);
  return *v;
}

const std::string& need(const std::string& v, const char* flag) {
  if (v.empty()) throw ParamError(std::string("missing required --") + flag);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

// Writes through `write` to the file at `path`, or to stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_out(path);
  write(out);
  finish(out, path);
}

template <typename T, typename Fn>
T read_file(const std::string& path, Fn&& read) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read(in);
}

ExtensionPolicy parse_extension(const std::string& s) {
  if (s == "arbitrary") return ExtensionPolicy::kArbitrary;
  if (s == "keep-previous") return ExtensionPolicy::kKeepPrevious;
  throw ParamError("--extension must be arbitrary or keep-previous");
}

// Graphs named by --instance DIR (g_pi.el, g_prime.el, instance.json) or by
// explicit edge-list paths.
struct GraphPair {
  Graph g_pi;
  Graph g_prime;
  std::optional<InstanceMetadata> meta;
};

GraphPair load_pair(const std::string& instance_dir, const std::string& g_pi_path,
                    const std::string& g_prime_path) {
  GraphPair pair;
  if (!instance_dir.empty()) {
    const fs::path dir(instance_dir);
    pair.g_pi = load_edge_list((dir / "g_pi.el").string());
    pair.g_prime = load_edge_list((dir / "g_prime.el").string());
    pair.meta = load_instance_json((dir / "instance.json").string());
    return pair;
  }
  pair.g_pi = load_edge_list(need(g_pi_path, "g-pi"));
  pair.g_prime = load_edge_list(need(g_prime_path, "g-prime"));
  return pair;
}

// Rebuilds the full instance (parent graph included) from instance.json.
CorrelatedInstance regenerate(const InstanceMetadata& meta) {
  for (auto policy : {PermutationPolicy::kUniform, PermutationPolicy::kIdentity}) {
    SamplerOptions opts;
    opts.permutation = policy;
    auto inst = sample_instance(meta.params, meta.seed, opts);
    if (inst.pi == meta.pi) return inst;
  }
  throw InputError("instance.json: permutation does not match its seed");
}

// ---------------------------------------------------------------------------
// Pipeline flags shared by compare, refine and run

struct StageFlags {
  std::string instance;
  std::string g_pi;
  std::string g_prime;
  std::optional<double> p;
  bool estimate_p = false;
  std::optional<int> m;
  std::optional<std::uint64_t> w;
  std::optional<double> slack;
  std::optional<double> epsilon;
  std::optional<int> rounds;
  std::optional<double> threshold;
  std::string extension = "arbitrary";
  bool no_early_exit = false;
};

void add_graph_flags(CLI::App* cmd, StageFlags& f) {
  cmd->add_option("--instance", f.instance, "Directory written by generate");
  cmd->add_option("--g-pi", f.g_pi, "Edge list of G^pi");
  cmd->add_option("--g-prime", f.g_prime, "Edge list of G'");
  cmd->add_option("--p", f.p, "Edge probability");
  cmd->add_flag("--estimate-p", f.estimate_p, "Estimate p from the edge counts");
}

void add_comparison_flags(CLI::App* cmd, StageFlags& f) {
  cmd->add_option("--m", f.m, "Signature depth");
  cmd->add_option("--w", f.w, "Half the index-set size");
  cmd->add_option("--slack", f.slack, "Comparison threshold is |J| (1 - slack)");
}

void add_refine_flags(CLI::App* cmd, StageFlags& f) {
  cmd->add_option("--epsilon", f.epsilon, "Refinement epsilon");
  cmd->add_option("--rounds", f.rounds, "Refinement rounds");
  cmd->add_option("--threshold", f.threshold, "Override the refinement count threshold");
  cmd->add_option("--extension", f.extension, "arbitrary | keep-previous");
  cmd->add_flag("--no-early-exit", f.no_early_exit, "Run every round");
}

PipelineParams pipeline_params(const StageFlags& f, const GraphPair& pair, const Globals& g) {
  PipelineParams pp;
  pp.p = f.p;
  if (!pp.p && !f.estimate_p && pair.meta) pp.p = pair.meta->params.p;
  pp.estimate_p = f.estimate_p;
  pp.depth = f.m;
  pp.w = f.w;
  pp.slack = f.slack;
  pp.epsilon = f.epsilon;
  pp.rounds = f.rounds;
  pp.refine_threshold = f.threshold;
  pp.seed = g.seed;
  pp.threads = g.threads;
  pp.extension = parse_extension(f.extension);
  pp.early_exit = !f.no_early_exit;
  return pp;
}

void warn_empty_support(std::size_t pi, std::size_t prime) {
  if (pi + prime == 0) return;
  std::cerr << "warning: " << pi << " G^pi and " << prime
            << " G' vertices have empty support on J and match each other\n";
}

void print_rounds(const std::vector<RoundTrace>& trace) {
  for (const auto& t : trace) {
    std::cout << "round " << t.round << " assigned " << t.assigned;
    if (t.errors) std::cout << " errors " << *t.errors;
    std::cout << '\n';
  }
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateFlags {
  std::optional<std::size_t> n;
  std::optional<double> p;
  double alpha = 0.0;
  bool identity = false;
  std::optional<std::uint64_t> pair_budget;
};

int cmd_generate(const GenerateFlags& f, const Globals& g) {
  ModelParams mp{need(f.n, "n"), need(f.p, "p"), f.alpha};
  SamplerOptions opts;
  if (f.identity) opts.permutation = PermutationPolicy::kIdentity;
  if (f.pair_budget) opts.pair_budget = *f.pair_budget;
  const auto inst = sample_instance(mp, g.seed, opts);
  const fs::path dir(g.out.empty() ? "." : g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  emit((dir / "instance.json").string(),
       [&](std::ostream& os) { write_instance_json(os, inst); });
  save_edge_list((dir / "g_pi.el").string(), inst.g_pi);
  save_edge_list((dir / "g_prime.el").string(), inst.g_prime);
  std::cout << "wrote " << dir.string() << ": n " << mp.n << " edges " << inst.g_pi.num_edges()
            << " " << inst.g_prime.num_edges() << '\n';
  return 0;
}

struct SignatureFlags {
  std::string graph;
  std::optional<double> p;
  std::optional<int> m;
  std::optional<double> np;
};

int cmd_signatures(const SignatureFlags& f, const Globals& g) {
  const Graph graph = load_edge_list(need(f.graph, "graph"));
  SignatureParams sp;
  sp.p = need(f.p, "p");
  sp.depth = f.m ? *f.m : default_depth(graph.num_vertices());
  sp.np = f.np ? *f.np : static_cast<double>(graph.num_vertices()) * sp.p;
  sp.validate();
  const auto set = compute_signatures(graph, sp, g.threads);
  emit(g.out, [&](std::ostream& os) { write_signature_dump(os, set); });
  return 0;
}

int cmd_compare(const StageFlags& f, const Globals& g) {
  const auto pair = load_pair(f.instance, f.g_pi, f.g_prime);
  const auto r = resolve_params(pair.g_pi, pair.g_prime, pipeline_params(f, pair, g));
  const SignatureParams sp{r.depth, static_cast<double>(r.n) * r.p, r.p};
  RandomStream index_rng(r.seed, kStreamIndexSet);
  const IndexSet j = sample_index_set(r.depth, r.w, index_rng);
  const auto sig_pi = compute_signatures(pair.g_pi, sp, r.threads);
  const auto sig_prime = compute_signatures(pair.g_prime, sp, r.threads);
  const auto cmp = compare_signatures(sig_pi, sig_prime, j, r.slack, r.threads);
  emit(g.out, [&](std::ostream& os) { write_candidate_matrix(os, cmp.b); });
  warn_empty_support(cmp.empty_support_pi.size(), cmp.empty_support_prime.size());
  std::ostream& log = g.out.empty() ? std::cerr : std::cout;
  log << "depth " << r.depth << " w " << r.w << (r.w_clamped ? " (clamped)" : "") << '\n';
  log << "J";
  for (auto k : cmp.j.keys) log << ' ' << k;
  log << '\n';
  log << "threshold " << cmp.threshold << '\n';
  log << "nnz " << cmp.b.nnz() << " empty_support " << cmp.empty_support_pi.size() << ' '
      << cmp.empty_support_prime.size() << '\n';
  return 0;
}

int cmd_match(const std::string& b_path, const Globals& g) {
  const auto b = read_file<CandidateMatrix>(need(b_path, "b"), read_candidate_matrix);
  const auto m = approximate_matching(b);
  emit(g.out, [&](std::ostream& os) { write_matching(os, m); });
  return 0;
}

int cmd_refine(const StageFlags& f, const std::string& matching_path, const std::string& truth_path,
               const Globals& g) {
  const auto pair = load_pair(f.instance, f.g_pi, f.g_prime);
  const auto initial = read_file<Matching>(need(matching_path, "matching"), read_matching);
  const auto r = resolve_params(pair.g_pi, pair.g_prime, pipeline_params(f, pair, g));
  RefineParams rp = make_refine_params(r.n, r.p, r.epsilon, r.rounds);
  rp.threshold = r.refine_threshold;
  rp.extension = r.extension;
  rp.early_exit = r.early_exit;
  rp.threads = r.threads;
  std::optional<Permutation> truth;
  if (!truth_path.empty()) {
    truth = load_instance_json(truth_path).pi;
  } else if (pair.meta) {
    truth = pair.meta->pi;
  }
  const auto result =
      refine_matching(pair.g_pi, pair.g_prime, initial, rp, truth ? &*truth : nullptr);
  emit(g.out, [&](std::ostream& os) { write_matching(os, result.matching); });
  if (!g.out.empty()) {
    std::cout << "threshold " << rp.threshold << " rounds " << rp.rounds << '\n';
    print_rounds(result.trace);
  }
  return 0;
}

int cmd_run(const StageFlags& f, bool almost_exact, const Globals& g) {
  const auto pair = load_pair(f.instance, f.g_pi, f.g_prime);
  const auto pp = pipeline_params(f, pair, g);
  const Permutation* truth = pair.meta ? &pair.meta->pi : nullptr;
  const auto result = almost_exact ? match_almost_exact(pair.g_pi, pair.g_prime, pp)
                                   : match_exact(pair.g_pi, pair.g_prime, pp, truth);
  emit(g.out, [&](std::ostream& os) { write_matching(os, result.matching); });
  warn_empty_support(result.provenance.empty_support_pi, result.provenance.empty_support_prime);
  if (g.out.empty()) return 0;
  emit(g.out + ".provenance.txt",
       [&](std::ostream& os) { write_provenance(os, result.provenance); });
  if (truth) {
    const auto perm = result.matching.to_permutation();
    std::cout << "overlap_al " << overlap_fraction(result.almost_exact.to_permutation(), *truth)
              << " overlap " << overlap_fraction(perm, *truth) << " exact "
              << (perm == *truth ? "yes" : "no") << '\n';
  }
  print_rounds(result.provenance.rounds);
  return 0;
}

struct SweepFlags {
  std::vector<std::size_t> n;
  std::vector<double> np;
  std::vector<double> alpha;
  std::vector<double> epsilon;
  std::vector<int> m;
  std::vector<std::uint64_t> w;
  std::vector<double> slack;
  int trials = 1;
  std::string extension = "arbitrary";
  std::optional<double> regime_low;
  std::optional<double> regime_r;
  std::string journal;
  std::optional<std::size_t> max_new_trials;
};

template <typename T>
std::vector<std::optional<T>> optional_grid(const std::vector<T>& values) {
  if (values.empty()) return {std::nullopt};
  return {values.begin(), values.end()};
}

int cmd_sweep(const SweepFlags& f, const Globals& g) {
  SweepSpec spec;
  spec.n_values = f.n;
  spec.np_factors = f.np;
  spec.alphas = f.alpha;
  spec.epsilons = optional_grid(f.epsilon);
  spec.depths = optional_grid(f.m);
  spec.ws = optional_grid(f.w);
  spec.slacks = optional_grid(f.slack);
  spec.trials = f.trials;
  spec.base_seed = g.seed;
  spec.extension = parse_extension(f.extension);
  spec.regime_low = f.regime_low;
  spec.regime_r = f.regime_r;
  spec.validate();
  SweepOptions opts;
  opts.output = need(g.out, "out");
  opts.journal = f.journal;
  opts.threads = g.threads;
  opts.max_new_trials = f.max_new_trials;
  const auto outcome = run_sweep(spec, opts);
  std::size_t errors = 0;
  for (const auto& row : outcome.rows) errors += row.status != "ok";
  std::cout << "rows " << outcome.rows.size() << " resumed " << outcome.resumed << " computed "
            << outcome.computed << " param_errors " << errors
            << (outcome.complete ? "" : " (incomplete)") << '\n';
  return 0;
}

struct DiagnoseFlags {
  std::string instance;
  std::optional<std::size_t> n;
  std::optional<double> p;
  double alpha = 0.0;
  int m = 2;
  double kappa = 0.1;
  double K = 2.0;
  double delta = 0.1;
};

int cmd_diagnose(const DiagnoseFlags& f, const Globals& g) {
  CorrelatedInstance inst;
  if (!f.instance.empty()) {
    inst = regenerate(load_instance_json((fs::path(f.instance) / "instance.json").string()));
  } else {
    inst = sample_instance({need(f.n, "n"), need(f.p, "p"), f.alpha}, g.seed);
  }
  const std::size_t n = inst.params.n;
  const double np = static_cast<double>(n) * inst.params.p;
  TypicalityParams tp{f.m, f.kappa, f.K, f.delta};
  const auto report = typicality_report(inst.g0, tp, n, inst.params.q(), g.threads);
  const auto overlap = class_overlap_stats(inst, f.m, np, f.kappa, g.threads);
  emit(g.out, [&](std::ostream& os) {
    write_csv_record(os, {"vertex", "A1", "A2", "A3", "A4", "A5", "A6", "typical", "tree_ball",
                          "min_class_overlap", "min_class_ratio"});
    for (Vertex i = 0; i < n; ++i) {
      const auto& v = report.vertices[i];
      std::vector<std::string> rec{std::to_string(i)};
      for (bool a : v.a) rec.push_back(a ? "1" : "0");
      rec.push_back(v.typical() ? "1" : "0");
      rec.push_back(overlap.tree_ball[i] ? "1" : "0");
      rec.push_back(std::to_string(overlap.min_overlap[i]));
      std::ostringstream ratio;
      ratio.precision(6);
      ratio << overlap.min_ratio[i];
      rec.push_back(ratio.str());
      write_csv_record(os, rec);
    }
  });
  std::ostream& log = g.out.empty() ? std::cerr : std::cout;
  log << "typical " << report.typical_count << "/" << n << " (" << report.fraction_typical
      << ")\n";
  for (int c = 0; c < 6; ++c) log << "A" << c + 1 << ' ' << report.condition_counts[c] << '\n';
  log << "class overlap reference " << overlap.reference << " tree vertices "
      << overlap.tree_vertices << " meeting " << overlap.tree_vertices_meeting_reference
      << " smallest " << overlap.smallest << " median " << overlap.median << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated Erdos-Renyi graph matching"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path (directory for generate)");
  app.add_option("--config", g.config, "key = value file; command-line flags win");

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Sample a correlated instance");
  generate->add_option("--n", gen.n, "Vertices");
  generate->add_option("--p", gen.p, "Edge probability of each child");
  generate->add_option("--alpha", gen.alpha, "Thinning probability")->capture_default_str();
  generate->add_flag("--identity", gen.identity, "Use the identity permutation");
  generate->add_option("--pair-budget", gen.pair_budget, "Largest pair count enumerated directly");

  SignatureFlags sig;
  auto* signatures = app.add_subcommand("signatures", "Dump the signatures of one graph");
  signatures->add_option("--graph", sig.graph, "Edge list");
  signatures->add_option("--p", sig.p, "Edge probability");
  signatures->add_option("--m", sig.m, "Depth");
  signatures->add_option("--np", sig.np, "Degree threshold (default n p)");

  StageFlags cmp_flags;
  auto* compare = app.add_subcommand("compare", "Build the candidate matrix");
  add_graph_flags(compare, cmp_flags);
  add_comparison_flags(compare, cmp_flags);

  std::string b_path;
  auto* match = app.add_subcommand("match", "Greedy matching from a candidate matrix");
  match->add_option("--b", b_path, "Candidate matrix written by compare");

  StageFlags ref_flags;
  std::string matching_path, truth_path;
  auto* refine = app.add_subcommand("refine", "Refine a matching");
  add_graph_flags(refine, ref_flags);
  add_refine_flags(refine, ref_flags);
  refine->add_option("--matching", matching_path, "Initial matching");
  refine->add_option("--truth", truth_path, "instance.json with the true permutation");

  StageFlags run_flags;
  bool almost_exact = false;
  auto* run = app.add_subcommand("run", "Full pipeline");
  add_graph_flags(run, run_flags);
  add_comparison_flags(run, run_flags);
  add_refine_flags(run, run_flags);
  run->add_flag("--almost-exact", almost_exact, "Stop before refinement");

  SweepFlags sw;
  auto* sweep = app.add_subcommand("sweep", "Parameter grid to CSV");
  sweep->add_option("--n", sw.n, "Vertex counts")->delimiter(',');
  sweep->add_option("--np", sw.np, "np as multiples of ln n")->delimiter(',');
  sweep->add_option("--alpha", sw.alpha, "Thinning probabilities")->delimiter(',');
  sweep->add_option("--epsilon", sw.epsilon, "Refinement epsilons")->delimiter(',');
  sweep->add_option("--m", sw.m, "Depths")->delimiter(',');
  sweep->add_option("--w", sw.w, "Index-set half sizes")->delimiter(',');
  sweep->add_option("--slack", sw.slack, "Comparison slacks")->delimiter(',');
  sweep->add_option("--trials", sw.trials, "Trials per cell")->capture_default_str();
  sweep->add_option("--extension", sw.extension, "arbitrary | keep-previous");
  sweep->add_option("--regime-low", sw.regime_low, "Flag rows with np < c ln n");
  sweep->add_option("--regime-r", sw.regime_r, "Flag rows with np > n^(1/(R ln ln n))");
  sweep->add_option("--journal", sw.journal, "Journal path (default <out>.journal)");
  sweep->add_option("--max-new-trials", sw.max_new_trials, "Stop after this many new trials");

  DiagnoseFlags diag;
  auto* diagnose = app.add_subcommand("diagnose", "Per-vertex typicality and class overlaps");
  diagnose->add_option("--instance", diag.instance, "Directory written by generate");
  diagnose->add_option("--n", diag.n, "Vertices (without --instance)");
  diagnose->add_option("--p", diag.p, "Edge probability (without --instance)");
  diagnose->add_option("--alpha", diag.alpha, "Thinning probability")->capture_default_str();
  diagnose->add_option("--m", diag.m, "Depth")->capture_default_str();
  diagnose->add_option("--kappa", diag.kappa)->capture_default_str();
  diagnose->add_option("--K", diag.K)->capture_default_str();
  diagnose->add_option("--delta", diag.delta)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParam;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!g.config.empty()) {
      try {
        apply_config(app, sub, read_config(g.config));
      } catch (const CLI::ParseError& e) {
        throw ParamError(std::string("config: ") + e.what());
      }
      if (g.threads < 1) throw ParamError("--threads must be positive");
    }
    if (sub == generate) return cmd_generate(gen, g);
    if (sub == signatures) return cmd_signatures(sig, g);
    if (sub == compare) return cmd_compare(cmp_flags, g);
    if (sub == match) return cmd_match(b_path, g);
    if (sub == refine) return cmd_refine(ref_flags, matching_path, truth_path, g);
    if (sub == run) return cmd_run(run_flags, almost_exact, g);
    if (sub == sweep) return cmd_sweep(sw, g);
    if (sub == diagnose) return cmd_diagnose(diag, g);
  } catch (const IoError& e) {
    std::cerr << "ptmatch: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParamError& e) {
    std::cerr << "ptmatch: " << e.what() << '\n';
    return kExitParam;
  } catch (const InputError& e) {
    std::cerr << "ptmatch: " << e.what() << '\n';
    return kExitParam;
  }
  return kExitParam;
}
