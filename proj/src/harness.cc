#include "ptmatch/harness.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "ptmatch/errors.h"
#include "ptmatch/model.h"
#include "ptmatch/parallel.h"
#include "ptmatch/pipeline.h"
#include "ptmatch/random.h"

namespace ptmatch {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string fmt_opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, double>) {
    return fmt(*v);
  } else if constexpr (std::is_same_v<T, bool>) {
    return *v ? "1" : "0";
  } else {
    return std::to_string(*v);
  }
}

template <class T>
std::optional<T> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    if constexpr (std::is_same_v<T, double>) {
      return std::stod(s);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (s != "0" && s != "1") throw InputError("bad boolean field '" + s + "'");
      return s == "1";
    } else if constexpr (std::is_same_v<T, int>) {
      return std::stoi(s);
    } else {
      return static_cast<T>(std::stoull(s));
    }
  } catch (const std::logic_error&) {
    throw InputError("bad numeric field '" + s + "'");
  }
}

template <class T>
T parse_req(const std::string& s) {
  auto v = parse_opt<T>(s);
  if (!v) throw InputError("missing required field");
  return *v;
}

}  // namespace

void SweepSpec::validate() const {
  if (n_values.empty() || np_factors.empty() || alphas.empty() || epsilons.empty() ||
      depths.empty() || ws.empty() || slacks.empty()) {
    throw ParamError("sweep grids must be nonempty");
  }
  if (trials < 1) throw ParamError("sweep needs trials >= 1");
}

std::string SweepSpec::fingerprint() const {
  std::ostringstream os;
  auto list = [&](const auto& xs) {
    os << '[';
    for (const auto& x : xs) {
      if constexpr (requires { x.has_value(); }) {
        os << fmt_opt(x) << ';';
      } else if constexpr (std::is_floating_point_v<std::decay_t<decltype(x)>>) {
        os << fmt(x) << ';';
      } else {
        os << x << ';';
      }
    }
    os << ']';
  };
  list(n_values);
  list(np_factors);
  list(alphas);
  list(epsilons);
  list(depths);
  list(ws);
  list(slacks);
  os << trials << '|' << base_seed << '|' << static_cast<int>(extension) << '|'
     << fmt_opt(regime_low) << '|' << fmt_opt(regime_r);
  char buf[17];
  std::uint64_t h = 0;
  for (char c : os.str()) h = splitmix64(h ^ static_cast<unsigned char>(c));
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<SweepCell> expand_cells(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepCell> cells;
  for (auto n : spec.n_values)
    for (auto f : spec.np_factors)
      for (auto a : spec.alphas)
        for (const auto& e : spec.epsilons)
          for (const auto& d : spec.depths)
            for (const auto& w : spec.ws)
              for (const auto& s : spec.slacks) {
                cells.push_back({cells.size(), n, f, a, e, d, w, s});
              }
  return cells;
}

const std::vector<std::string>& SweepRow::columns() {
  static const std::vector<std::string> cols = {
      "cell",          "trial",         "seed",         "status",          "error",
      "n",             "np_factor",     "alpha",        "p",               "depth",
      "w",             "w_clamped",     "slack",        "epsilon",         "refine_threshold",
      "rounds",        "regime_ok",     "b_nnz",        "b_mean_row",      "diag_hit_rate",
      "offdiag_rate",  "empty_support_pi", "empty_support_prime", "overlap_al", "mismatches_al",
      "overlap_ex",    "mismatches_ex", "exact"};
  return cols;
}

const std::vector<std::string>& SweepRow::timing_columns() {
  static const std::vector<std::string> cols = {"t_generate", "t_signatures", "t_comparison",
                                                "t_matching", "t_refinement", "t_total"};
  return cols;
}

std::vector<std::string> SweepRow::fields() const {
  return {std::to_string(cell),
          std::to_string(trial),
          std::to_string(seed),
          status,
          error,
          std::to_string(n),
          fmt(np_factor),
          fmt(alpha),
          fmt_opt(p),
          fmt_opt(depth),
          fmt_opt(w),
          fmt_opt(w_clamped),
          fmt_opt(slack),
          fmt_opt(epsilon),
          fmt_opt(refine_threshold),
          fmt_opt(rounds),
          fmt_opt(regime_ok),
          fmt_opt(b_nnz),
          fmt_opt(b_mean_row),
          fmt_opt(diag_hit_rate),
          fmt_opt(offdiag_rate),
          fmt_opt(empty_support_pi),
          fmt_opt(empty_support_prime),
          fmt_opt(overlap_al),
          fmt_opt(mismatches_al),
          fmt_opt(overlap_ex),
          fmt_opt(mismatches_ex),
          fmt_opt(exact)};
}

std::vector<std::string> SweepRow::timing_fields() const {
  return {fmt(t_generate), fmt(t_signatures), fmt(t_comparison),
          fmt(t_matching), fmt(t_refinement), fmt(t_total)};
}

SweepRow SweepRow::from_fields(const std::vector<std::string>& f) {
  const std::size_t base = columns().size();
  if (f.size() != base && f.size() != base + timing_columns().size()) {
    throw InputError("sweep row has " + std::to_string(f.size()) + " fields");
  }
  SweepRow r;
  r.cell = parse_req<std::size_t>(f[0]);
  r.trial = parse_req<int>(f[1]);
  r.seed = parse_req<std::uint64_t>(f[2]);
  r.status = f[3];
  r.error = f[4];
  r.n = parse_req<std::size_t>(f[5]);
  r.np_factor = parse_req<double>(f[6]);
  r.alpha = parse_req<double>(f[7]);
  r.p = parse_opt<double>(f[8]);
  r.depth = parse_opt<int>(f[9]);
  r.w = parse_opt<std::uint64_t>(f[10]);
  r.w_clamped = parse_opt<bool>(f[11]);
  r.slack = parse_opt<double>(f[12]);
  r.epsilon = parse_opt<double>(f[13]);
  r.refine_threshold = parse_opt<double>(f[14]);
  r.rounds = parse_opt<int>(f[15]);
  r.regime_ok = parse_opt<bool>(f[16]);
  r.b_nnz = parse_opt<std::size_t>(f[17]);
  r.b_mean_row = parse_opt<double>(f[18]);
  r.diag_hit_rate = parse_opt<double>(f[19]);
  r.offdiag_rate = parse_opt<double>(f[20]);
  r.empty_support_pi = parse_opt<std::size_t>(f[21]);
  r.empty_support_prime = parse_opt<std::size_t>(f[22]);
  r.overlap_al = parse_opt<double>(f[23]);
  r.mismatches_al = parse_opt<std::size_t>(f[24]);
  r.overlap_ex = parse_opt<double>(f[25]);
  r.mismatches_ex = parse_opt<std::size_t>(f[26]);
  r.exact = parse_opt<bool>(f[27]);
  if (f.size() > base) {
    r.t_generate = parse_req<double>(f[base + 0]);
    r.t_signatures = parse_req<double>(f[base + 1]);
    r.t_comparison = parse_req<double>(f[base + 2]);
    r.t_matching = parse_req<double>(f[base + 3]);
    r.t_refinement = parse_req<double>(f[base + 4]);
    r.t_total = parse_req<double>(f[base + 5]);
  }
  return r;
}

SweepRow run_trial(const SweepCell& cell, int trial, const SweepSpec& spec, int threads) {
  using Clock = std::chrono::steady_clock;
  SweepRow row;
  row.cell = cell.index;
  row.trial = trial;
  row.seed = spec.base_seed + static_cast<std::uint64_t>(trial);
  row.n = cell.n;
  row.np_factor = cell.np_factor;
  row.alpha = cell.alpha;
  try {
    const double log_n = std::log(static_cast<double>(cell.n));
    const double np = cell.np_factor * log_n;
    const double p = np / static_cast<double>(cell.n);
    row.p = p;
    if (spec.regime_low || spec.regime_r) {
      bool ok = true;
      if (spec.regime_low) ok = ok && np >= *spec.regime_low * log_n;
      if (spec.regime_r) {
        ok = ok && np <= std::pow(static_cast<double>(cell.n),
                                  1.0 / (*spec.regime_r * std::log(log_n)));
      }
      row.regime_ok = ok;
    }
    const ModelParams mp{cell.n, p, cell.alpha};
    mp.validate();

    const auto t0 = Clock::now();
    const CorrelatedInstance inst = sample_instance(mp, row.seed);
    row.t_generate = std::chrono::duration<double>(Clock::now() - t0).count();

    PipelineParams pp;
    pp.p = p;
    pp.depth = cell.depth;
    pp.w = cell.w;
    pp.slack = cell.slack;
    pp.epsilon = cell.epsilon;
    pp.seed = row.seed;
    pp.threads = threads;
    pp.extension = spec.extension;
    const PipelineResult res = match_exact(inst.g_pi, inst.g_prime, pp, &inst.pi);
    const ResolvedParams& r = res.provenance.params;
    row.depth = r.depth;
    row.w = r.w;
    row.w_clamped = r.w_clamped;
    row.slack = r.slack;
    row.epsilon = r.epsilon;
    row.refine_threshold = r.refine_threshold;
    row.rounds = r.rounds;

    const std::size_t n = cell.n;
    std::size_t hits = 0;
    for (Vertex i = 0; i < n; ++i) hits += res.b.get(inst.pi(i), i);
    row.b_nnz = res.b.nnz();
    row.b_mean_row = static_cast<double>(*row.b_nnz) / static_cast<double>(n);
    row.diag_hit_rate = static_cast<double>(hits) / static_cast<double>(n);
    row.offdiag_rate = n > 1 ? static_cast<double>(*row.b_nnz - hits) /
                                   (static_cast<double>(n) * static_cast<double>(n - 1))
                             : 0.0;
    row.empty_support_pi = res.provenance.empty_support_pi;
    row.empty_support_prime = res.provenance.empty_support_prime;
    row.overlap_al = overlap_fraction(res.almost_exact.to_permutation(), inst.pi);
    row.mismatches_al = matching_mismatches(res.almost_exact, inst.pi);
    row.overlap_ex = overlap_fraction(res.matching.to_permutation(), inst.pi);
    row.mismatches_ex = matching_mismatches(res.matching, inst.pi);
    row.exact = *row.mismatches_ex == 0;

    const StageTimings& t = res.provenance.timings;
    row.t_signatures = t.signatures;
    row.t_comparison = t.comparison;
    row.t_matching = t.matching;
    row.t_refinement = t.refinement;
    row.t_total = row.t_generate + t.total;
    row.status = "ok";
  } catch (const ParamError& e) {
    row.status = "param-error";
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> run_cell(const SweepCell& cell, const SweepSpec& spec, int threads) {
  std::vector<SweepRow> rows;
  for (int t = 0; t < spec.trials; ++t) rows.push_back(run_trial(cell, t, spec, threads));
  return rows;
}

void write_csv_record(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) os << ',';
    const std::string& f = fields[k];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      os << f;
      continue;
    }
    os << '"';
    for (char c : f) {
      if (c == '"') os << '"';
      os << c;
    }
    os << '"';
  }
  os << "\r\n";
}

std::vector<std::vector<std::string>> read_csv(std::istream& is) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    any = false;
  };
  while (is.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    any = true;
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (is.peek() == '\n') is.get(c);
      end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw InputError("csv: unterminated quoted field");
  if (any || !field.empty() || !record.empty()) end_record();
  return records;
}

void emit_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  write_csv_record(os, SweepRow::columns());
  for (const auto& r : rows) write_csv_record(os, r.fields());
  if (!os) throw IoError("csv write failed");
}

void emit_timings_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  std::vector<std::string> header = {"cell", "trial"};
  for (const auto& c : SweepRow::timing_columns()) header.push_back(c);
  write_csv_record(os, header);
  for (const auto& r : rows) {
    std::vector<std::string> f = {std::to_string(r.cell), std::to_string(r.trial)};
    for (auto& t : r.timing_fields()) f.push_back(std::move(t));
    write_csv_record(os, f);
  }
  if (!os) throw IoError("csv write failed");
}

SweepOutcome run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  const std::vector<SweepCell> cells = expand_cells(spec);
  if (options.output.empty()) throw ParamError("sweep needs an output path");
  const std::string journal_path =
      options.journal.empty() ? options.output + ".journal" : options.journal;
  const std::string tag = "# sweep " + spec.fingerprint();

  std::map<std::pair<std::size_t, int>, SweepRow> done;
  if (std::filesystem::exists(journal_path)) {
    std::string text;
    {
      std::ifstream in(journal_path, std::ios::binary);
      if (!in) throw IoError("cannot read journal " + journal_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    // A run killed mid-append leaves an unterminated record; drop it.
    if (!text.empty() && text.back() != '\n') {
      const auto cut = text.rfind('\n');
      text.resize(cut == std::string::npos ? 0 : cut + 1);
      std::filesystem::resize_file(journal_path, text.size());
    }
    std::istringstream in(text);
    std::string first;
    std::getline(in, first);
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (!text.empty() && first != tag) {
      throw ParamError("journal " + journal_path + " belongs to a different sweep");
    }
    for (const auto& rec : read_csv(in)) {
      if (rec.size() == 1 && rec[0].empty()) continue;
      SweepRow r = SweepRow::from_fields(rec);
      done[{r.cell, r.trial}] = std::move(r);
    }
  }

  std::ofstream journal(journal_path, std::ios::binary | std::ios::app);
  if (!journal) throw IoError("cannot open journal " + journal_path);
  if (done.empty() && std::filesystem::file_size(journal_path) == 0) {
    journal << tag << '\n';
    journal.flush();
  }

  std::vector<std::pair<std::size_t, int>> pending;
  for (const auto& c : cells) {
    for (int t = 0; t < spec.trials; ++t) {
      if (!done.count({c.index, t})) pending.emplace_back(c.index, t);
    }
  }
  SweepOutcome outcome;
  outcome.resumed = done.size();
  if (options.max_new_trials && *options.max_new_trials < pending.size()) {
    pending.resize(*options.max_new_trials);
  }

  std::vector<SweepRow> fresh(pending.size());
  std::mutex journal_mu;
  parallel_for(
      pending.size(), options.threads, [] { return 0; },
      [&](int&, std::size_t k) {
        const auto [cell, trial] = pending[k];
        fresh[k] = run_trial(cells[cell], trial, spec, 1);
        std::ostringstream line;
        std::vector<std::string> f = fresh[k].fields();
        for (auto& t : fresh[k].timing_fields()) f.push_back(std::move(t));
        write_csv_record(line, f);
        std::lock_guard lock(journal_mu);
        journal << line.str();
        journal.flush();
      });
  if (!journal) throw IoError("journal write failed");
  outcome.computed = fresh.size();
  for (auto& r : fresh) done[{r.cell, r.trial}] = std::move(r);

  outcome.complete = done.size() == cells.size() * static_cast<std::size_t>(spec.trials);
  for (auto& [key, row] : done) outcome.rows.push_back(row);
  if (!outcome.complete) return outcome;

  std::ofstream out(options.output, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + options.output);
  emit_csv(out, outcome.rows);
  std::ofstream timings(options.output + ".timings.csv", std::ios::binary | std::ios::trunc);
  if (!timings) throw IoError("cannot write timings next to " + options.output);
  emit_timings_csv(timings, outcome.rows);
  return outcome;
}

}  // namespace ptmatch
