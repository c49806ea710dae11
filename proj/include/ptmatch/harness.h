#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ptmatch/refinement.h"

namespace ptmatch {

// Parameter grid. Each optional-valued grid defaults to {nullopt}, meaning
// "use the pipeline default".
struct SweepSpec {
  std::vector<std::size_t> n_values;
  std::vector<double> np_factors;  // np = factor * ln n
  std::vector<double> alphas;
  std::vector<std::optional<double>> epsilons{std::nullopt};
  std::vector<std::optional<int>> depths{std::nullopt};
  std::vector<std::optional<std::uint64_t>> ws{std::nullopt};
  std::vector<std::optional<double>> slacks{std::nullopt};
  int trials = 1;
  std::uint64_t base_seed = 0;
  ExtensionPolicy extension = ExtensionPolicy::kArbitrary;
  // Optional declared regime: np >= regime_low * ln n and
  // np <= n^(1 / (regime_r ln ln n)). Recorded per row, never enforced.
  std::optional<double> regime_low;
  std::optional<double> regime_r;

  // Throws ParamError on an empty grid or trials < 1.
  void validate() const;
  // Stable digest of every field; guards journal reuse.
  std::string fingerprint() const;
};

struct SweepCell {
  std::size_t index = 0;
  std::size_t n = 0;
  double np_factor = 0.0;
  double alpha = 0.0;
  std::optional<double> epsilon;
  std::optional<int> depth;
  std::optional<std::uint64_t> w;
  std::optional<double> slack;
};

// Cartesian product in a fixed nesting order (n outermost).
std::vector<SweepCell> expand_cells(const SweepSpec& spec);

// One trial of one cell. Numeric fields that could not be computed (for a
// parameter error) are written as empty CSV fields.
struct SweepRow {
  std::size_t cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string status;  // "ok" or "param-error"
  std::string error;
  std::size_t n = 0;
  double np_factor = 0.0;
  double alpha = 0.0;
  std::optional<double> p;
  std::optional<int> depth;
  std::optional<std::uint64_t> w;
  std::optional<bool> w_clamped;
  std::optional<double> slack;
  std::optional<double> epsilon;
  std::optional<double> refine_threshold;
  std::optional<int> rounds;
  std::optional<bool> regime_ok;
  std::optional<std::size_t> b_nnz;
  std::optional<double> b_mean_row;
  std::optional<double> diag_hit_rate;
  std::optional<double> offdiag_rate;
  std::optional<std::size_t> empty_support_pi;
  std::optional<std::size_t> empty_support_prime;
  std::optional<double> overlap_al;
  std::optional<std::size_t> mismatches_al;
  std::optional<double> overlap_ex;
  std::optional<std::size_t> mismatches_ex;
  std::optional<bool> exact;
  // Wall-clock seconds. Not part of the deterministic CSV.
  double t_generate = 0.0;
  double t_signatures = 0.0;
  double t_comparison = 0.0;
  double t_matching = 0.0;
  double t_refinement = 0.0;
  double t_total = 0.0;

  static const std::vector<std::string>& columns();
  static const std::vector<std::string>& timing_columns();
  std::vector<std::string> fields() const;
  std::vector<std::string> timing_fields() const;
  // Inverse of fields() + timing_fields() concatenated. Throws InputError on
  // a malformed record.
  static SweepRow from_fields(const std::vector<std::string>& record);
};

// Runs trials with seeds base_seed + trial. Parameter errors become rows
// with status "param-error".
SweepRow run_trial(const SweepCell& cell, int trial, const SweepSpec& spec, int threads = 1);
std::vector<SweepRow> run_cell(const SweepCell& cell, const SweepSpec& spec, int threads = 1);

// Header + one line per row; RFC 4180 quoting.
void emit_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void emit_timings_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_csv_record(std::ostream& os, const std::vector<std::string>& fields);
// Parses RFC 4180 records (quoted fields may span lines).
std::vector<std::vector<std::string>> read_csv(std::istream& is);

struct SweepOptions {
  std::string output;   // CSV path; timings go to output + ".timings.csv"
  std::string journal;  // defaults to output + ".journal"
  int threads = 1;      // concurrent trials
  // Stop after this many newly computed trials (simulates an interruption;
  // the final CSV is only written once every trial is done).
  std::optional<std::size_t> max_new_trials;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;  // sorted by (cell, trial)
  std::size_t resumed = 0;
  std::size_t computed = 0;
  bool complete = false;
};

// Runs every (cell, trial), skipping pairs already in the journal. Throws
// IoError on file failures and ParamError if the journal was written for a
// different spec.
SweepOutcome run_sweep(const SweepSpec& spec, const SweepOptions& options);

}  // namespace ptmatch
