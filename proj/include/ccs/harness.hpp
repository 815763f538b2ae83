#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccs/params.hpp"

namespace ccs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<int> cases = {1, 2, 3, 4};
  std::vector<double> ebno_grid;  // populated by parse_config
  bool ebno_explicit = false;
  int trials = 100;
  uint64_t base_seed = 1;
  SystemParams params;
  std::string out_path;  // empty = stdout
  int threads = 0;       // 0 = hardware concurrency
  bool bench = false;
  bool timing = true;    // false zeroes the timing column for byte-stable output
};

struct ResultRow {
  int case_id = 0;
  double ebno_db = 0.0;
  int trials = 0;
  double pupe = 0.0;
  double stderr_pupe = 0.0;
  double mean_trial_seconds = 0.0;
  uint64_t seed = 0;
};

struct BenchRow {
  int case_id = 0;
  double mean_trial_seconds = 0.0;
  double normalized = 0.0;
};

// "a:b:c" range (start:step:stop, inclusive) or a comma list.
std::vector<double> parse_ebno_grid(const std::string& text);

// CLI flags override config-file values override defaults. Throws
// ConfigError naming the violated constraint.
RunConfig parse_config(const std::vector<std::string>& args);

std::string format_csv(const std::vector<ResultRow>& rows);
std::string format_bench_csv(const std::vector<BenchRow>& rows, double ebno_db, int trials);

// Writes CSV to the path (throws IoError when unwritable).
void emit_results(const std::vector<ResultRow>& rows, const std::string& path);

// One row per (case, grid point), ordered by case then Eb/N0.
std::vector<ResultRow> run_sweep(const RunConfig& config, bool progress = false);

// All four cases at one grid point (default 3.0 dB) with identical trial
// seeds; times are normalized by Case 1's. Requires cases = {1,2,3,4}.
std::vector<BenchRow> benchmark_mode(const RunConfig& config);

}  // namespace ccs
