#include "ccs/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "ccs/channel.hpp"

namespace ccs {

std::vector<double> parse_ebno_grid(const std::string& text) {
  std::vector<double> grid;
  try {
    if (text.find(':') != std::string::npos) {
      double start, step, stop;
      char extra;
      if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &step, &stop, &extra) != 3)
        throw ConfigError("ebno range must look like start:step:stop, got '" + text + "'");
      if (step <= 0.0) throw ConfigError("ebno range step must be positive");
      if (stop < start) throw ConfigError("ebno range stop must not precede start");
      for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    } else {
      size_t pos = 0;
      while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw ConfigError("bad ebno value '" + tok + "'");
        grid.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("could not parse ebno list '" + text + "'");
  }
  if (grid.empty()) throw ConfigError("ebno grid is empty");
  return grid;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig config;
  std::string ebno_text;
  std::string case_text;

  CLI::App app{"ccs_sim"};
  app.set_config("--config")->configurable(false);
  app.add_option("--case", case_text, "decoder cases to run, comma list from 1..4");
  app.add_option("--ebno", ebno_text, "Eb/N0 grid in dB: comma list or start:step:stop");
  app.add_option("--trials", config.trials, "Monte Carlo trials per grid point");
  app.add_option("--seed", config.base_seed, "base seed; trial i uses seed+i");
  app.add_option("--iters", config.params.amp_iters, "AMP iterations");
  app.add_option("--list-size", config.params.list_size, "per-section top list size (0 = K)");
  app.add_option("--beam-cap", config.params.beam_cap, "beam width cap (0 = 4K)");
  app.add_option("--out", config.out_path, "output CSV path (default: stdout)");
  app.add_option("--threads", config.threads, "worker threads (0 = hardware)");
  app.add_flag("--bench", config.bench, "run-time comparison at one grid point");
  app.add_flag("--timing,!--no-timing", config.timing,
               "--no-timing zeroes the timing column for byte-stable CSVs");
  app.add_option("--k", config.params.num_users, "active users");
  app.add_option("--w", config.params.payload_bits, "payload bits");
  app.add_option("--l", config.params.num_sections, "sections");
  app.add_option("--v", config.params.section_bits, "bits per section");
  app.add_option("--n", config.params.num_rows, "channel uses");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") throw;
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (!case_text.empty()) {
    config.cases.clear();
    size_t pos = 0;
    while (pos <= case_text.size()) {
      size_t comma = case_text.find(',', pos);
      std::string tok =
          case_text.substr(pos, comma == std::string::npos ? comma : comma - pos);
      try {
        size_t used = 0;
        int c = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        config.cases.push_back(c);
      } catch (const std::exception&) {
        throw ConfigError("config: bad case id '" + tok + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  std::sort(config.cases.begin(), config.cases.end());
  config.cases.erase(std::unique(config.cases.begin(), config.cases.end()), config.cases.end());
  if (config.cases.empty()) throw ConfigError("config: no cases selected");
  for (int c : config.cases)
    if (c < 1 || c > 4) throw ConfigError("config: case ids must be in 1..4");

  if (!ebno_text.empty()) {
    config.ebno_grid = parse_ebno_grid(ebno_text);
    config.ebno_explicit = true;
  } else {
    config.ebno_grid = parse_ebno_grid("1.5:0.25:4.5");
  }

  if (config.trials < 1) throw ConfigError("config: trials must be at least 1");
  if (config.threads < 0) throw ConfigError("config: threads must be nonnegative");
  try {
    config.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return config;
}

namespace {

std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

ThreadPool* make_pool(const RunConfig& config, std::unique_ptr<ThreadPool>& holder) {
  int threads = config.threads;
  if (threads == 0) threads = int(std::thread::hardware_concurrency());
  if (threads <= 1) return nullptr;
  holder = std::make_unique<ThreadPool>(threads);
  return holder.get();
}

}  // namespace

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = "case,ebno_db,trials,pupe,stderr,mean_trial_seconds,seed\n";
  for (const ResultRow& r : rows) {
    out += std::to_string(r.case_id) + ',' + format_g6(r.ebno_db) + ',' +
           std::to_string(r.trials) + ',' + format_g6(r.pupe) + ',' +
           format_g6(r.stderr_pupe) + ',' + format_g6(r.mean_trial_seconds) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string format_bench_csv(const std::vector<BenchRow>& rows, double ebno_db, int trials) {
  std::string out = "case,ebno_db,trials,mean_trial_seconds,normalized\n";
  for (const BenchRow& r : rows) {
    out += std::to_string(r.case_id) + ',' + format_g6(ebno_db) + ',' +
           std::to_string(trials) + ',' + format_g6(r.mean_trial_seconds) + ',' +
           format_g6(r.normalized) + '\n';
  }
  return out;
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << format_csv(rows);
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

std::vector<ResultRow> run_sweep(const RunConfig& config, bool progress) {
  std::unique_ptr<ThreadPool> holder;
  ThreadPool* pool = make_pool(config, holder);
  std::vector<ResultRow> rows;
  for (int case_id : config.cases) {
    for (double ebno : config.ebno_grid) {
      if (progress)
        std::fprintf(stderr, "case %d  ebno %.2f dB  (%d trials)...\n", case_id, ebno,
                     config.trials);
      PointResult point =
          run_point(case_id, ebno, config.trials, config.base_seed, config.params, pool);
      ResultRow row;
      row.case_id = case_id;
      row.ebno_db = ebno;
      row.trials = config.trials;
      row.pupe = point.mean_pupe;
      row.stderr_pupe = point.stderr_pupe;
      row.mean_trial_seconds = config.timing ? point.mean_decode_seconds : 0.0;
      row.seed = config.base_seed;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<BenchRow> benchmark_mode(const RunConfig& config) {
  std::set<int> wanted(config.cases.begin(), config.cases.end());
  if (wanted != std::set<int>{1, 2, 3, 4})
    throw std::invalid_argument("benchmark: all four cases must be enabled");
  if (config.trials < 1) throw std::invalid_argument("benchmark: need at least one trial");
  double ebno = config.ebno_explicit ? config.ebno_grid.front() : 3.0;

  std::unique_ptr<ThreadPool> holder;
  ThreadPool* pool = make_pool(config, holder);
  std::vector<BenchRow> rows;
  for (int case_id : {1, 2, 3, 4}) {
    PointResult point =
        run_point(case_id, ebno, config.trials, config.base_seed, config.params, pool);
    rows.push_back({case_id, point.mean_decode_seconds, 0.0});
  }
  double base = rows.front().mean_trial_seconds;
  for (BenchRow& r : rows) r.normalized = base > 0.0 ? r.mean_trial_seconds / base : 0.0;
  rows[0].normalized = 1.0;
  return rows;
}

}  // namespace ccs
