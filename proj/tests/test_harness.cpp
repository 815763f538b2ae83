#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccs/harness.hpp"

using namespace ccs;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/ccs_test_") + std::to_string(uint64_t(::getpid())) + "_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream out;
  out << file.rdbuf();
  return out.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(CCS_SIM_BINARY) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("defaults follow the reference configuration") {
  RunConfig c = parse_config({});
  CHECK(c.cases == std::vector<int>{1, 2, 3, 4});
  CHECK(c.trials == 100);
  CHECK(c.params.num_users == 100);
  CHECK(c.params.payload_bits == 128);
  CHECK(c.params.num_sections == 16);
  CHECK(c.params.section_bits == 16);
  CHECK(c.params.num_rows == 38400);
  CHECK(c.params.amp_iters == 10);
  REQUIRE(c.ebno_grid.size() == 13);
  CHECK(c.ebno_grid.front() == doctest::Approx(1.5));
  CHECK(c.ebno_grid.back() == doctest::Approx(4.5));
}

TEST_CASE("flags override defaults") {
  RunConfig c = parse_config({"--case", "4", "--ebno", "3.0", "--trials", "25"});
  CHECK(c.cases == std::vector<int>{4});
  REQUIRE(c.ebno_grid.size() == 1);
  CHECK(c.ebno_grid[0] == doctest::Approx(3.0));
  CHECK(c.trials == 25);
  CHECK(c.ebno_explicit);
}

TEST_CASE("grid parsing accepts ranges and lists") {
  std::vector<double> range = parse_ebno_grid("1.5:0.5:3.5");
  REQUIRE(range.size() == 5);
  CHECK(range[2] == doctest::Approx(2.5));
  std::vector<double> list = parse_ebno_grid("2,3.25,4");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == doctest::Approx(3.25));
  CHECK_THROWS_AS(parse_ebno_grid("nope"), ConfigError);
  CHECK_THROWS_AS(parse_ebno_grid("3:0:4"), ConfigError);
  CHECK_THROWS_AS(parse_ebno_grid("4:1:3"), ConfigError);
}

TEST_CASE("inconsistent section arithmetic is rejected by name") {
  try {
    parse_config({"--l", "16", "--v", "8", "--w", "128"});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("64") != std::string::npos);
  }
}

TEST_CASE("bad case ids are rejected") {
  CHECK_THROWS_AS(parse_config({"--case", "7"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"--case", "x"}), ConfigError);
  CHECK_THROWS_AS(parse_config({"--trials", "0"}), ConfigError);
}

TEST_CASE("config file values sit between defaults and flags") {
  std::string path = temp_path("config.ini");
  {
    std::ofstream file(path);
    file << "# sweep configuration\n";
    file << "trials=7\n";
    file << "case=2\n";
    file << "v=3\n";
    file << "w=24\n";
    file << "n=96\n";
    file << "k=2\n";
  }
  RunConfig c = parse_config({"--config", path, "--trials", "9"});
  CHECK(c.trials == 9);  // flag wins
  CHECK(c.cases == std::vector<int>{2});
  CHECK(c.params.section_bits == 3);
  CHECK(c.params.num_users == 2);
  std::remove(path.c_str());
}

TEST_CASE("csv formatting is stable") {
  std::vector<ResultRow> rows = {{3, 3.0, 100, 0.0862, 0.0028, 1.25, 7},
                                 {4, 3.0, 100, 0.0973, 0.003, 0.75, 7}};
  std::string csv = format_csv(rows);
  CHECK(csv ==
        "case,ebno_db,trials,pupe,stderr,mean_trial_seconds,seed\n"
        "3,3,100,0.0862,0.0028,1.25,7\n"
        "4,3,100,0.0973,0.003,0.75,7\n");
  CHECK(format_csv({}) == "case,ebno_db,trials,pupe,stderr,mean_trial_seconds,seed\n");
}

TEST_CASE("emit_results writes the file and rejects bad paths") {
  std::string path = temp_path("rows.csv");
  std::vector<ResultRow> rows = {{1, 2.5, 10, 0.5, 0.1, 0.25, 3}};
  emit_results(rows, path);
  CHECK(slurp(path) == format_csv(rows));
  std::remove(path.c_str());
  CHECK_THROWS_AS(emit_results(rows, "/nonexistent_dir/out.csv"), IoError);
}

TEST_CASE("toy sweep output is byte-stable without timing") {
  RunConfig c = parse_config({"--case", "1,4", "--ebno", "3.0,4.0", "--trials", "2", "--v", "3",
                              "--w", "24", "--n", "96", "--k", "2", "--no-timing", "--seed",
                              "3"});
  CHECK_FALSE(c.timing);
  std::vector<ResultRow> a = run_sweep(c);
  std::vector<ResultRow> b = run_sweep(c);
  REQUIRE(a.size() == 4);  // 2 cases x 2 grid points, case-major order
  CHECK(a[0].case_id == 1);
  CHECK(a[3].case_id == 4);
  CHECK(a[0].ebno_db == doctest::Approx(3.0));
  CHECK(a[1].ebno_db == doctest::Approx(4.0));
  CHECK(format_csv(a) == format_csv(b));
}

TEST_CASE("sweep values are thread-count invariant") {
  RunConfig c = parse_config({"--case", "3", "--ebno", "2.0", "--trials", "2", "--v", "3", "--w",
                              "24", "--n", "96", "--k", "3", "--no-timing"});
  c.threads = 1;
  std::vector<ResultRow> serial = run_sweep(c);
  c.threads = 3;
  std::vector<ResultRow> parallel = run_sweep(c);
  CHECK(format_csv(serial) == format_csv(parallel));
}

TEST_CASE("benchmark requires all four cases and positive trials") {
  RunConfig c = parse_config({"--case", "1,2,3", "--v", "3", "--w", "24", "--n", "96"});
  CHECK_THROWS_AS(benchmark_mode(c), std::invalid_argument);
}

TEST_CASE("toy benchmark normalizes case 1 to unity") {
  RunConfig c = parse_config({"--ebno", "3.0", "--trials", "2", "--v", "3", "--w", "24", "--n",
                              "96", "--k", "2"});
  std::vector<BenchRow> rows = benchmark_mode(c);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].case_id == 1);
  CHECK(rows[0].normalized == 1.0);
  for (const BenchRow& r : rows) CHECK(r.mean_trial_seconds >= 0.0);
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli("--l 16 --v 8 --w 128") == 2);          // config error
  CHECK(run_cli("--case 9") == 2);                      // config error
  CHECK(run_cli("--trials 0") == 2);                    // config error
  CHECK(run_cli("--case 1,2 --bench --trials 1 --v 3 --w 24 --n 96 --k 2") == 2);
  CHECK(run_cli("--case 1 --ebno 3 --trials 1 --v 3 --w 24 --n 96 --k 2 "
                "--out /nonexistent_dir/x.csv") == 3);  // io error
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--case 1 --ebno 3 --trials 1 --v 3 --w 24 --n 96 --k 2") == 0);
}

TEST_CASE("cli writes the csv it promises") {
  std::string path = temp_path("cli.csv");
  int code = run_cli("--case 4 --ebno 3 --trials 2 --v 3 --w 24 --n 96 --k 2 --seed 5 "
                     "--no-timing --out " + path);
  REQUIRE(code == 0);
  std::string first = slurp(path);
  CHECK(first.rfind("case,ebno_db,trials,pupe,stderr,mean_trial_seconds,seed\n", 0) == 0);
  CHECK(first.find("\n4,3,2,") != std::string::npos);
  int code2 = run_cli("--case 4 --ebno 3 --trials 2 --v 3 --w 24 --n 96 --k 2 --seed 5 "
                      "--no-timing --out " + path);
  REQUIRE(code2 == 0);
  CHECK(slurp(path) == first);  // byte-identical re-run
  std::remove(path.c_str());
}

TEST_SUITE_END();
