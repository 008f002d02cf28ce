#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "listlab/experiment.hpp"

using namespace listlab;

namespace {

ExperimentConfig bounds_cfg() {
  ExperimentConfig cfg;
  cfg.experiment = "bounds-calc";
  cfg.n = 100;
  cfg.P = 4.0;
  cfg.N = 1.0;
  cfg.delta = 0.1;
  cfg.seed = 7;
  cfg.trials = 1;
  return cfg;
}

std::string run_str(ExperimentConfig cfg, int* code = nullptr) {
  std::ostringstream os;
  int c = run(cfg, os);
  if (code) *code = c;
  return os.str();
}

}  // namespace

TEST_CASE("csv round trip and formatting") {
  CsvRow r;
  r.experiment = "ic-ls";
  r.n = 6;
  r.P = 4.0;
  r.N = 1.0;
  r.delta = 0.25;
  r.seed = 123456789012345ULL;
  r.trial = 3;
  r.metric_name = "list_size";
  r.metric_value = 0.1234567890123456789;
  r.mode = "exact";
  r.extra = "{\"alpha\":9.79795897113,\"note\":\"a,b\\\"c\"}";
  CsvRow back = parse_csv_line(csv_line(r));
  CHECK(back.experiment == r.experiment);
  CHECK(back.n == r.n);
  CHECK(back.P == r.P);
  CHECK(back.seed == r.seed);
  CHECK(back.trial == r.trial);
  CHECK(back.metric_name == r.metric_name);
  CHECK(back.metric_value == r.metric_value);  // exact via %.17g
  CHECK(back.mode == r.mode);
  CHECK(back.extra == r.extra);

  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-3.0) == "-3");
  CHECK(format_double(0.5) == "0.5");
  double v = 1.0 / 3.0;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("config validation names the offending field") {
  ExperimentConfig cfg = bounds_cfg();
  cfg.P = -1.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), "P: must be positive", ConfigError);
  cfg = bounds_cfg();
  cfg.experiment = "nope";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = bounds_cfg();
  cfg.n = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = bounds_cfg();
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config file parsing and flag precedence") {
  const char* path = "test_experiment_cfg.tmp";
  {
    std::ofstream f(path);
    f << "# comment line\n"
      << "experiment = bounds-calc\n"
      << "n = 100\n"
      << "P = 4.0   # trailing comment\n"
      << "N = 1.0\n"
      << "delta = 0.1\n"
      << "seed = 9\n"
      << "c = \"0.5\"\n";
  }
  ExperimentConfig cfg;
  load_config_file(path, cfg);
  CHECK(cfg.experiment == "bounds-calc");
  CHECK(cfg.n == 100);
  CHECK(cfg.P == 4.0);
  CHECK(cfg.seed == 9);
  CHECK(cfg.extra_num("c", 0.9) == 0.5);
  // a later apply_key (the flag path) overrides the file value
  apply_key(cfg, "delta", "0.2");
  CHECK(cfg.delta == 0.2);
  std::remove(path);

  CHECK_THROWS_AS(load_config_file("no_such_file.cfg", cfg), ConfigError);
  ExperimentConfig bad;
  CHECK_THROWS_AS(apply_key(bad, "n", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_key(bad, "trials", "xyz"), ConfigError);
}

TEST_CASE("extra_num rejects malformed values") {
  ExperimentConfig cfg = bounds_cfg();
  cfg.extras["c"] = "banana";
  CHECK_THROWS_AS(cfg.extra_num("c", 0.9), ConfigError);
  cfg.extras["c"] = "0.5";
  CHECK(cfg.extra_num("c", 0.9) == 0.5);
  CHECK(cfg.extra_num("missing", 7.0) == 7.0);
  CHECK(cfg.extra_str("missing", "dflt") == "dflt");
}

TEST_CASE("run is deterministic and worker-count independent") {
  ExperimentConfig cfg;
  cfg.experiment = "haar-siegel";
  cfg.n = 3;
  cfg.P = 4.0;
  cfg.N = 1.0;
  cfg.delta = 0.1;
  cfg.seed = 11;
  cfg.trials = 6;
  cfg.extras["samples"] = "40";
  cfg.extras["omega"] = "0.2";

  cfg.workers = 1;
  std::string one = run_str(cfg);
  std::string one_again = run_str(cfg);
  CHECK(one == one_again);
  cfg.workers = 2;
  CHECK(run_str(cfg) == one);
  cfg.workers = 8;
  CHECK(run_str(cfg) == one);

  // different seed changes the data rows
  cfg.workers = 1;
  cfg.seed = 12;
  CHECK(run_str(cfg) != one);
}

TEST_CASE("trials = 0 emits only the header") {
  ExperimentConfig cfg = bounds_cfg();
  cfg.trials = 0;
  std::string out = run_str(cfg);
  std::istringstream is(out);
  std::string line;
  int data_lines = 0;
  bool saw_columns = false;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0) continue;
    if (line.rfind("experiment,", 0) == 0) {
      saw_columns = true;
      continue;
    }
    ++data_lines;
  }
  CHECK(saw_columns);
  CHECK(data_lines == 0);
}

TEST_CASE("bounds-calc rows carry the analytic values") {
  int code = -1;
  std::string out = run_str(bounds_cfg(), &code);
  CHECK(code == 0);
  std::istringstream is(out);
  std::string line;
  bool saw_threshold = false, saw_dist = false, saw_mmt = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("experiment,", 0) == 0)
      continue;
    CsvRow r = parse_csv_line(line);
    CHECK(r.experiment == "bounds-calc");
    CHECK(r.trial == 0);
    if (r.metric_name == "L_threshold") {
      saw_threshold = true;
      CHECK(r.metric_value == doctest::Approx(10.0));
    }
    if (r.metric_name == "dist_calc_L") {
      saw_dist = true;
      CHECK(r.metric_value == 74.0);
    }
    if (r.metric_name == "mmt_a") saw_mmt = true;
  }
  CHECK(saw_threshold);
  CHECK(saw_dist);
  CHECK(saw_mmt);
}

TEST_CASE("header echoes the configuration") {
  ExperimentConfig cfg = bounds_cfg();
  cfg.extras["c"] = "0.5";
  std::string out = run_str(cfg);
  CHECK(out.find("# experiment = bounds-calc") != std::string::npos);
  CHECK(out.find("# seed = 7") != std::string::npos);
  CHECK(out.find("# c = 0.5") != std::string::npos);
}

TEST_CASE("every experiment runs one small trial") {
  for (const std::string& name : experiment_names()) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.n = 3;
    cfg.P = 4.0;
    cfg.N = 1.0;
    cfg.delta = 0.5;
    cfg.seed = 21;
    cfg.trials = 1;
    cfg.budget = 200000;
    cfg.extras["samples"] = "30";
    cfg.extras["mc_trials"] = "200";
    cfg.extras["attack_budget"] = "100";
    cfg.extras["omega"] = "0.2";
    if (name == "bounds-calc") {
      cfg.n = 100;
      cfg.delta = 0.1;
    }
    int code = -1;
    std::string out = run_str(cfg, &code);
    CAPTURE(name);
    CHECK((code == 0 || code == 3));
    CHECK(out.find("metric_name") != std::string::npos);
    // at least one data row
    CHECK(std::count(out.begin(), out.end(), '\n') > 2);
  }
}
