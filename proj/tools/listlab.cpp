#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "listlab/errors.hpp"
#include "listlab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"List-decoding experiment runner"};
  app.require_subcommand(1);

  struct Flags {
    int n = 0;
    double P = 0.0, N = 0.0, delta = 0.0;
    std::uint64_t seed = 0;
    long trials = 1;
    long budget = 5'000'000;
    int workers = 1;
    std::string config, out;
    std::vector<std::string> set;  // extra key=value pairs
  } f;

  std::string chosen;
  for (const std::string& name : listlab::experiment_names()) {
    auto* sub = app.add_subcommand(name);
    sub->callback([&chosen, name] { chosen = name; });
    sub->add_option("--n", f.n, "dimension");
    sub->add_option("--P", f.P, "signal power");
    sub->add_option("--N", f.N, "noise power");
    sub->add_option("--delta", f.delta, "rate gap to capacity");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--trials", f.trials, "number of independent trials");
    sub->add_option("--config", f.config, "key = value config file");
    sub->add_option("--out", f.out, "output CSV path (default: stdout)");
    sub->add_option("--workers", f.workers, "worker thread count");
    sub->add_option("--budget", f.budget, "per-trial search/sample budget");
    sub->add_option("--set", f.set, "extra key=value parameter")
        ->expected(-1);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  listlab::ExperimentConfig cfg;
  cfg.experiment = chosen;
  try {
    if (!f.config.empty()) listlab::load_config_file(f.config, cfg);
    cfg.experiment = chosen;  // the subcommand always wins
    // command-line flags override file values
    auto* sub = app.get_subcommand(chosen);
    if (sub->count("--n")) cfg.n = f.n;
    if (sub->count("--P")) cfg.P = f.P;
    if (sub->count("--N")) cfg.N = f.N;
    if (sub->count("--delta")) cfg.delta = f.delta;
    if (sub->count("--seed")) cfg.seed = f.seed;
    if (sub->count("--trials")) cfg.trials = f.trials;
    if (sub->count("--budget")) cfg.budget = f.budget;
    if (sub->count("--workers")) cfg.workers = f.workers;
    if (sub->count("--out")) cfg.out_path = f.out;
    for (const std::string& kv : f.set) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw listlab::ConfigError("--set: expected key=value, got '" + kv +
                                   "'");
      listlab::apply_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return listlab::run_to_output(cfg);
  } catch (const listlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const listlab::BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
