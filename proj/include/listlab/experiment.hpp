#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace listlab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  int n = 0;
  double P = 0.0;
  double N = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  long trials = 1;
  long budget = 5'000'000;  // node / sample cap passed to the library
  int workers = 1;
  std::string out_path;  // empty: standard output
  std::map<std::string, std::string> extras;  // experiment-specific keys

  void validate() const;  // throws ConfigError naming the offending field
  double extra_num(const std::string& key, double fallback) const;
  std::string extra_str(const std::string& key,
                        const std::string& fallback) const;
};

struct CsvRow {
  std::string experiment;
  int n = 0;
  double P = 0.0, N = 0.0, delta = 0.0;
  std::uint64_t seed = 0;
  long trial = 0;
  std::string metric_name;
  double metric_value = 0.0;
  std::string mode;
  std::string extra;  // JSON-encoded experiment-specific fields
};

// Deterministic round-trip formatting ('.' decimal separator, no locale).
std::string format_double(double v);
std::string csv_line(const CsvRow& row);
CsvRow parse_csv_line(const std::string& line);

// Flat key = value file (TOML-compatible subset: comments, quoted strings).
void load_config_file(const std::string& path, ExperimentConfig& cfg,
                      std::vector<std::string>* overridden = nullptr);
void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value);

const std::vector<std::string>& experiment_names();

// Runs all trials on a deterministic per-trial seed schedule; output is
// byte-identical for any worker count. Returns the process exit code:
// 0 success, 3 when some trial exhausted its budget (partial rows emitted).
int run(const ExperimentConfig& cfg, std::ostream& out);

// Convenience: honors cfg.out_path.
int run_to_output(const ExperimentConfig& cfg);

}  // namespace listlab
