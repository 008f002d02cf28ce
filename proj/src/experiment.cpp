#include "listlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "listlab/constellations.hpp"
#include "listlab/construction_a.hpp"
#include "listlab/errors.hpp"
#include "listlab/geometry.hpp"
#include "listlab/haar_poisson.hpp"
#include "listlab/rng.hpp"
#include "listlab/spherical.hpp"

namespace listlab {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kExperiments = {
    "spherical-ls", "ca-ls",        "ic-ls",       "ic-goodness", "awgn",
    "haar-siegel",  "haar-poisson", "bounds-calc", "reduction-check"};

CsvRow base_row(const ExperimentConfig& cfg, long trial) {
  CsvRow r;
  r.experiment = cfg.experiment;
  r.n = cfg.n;
  r.P = cfg.P;
  r.N = cfg.N;
  r.delta = cfg.delta;
  r.seed = cfg.seed;
  r.trial = trial;
  r.extra = "{}";
  return r;
}

void push(std::vector<CsvRow>& rows, CsvRow base, const std::string& name,
          double value, const std::string& mode, std::string extra = "{}") {
  base.metric_name = name;
  base.metric_value = value;
  base.mode = mode;
  base.extra = std::move(extra);
  rows.push_back(std::move(base));
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

// ---- per-experiment trial bodies ----

std::vector<CsvRow> trial_spherical_ls(const ExperimentConfig& cfg, long t) {
  auto rng = make_rng(cfg.seed, "spherical-ls", t);
  ChannelParams ch = ChannelParams::make(cfg.n, cfg.P, cfg.N, cfg.delta);
  SphericalCode code = sample_spherical(cfg.n, cfg.P, ch.rate(), rng);
  const long budget = std::min(
      cfg.budget, static_cast<long>(cfg.extra_num("attack_budget", 2000)));
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  json extra = {{"M", code.size()}, {"attack_budget", budget}};
  push(rows, base, "list_lb_random_cap",
       spherical_list_mc(code, cfg.N, AttackStrategy::RandomCap, budget, rng)
           .list_size,
       "mc-lower", extra.dump());
  push(rows, base, "list_lb_codeword_seeded",
       spherical_list_mc(code, cfg.N, AttackStrategy::CodewordSeeded, budget,
                         rng)
           .list_size,
       "mc-lower", extra.dump());
  push(rows, base, "list_lb_meb_refined",
       spherical_list_mc(code, cfg.N, AttackStrategy::MebRefined, budget, rng)
           .list_size,
       "mc-lower", extra.dump());
  return rows;
}

std::vector<CsvRow> trial_ca_ls(const ExperimentConfig& cfg, long t) {
  auto rng = make_rng(cfg.seed, "ca-ls", t);
  ChannelParams ch = ChannelParams::make(cfg.n, cfg.P, cfg.N, cfg.delta);
  ConstructionAParams auto_params = select_params(ch);
  const long q = static_cast<long>(
      cfg.extra_num("q", static_cast<double>(auto_params.q)));
  const int kappa = static_cast<int>(
      cfg.extra_num("kappa", std::max(1, auto_params.kappa)));
  const double scale =
      cfg.extra_num("coarse_scale", 4.0 * std::sqrt(cfg.n * cfg.N));
  Lattice coarse = Lattice::cubic(cfg.n, scale);
  NestedListTrial res = nested_list_trial(q, kappa, cfg.delta,
                                          auto_params.alpha, coarse, cfg.N, rng);
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  json extra = {{"q", q}, {"kappa", kappa}, {"alpha", auto_params.alpha},
                {"coarse_scale", scale}};
  push(rows, base, "empirical_list", res.empirical_list, "exact", extra.dump());
  push(rows, base, "codebook_size", res.codebook_size, "exact", extra.dump());
  push(rows, base, "analytic_ell", static_cast<double>(res.ell), "analytic",
       extra.dump());
  push(rows, base, "log2_analytic_list", res.log2_analytic_list, "analytic",
       extra.dump());
  return rows;
}

std::vector<CsvRow> trial_ic_ls(const ExperimentConfig& cfg, long t) {
  auto rng = make_rng(cfg.seed, "ic-ls", t);
  const double alpha =
      cfg.extra_num("alpha_mult", 4.0) * std::sqrt(cfg.n * cfg.N);
  const long M = static_cast<long>(
      cfg.extra_num("M", static_cast<double>(
                             ic_target_M(alpha, cfg.n, cfg.N, cfg.delta))));
  PeriodicConstellation ic = sample_ic(alpha, M, cfg.n, rng);
  const std::string search = cfg.extra_str("search", "exact");
  SearchMode mode = (search == "net") ? SearchMode::NetApproximate
                                      : SearchMode::Exact;
  ListReport rep = ic_list_size(ic, cfg.N, mode, cfg.delta);
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  json extra = {{"alpha", alpha}, {"M", M}, {"slack", rep.slack}};
  push(rows, base, "list_size", rep.list_size,
       mode == SearchMode::Exact ? "exact" : "net-approximate", extra.dump());
  push(rows, base, "analytic_list",
       static_cast<double>(ic_analytic_list(cfg.delta)), "analytic",
       extra.dump());
  return rows;
}

std::vector<CsvRow> trial_ic_goodness(const ExperimentConfig& cfg, long t) {
  auto rng = make_rng(cfg.seed, "ic-goodness", t);
  const double alpha =
      cfg.extra_num("alpha_mult", 2.0) * std::sqrt(cfg.n * cfg.N);
  const long M = static_cast<long>(
      cfg.extra_num("M", static_cast<double>(
                             ic_target_M(alpha, cfg.n, cfg.N, cfg.delta))));
  PeriodicConstellation ic = sample_ic(alpha, M, cfg.n, rng);
  BallRateReport rep = ball_rate_check(ic, cfg.P, cfg.delta);
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  json extra = {{"alpha", alpha}, {"M", M}};
  push(rows, base, "ball_count", static_cast<double>(rep.count), "exact",
       extra.dump());
  push(rows, base, "ball_expected", rep.expected, "analytic", extra.dump());
  push(rows, base, "in_band", rep.in_band ? 1.0 : 0.0, "exact", extra.dump());
  return rows;
}

std::vector<CsvRow> trial_awgn(const ExperimentConfig& cfg, long t) {
  auto rng = make_rng(cfg.seed, "awgn", t);
  const double sigma2 = cfg.N;
  const double ratio = cfg.extra_num("reff_ratio", std::sqrt(2.0));
  const double reff = ratio * std::sqrt(cfg.n * sigma2);
  const double alpha = cfg.extra_num("alpha_over_reff", 1.45) * reff;
  const long M =
      std::max(1L, std::lround(std::pow(alpha / reff, cfg.n) /
                               ball_volume(cfg.n, 1.0)));
  const long mc_trials =
      std::min(cfg.budget, static_cast<long>(cfg.extra_num("mc_trials", 10000)));
  PeriodicConstellation ic = sample_ic(alpha, M, cfg.n, rng);
  AwgnEstimate est = awgn_error_mc(ic, sigma2, mc_trials, rng);
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  json extra = {{"alpha", alpha}, {"M", M}, {"mc_trials", mc_trials},
                {"reff_ratio", ratio}};
  push(rows, base, "p_err", est.p_err, "mc", extra.dump());
  push(rows, base, "wilson_lo", est.wilson_lo, "mc", extra.dump());
  push(rows, base, "wilson_hi", est.wilson_hi, "mc", extra.dump());
  return rows;
}

std::vector<CsvRow> trial_haar_siegel(const ExperimentConfig& cfg, long t) {
  auto rng = make_rng(cfg.seed, "haar-siegel", t);
  const double omega = cfg.extra_num("omega", 0.05);
  const double V = cfg.extra_num("V", 2.0);
  const long samples =
      std::min(cfg.budget, static_cast<long>(cfg.extra_num("samples", 1000)));
  const double r = std::pow(V / ball_volume(cfg.n, 1.0), 1.0 / cfg.n);
  SiegelResult res = siegel_mc(cfg.n, omega, Eigen::VectorXd::Zero(cfg.n), r,
                               samples, rng);
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  json extra = {{"omega", omega}, {"V", V}, {"samples", samples}};
  push(rows, base, "mean_nonzero", res.mean, "mc", extra.dump());
  push(rows, base, "se", res.se, "mc", extra.dump());
  return rows;
}

std::vector<CsvRow> trial_haar_poisson(const ExperimentConfig& cfg, long t) {
  auto rng = make_rng(cfg.seed, "haar-poisson", t);
  const double omega = cfg.extra_num("omega", 0.05);
  const double V = cfg.extra_num("V", 2.0);
  const long samples =
      std::min(cfg.budget, static_cast<long>(cfg.extra_num("samples", 1000)));
  PoissonianityResult res =
      empirical_poissonianity(cfg.n, omega, V, samples, rng);
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  json extra = {{"omega", omega}, {"V", V}, {"samples", samples}};
  push(rows, base, "tv_distance", res.tv, "mc", extra.dump());
  push(rows, base, "chi_square", res.chi_sq, "mc", extra.dump());
  push(rows, base, "mean_half_count", res.mean, "mc", extra.dump());
  push(rows, base, "second_moment", res.second_moment, "mc", extra.dump());
  return rows;
}

std::vector<CsvRow> trial_bounds_calc(const ExperimentConfig& cfg, long t) {
  ChannelParams ch = ChannelParams::make(cfg.n, cfg.P, cfg.N, cfg.delta);
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  push(rows, base, "L_threshold",
       capacity(cfg.P, cfg.N) / cfg.delta, "analytic");
  ConstructionAParams ca = select_params(ch);
  json ca_extra = {{"q", ca.q}, {"alpha", ca.alpha}, {"kappa", ca.kappa}};
  push(rows, base, "nested_ell",
       static_cast<double>(analytic_ell(cfg.delta, ca.alpha)), "analytic",
       ca_extra.dump());
  push(rows, base, "ic_analytic_list",
       static_cast<double>(ic_analytic_list(cfg.delta)), "analytic");
  const double c1 = cfg.extra_num("c1", 4.0 * cfg.N);
  DistCalcTrace dist = conditional_list_dist(ch, c1);
  json dist_extra = {{"c1", dist.c1}, {"c2", dist.c2}, {"c3", dist.c3},
                     {"lambda", dist.lambda}, {"shape", dist.shape}};
  push(rows, base, "dist_calc_L", static_cast<double>(dist.L), "analytic",
       dist_extra.dump());
  const double c = cfg.extra_num("c", 0.9);
  MmtCalcTrace mmt = conditional_list_mmt(ch, c, c1);
  json mmt_extra = {{"c", c}, {"D", mmt.D}, {"exponent", mmt.exponent},
                    {"j_star", mmt.j_star}};
  push(rows, base, "mmt_a", mmt.a, "analytic", mmt_extra.dump());
  push(rows, base, "mmt_L_required", static_cast<double>(mmt.L_required),
       "analytic", mmt_extra.dump());
  return rows;
}

std::vector<CsvRow> trial_reduction_check(const ExperimentConfig& cfg,
                                          long t) {
  auto rng = make_rng(cfg.seed, "reduction-check", t);
  const long M = static_cast<long>(cfg.extra_num("M", 10));
  Eigen::MatrixXd pts(cfg.n, M);
  for (long j = 0; j < M; ++j)
    pts.col(j) = uniform_ball(cfg.n, std::sqrt(cfg.n * cfg.P), rng);
  const double r = std::sqrt(cfg.n * cfg.N);
  int l_ball = worst_case_list_size(pts, r).list_size;
  SphericalCode proj = project_to_sphere(pts, cfg.P);
  int l_proj = worst_case_list_size(proj.points, r).list_size;
  long cones = cone_cover_count(cfg.P, cfg.N);
  std::vector<CsvRow> rows;
  CsvRow base = base_row(cfg, t);
  json extra = {{"M", M}, {"cone_count", cones}};
  push(rows, base, "list_ball", l_ball, "exact", extra.dump());
  push(rows, base, "list_projected", l_proj, "exact", extra.dump());
  push(rows, base, "reduction_ok",
       (l_proj <= cones * static_cast<long>(l_ball)) ? 1.0 : 0.0, "exact",
       extra.dump());
  return rows;
}

using TrialFn = std::vector<CsvRow> (*)(const ExperimentConfig&, long);

TrialFn lookup_trial(const std::string& name) {
  if (name == "spherical-ls") return trial_spherical_ls;
  if (name == "ca-ls") return trial_ca_ls;
  if (name == "ic-ls") return trial_ic_ls;
  if (name == "ic-goodness") return trial_ic_goodness;
  if (name == "awgn") return trial_awgn;
  if (name == "haar-siegel") return trial_haar_siegel;
  if (name == "haar-poisson") return trial_haar_poisson;
  if (name == "bounds-calc") return trial_bounds_calc;
  if (name == "reduction-check") return trial_reduction_check;
  throw ConfigError("experiment: unknown value '" + name + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  lookup_trial(experiment);
  if (n < 1) throw ConfigError("n: must be a positive integer");
  if (!(P > 0)) throw ConfigError("P: must be positive");
  if (!(N > 0)) throw ConfigError("N: must be positive");
  if (!(delta > 0)) throw ConfigError("delta: must be positive");
  if (trials < 0) throw ConfigError("trials: must be nonnegative");
  if (budget < 1) throw ConfigError("budget: must be positive");
  if (workers < 1) throw ConfigError("workers: must be positive");
}

double ExperimentConfig::extra_num(const std::string& key,
                                   double fallback) const {
  auto it = extras.find(key);
  if (it == extras.end()) return fallback;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + it->second + "'");
  }
}

std::string ExperimentConfig::extra_str(const std::string& key,
                                        const std::string& fallback) const {
  auto it = extras.find(key);
  return it == extras.end() ? fallback : it->second;
}

std::string format_double(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_line(const CsvRow& r) {
  std::ostringstream os;
  os << r.experiment << ',' << r.n << ',' << format_double(r.P) << ','
     << format_double(r.N) << ',' << format_double(r.delta) << ',' << r.seed
     << ',' << r.trial << ',' << r.metric_name << ','
     << format_double(r.metric_value) << ',' << r.mode << ','
     << csv_quote(r.extra);
  return os.str();
}

CsvRow parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 11)
    throw std::invalid_argument("parse_csv_line: expected 11 fields");
  CsvRow r;
  r.experiment = fields[0];
  r.n = std::stoi(fields[1]);
  r.P = std::stod(fields[2]);
  r.N = std::stod(fields[3]);
  r.delta = std::stod(fields[4]);
  r.seed = std::stoull(fields[5]);
  r.trial = std::stol(fields[6]);
  r.metric_name = fields[7];
  r.metric_value = std::stod(fields[8]);
  r.mode = fields[9];
  r.extra = fields[10];
  return r;
}

void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value) {
  auto num = [&](auto setter) {
    try {
      setter();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(key + ": invalid value '" + value + "'");
    }
  };
  if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "n") {
    num([&] { cfg.n = std::stoi(value); });
  } else if (key == "P") {
    num([&] { cfg.P = std::stod(value); });
  } else if (key == "N") {
    num([&] { cfg.N = std::stod(value); });
  } else if (key == "delta") {
    num([&] { cfg.delta = std::stod(value); });
  } else if (key == "seed") {
    num([&] { cfg.seed = std::stoull(value); });
  } else if (key == "trials") {
    num([&] { cfg.trials = std::stol(value); });
  } else if (key == "budget") {
    num([&] { cfg.budget = std::stol(value); });
  } else if (key == "workers") {
    num([&] { cfg.workers = std::stoi(value); });
  } else if (key == "out") {
    cfg.out_path = value;
  } else {
    cfg.extras[key] = value;
  }
}

void load_config_file(const std::string& path, ExperimentConfig& cfg,
                      std::vector<std::string>* overridden) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = line;
    if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
    auto trim = [](std::string& x) {
      x.erase(0, x.find_first_not_of(" \t\r"));
      x.erase(x.find_last_not_of(" \t\r") + 1);
    };
    trim(s);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    trim(key);
    trim(value);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (overridden) overridden->push_back(key);
    apply_key(cfg, key, value);
  }
}

const std::vector<std::string>& experiment_names() { return kExperiments; }

int run(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  TrialFn fn = lookup_trial(cfg.experiment);

  std::vector<std::vector<CsvRow>> results(
      static_cast<size_t>(std::max(0L, cfg.trials)));
  std::atomic<long> next{0};
  std::atomic<bool> budget_hit{false};
  auto work = [&] {
    for (;;) {
      long t = next.fetch_add(1);
      if (t >= cfg.trials) break;
      try {
        results[t] = fn(cfg, t);
      } catch (const BudgetError& e) {
        budget_hit = true;
        CsvRow r = base_row(cfg, t);
        r.metric_name = "budget_exceeded";
        r.metric_value = static_cast<double>(e.best_found);
        r.mode = "error";
        r.extra = json{{"what", e.what()}}.dump();
        results[t] = {r};
      }
    }
  };
  const int nthreads =
      static_cast<int>(std::min<long>(cfg.workers, std::max(1L, cfg.trials)));
  if (nthreads <= 1 || cfg.trials <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // config echo header (sorted keys), then the fixed column header
  std::map<std::string, std::string> echo;
  echo["experiment"] = cfg.experiment;
  echo["n"] = std::to_string(cfg.n);
  echo["P"] = format_double(cfg.P);
  echo["N"] = format_double(cfg.N);
  echo["delta"] = format_double(cfg.delta);
  echo["seed"] = std::to_string(cfg.seed);
  echo["trials"] = std::to_string(cfg.trials);
  echo["budget"] = std::to_string(cfg.budget);
  for (const auto& [k, v] : cfg.extras) echo[k] = v;
  for (const auto& [k, v] : echo) out << "# " << k << " = " << v << "\n";
  out << "experiment,n,P,N,delta,seed,trial,metric_name,metric_value,mode,"
         "extra\n";
  for (auto& rows : results) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const CsvRow& a, const CsvRow& b) {
                       return a.metric_name < b.metric_name;
                     });
    for (const auto& r : rows) out << csv_line(r) << "\n";
  }
  return budget_hit ? 3 : 0;
}

int run_to_output(const ExperimentConfig& cfg) {
  if (cfg.out_path.empty()) return run(cfg, std::cout);
  std::ofstream f(cfg.out_path, std::ios::binary);
  if (!f) throw ConfigError("out: cannot open file '" + cfg.out_path + "'");
  return run(cfg, f);
}

}  // namespace listlab
