#include "listlab/haar_poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "listlab/errors.hpp"

namespace listlab {

RogersSample rogers_sample(int n, double omega, std::mt19937_64& rng) {
  if (n < 2 || omega <= 0.0 || omega >= 1.0)
    throw std::domain_error("rogers_sample: need n >= 2 and omega in (0,1)");
  const double blowup = std::pow(omega, -(n - 1));
  if (blowup > 1e12)
    throw std::domain_error("rogers_sample: omega^{-(n-1)} exceeds 1e12 guard");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd thetas(n - 1);
  for (int i = 0; i < n - 1; ++i) thetas[i] = u(rng);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n - 1; ++j) {
    basis(j, j) = omega;
    basis(n - 1, j) = blowup * thetas[j];
  }
  basis(n - 1, n - 1) = blowup;
  RogersSample s{n, omega, thetas, Lattice(basis)};
  if (std::abs(s.lattice.det() - 1.0) > 1e-9)
    throw std::logic_error("rogers_sample: determinant is not 1");
  return s;
}

SiegelResult siegel_mc(int n, double omega, const Eigen::VectorXd& center,
                       double r, long samples, std::mt19937_64& rng) {
  if (samples < 1) throw std::domain_error("siegel_mc: samples >= 1");
  double sum = 0.0, sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    RogersSample rs = rogers_sample(n, omega, rng);
    long count = 0;
    for (const auto& a : rs.lattice.enumerate_coeffs_in_ball(center, r))
      if (!a.isZero()) ++count;
    sum += count;
    sum_sq += static_cast<double>(count) * count;
  }
  SiegelResult res;
  res.samples = samples;
  res.mean = sum / samples;
  double var = std::max(0.0, sum_sq / samples - res.mean * res.mean);
  res.se = std::sqrt(var / samples);
  return res;
}

double pois_pmf(double lambda, long k) {
  if (lambda < 0 || k < 0) throw std::domain_error("pois_pmf: bad arguments");
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

double pois_tail_exact(double lambda, long ell) {
  if (lambda < 0 || ell < 0)
    throw std::domain_error("pois_tail_exact: bad arguments");
  if (lambda == 0.0) return 0.0;
  // sum the upper tail directly; terms decay at least geometrically once
  // k > lambda, truncation below 1e-18 of the running sum
  double sum = 0.0;
  double term = pois_pmf(lambda, ell + 1);
  long k = ell + 1;
  while (true) {
    sum += term;
    ++k;
    term *= lambda / k;
    if (k > lambda && term < 1e-18 * (sum + 1e-300)) break;
    if (k > ell + 1000000) break;
  }
  return sum;
}

double pois_tail_bound(double lambda, double ell) {
  if (ell <= lambda)
    throw std::domain_error("pois_tail_bound: requires ell > lambda");
  if (lambda == 0.0) return 0.0;
  return std::exp(-lambda + ell * (1.0 + std::log(lambda) - std::log(ell)));
}

double pois_moment(double lambda, int k) {
  if (lambda < 0 || k < 0)
    throw std::domain_error("pois_moment: bad arguments");
  if (k == 0) return 1.0;
  if (lambda == 0.0) return 0.0;
  // log-domain series sum_{i>=1} exp(k ln i + i ln lambda - lambda - lgamma(i+1))
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logs;
  const double log_lambda = std::log(lambda);
  for (long i = 1;; ++i) {
    double lt = k * std::log(static_cast<double>(i)) + i * log_lambda -
                lambda - std::lgamma(i + 1.0);
    logs.push_back(lt);
    best = std::max(best, lt);
    if (i > lambda + k && lt < best - 60.0) break;
    if (i > 1000000) break;
  }
  double s = 0.0;
  for (double lt : logs) s += std::exp(lt - best);
  return s * std::exp(best);
}

double lambert_w_newton(double x) {
  if (x <= 0.0) throw std::domain_error("lambert_w_newton: requires x > 0");
  double w = (x < std::numbers::e) ? x / std::numbers::e
                                   : std::log(x) - std::log(std::log(x));
  for (int it = 0; it < 200; ++it) {
    double ew = std::exp(w);
    double f = w * ew - x;
    double step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
    w -= step;  // Halley
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

double lambert_w_estimate(double x) {
  if (x < std::numbers::e)
    throw std::domain_error("lambert_w_estimate: valid for x >= e");
  return std::log(x) - std::log(std::log(x));
}

namespace {

double pois_lambda_at_n(int n, double c3, double eps) {
  // lambda ~ (1 / (2 sqrt(pi n))) 2^{-c3 n sqrt(eps)}
  return std::exp2(-c3 * n * std::sqrt(eps)) /
         (2.0 * std::sqrt(std::numbers::pi * n));
}

}  // namespace

DistCalcTrace conditional_list_dist(const ChannelParams& channel, double c1) {
  DistCalcTrace t;
  const double delta = channel.delta;
  if (delta <= 0 || delta >= capacity(channel.P, channel.N))
    throw std::domain_error("conditional_list_dist: need 0 < delta < C");
  t.c1 = c1;
  t.eps = c1 * delta * delta;
  t.c3 = 1.0 / std::sqrt(channel.N) - 1.0 / std::sqrt(c1);
  if (t.c3 <= 0.0)
    throw std::domain_error("conditional_list_dist: c1 too small (c3 <= 0)");
  t.c2 = (std::sqrt(channel.P) + std::sqrt(channel.N) + std::sqrt(t.eps)) /
         std::sqrt(t.eps);
  t.lambda = pois_lambda_at_n(channel.n, t.c3, t.eps);
  const double slope = t.c3 * std::sqrt(c1) * delta;  // bits per unit L
  const double offset = std::log2(t.c2 / delta);
  t.L = static_cast<long>(std::floor(offset / slope)) + 1;
  t.exponent_at_L = slope * t.L - offset;
  t.exponent_at_L_minus_1 = slope * (t.L - 1) - offset;
  t.shape = t.L * delta / std::log2(1.0 / delta);
  return t;
}

MmtCalcTrace conditional_list_mmt(const ChannelParams& channel, double c,
                                  double c1, double margin) {
  if (c <= 0.0 || c >= 1.0)
    throw std::domain_error("conditional_list_mmt: need c in (0,1)");
  MmtCalcTrace t;
  const double delta = channel.delta;
  const double eps = c1 * delta * delta;
  const double c3 = 1.0 / std::sqrt(channel.N) - 1.0 / std::sqrt(c1);
  if (c3 <= 0.0)
    throw std::domain_error("conditional_list_mmt: c1 too small (c3 <= 0)");
  const double c2 =
      (std::sqrt(channel.P) + std::sqrt(channel.N) + std::sqrt(eps)) /
      std::sqrt(eps);
  t.a = 1.0 + 1.0 / c + margin;
  t.L = std::pow(1.0 / delta, t.a);
  t.lambda = pois_lambda_at_n(channel.n, c3, eps);
  const double k = c * channel.n;
  t.j_star = (k - 0.5) / lambert_w_newton((k - 0.5) / t.lambda);
  const double ln2 = std::numbers::ln2;
  t.D = c - c * std::log(c / (ln2 * c3 * std::sqrt(eps)));
  t.exponent = t.D + c * std::log(t.L / 2.0) - std::log(c2 / delta);
  // minimal L making the same expression positive
  double need = std::exp((std::log(c2 / delta) - t.D) / c) * 2.0;
  t.L_required = static_cast<long>(std::floor(need)) + 1;
  return t;
}

PoissonianityResult empirical_poissonianity(int n, double omega, double V,
                                            long samples,
                                            std::mt19937_64& rng) {
  if (V <= 0 || V > 20)
    throw std::domain_error("empirical_poissonianity: need 0 < V <= 20");
  const double r = std::pow(V / ball_volume(n, 1.0), 1.0 / n);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
  std::vector<long> hist;
  double sum = 0.0, sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    RogersSample rs = rogers_sample(n, omega, rng);
    long count = 0;
    for (const auto& a : rs.lattice.enumerate_coeffs_in_ball(origin, r))
      if (!a.isZero()) ++count;
    long half = count / 2;  // points come in +- pairs around the origin
    if (static_cast<long>(hist.size()) <= half) hist.resize(half + 1, 0);
    ++hist[half];
    sum += half;
    sum_sq += static_cast<double>(half) * half;
  }
  PoissonianityResult res;
  res.samples = samples;
  res.mean = sum / samples;
  res.second_moment = sum_sq / samples;
  const double lambda = V / 2.0;
  // total variation against Pois(lambda)
  double tv = 0.0;
  long kmax = static_cast<long>(hist.size()) + 50;
  for (long k = 0; k <= kmax; ++k) {
    double emp = (k < static_cast<long>(hist.size()))
                     ? static_cast<double>(hist[k]) / samples
                     : 0.0;
    tv += std::abs(emp - pois_pmf(lambda, k));
  }
  res.tv = 0.5 * tv;
  // chi-square with bins pooled to expected count >= 5
  double chi = 0.0;
  int bins = 0;
  double pool_obs = 0.0, pool_exp = 0.0;
  for (long k = 0;; ++k) {
    double pk = pois_pmf(lambda, k);
    double tail_rest = (k >= kmax) ? std::max(0.0, pois_tail_exact(lambda, k))
                                   : 0.0;
    pool_exp += samples * pk + samples * tail_rest;
    pool_obs += (k < static_cast<long>(hist.size())) ? hist[k] : 0;
    if (k >= kmax) {
      // close the final pooled bin
      if (pool_exp > 0) {
        chi += (pool_obs - pool_exp) * (pool_obs - pool_exp) / pool_exp;
        ++bins;
      }
      break;
    }
    if (pool_exp >= 5.0) {
      chi += (pool_obs - pool_exp) * (pool_obs - pool_exp) / pool_exp;
      ++bins;
      pool_obs = 0.0;
      pool_exp = 0.0;
    }
  }
  res.chi_sq = chi;
  res.chi_bins = bins;
  return res;
}

}  // namespace listlab
