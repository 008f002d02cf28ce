#include "listlab/constellations.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "listlab/errors.hpp"
#include "listlab/rng.hpp"

namespace listlab {

double PeriodicConstellation::effective_radius() const {
  return std::pow(1.0 / (ball_volume(n, 1.0) * density()), 1.0 / n);
}

PeriodicConstellation sample_ic(double alpha, long M, int n,
                                std::mt19937_64& rng) {
  if (alpha <= 0 || M < 1 || n < 1)
    throw std::domain_error("sample_ic: invalid parameters");
  PeriodicConstellation ic;
  ic.alpha = alpha;
  ic.n = n;
  ic.points.resize(n, M);
  std::uniform_real_distribution<double> u(0.0, alpha);
  for (long j = 0; j < M; ++j)
    for (int i = 0; i < n; ++i) ic.points(i, j) = u(rng);
  return ic;
}

long ic_target_M(double alpha, int n, double N, double delta) {
  double reff_target = std::sqrt(n * N) * std::exp2(delta);
  double m = std::pow(alpha, n) / ball_volume(n, reff_target);
  return std::max(1L, std::lround(m));
}

double wrap_dist(const PeriodicConstellation& ic, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y) {
  double s = 0.0;
  for (int i = 0; i < ic.n; ++i) {
    double d = std::abs(x[i] - y[i]);
    d = std::fmod(d, ic.alpha);
    d = std::min(d, ic.alpha - d);
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<WrappedPoint> enumerate_in_wrapped_ball(
    const PeriodicConstellation& ic, const Eigen::VectorXd& center, double r) {
  if (r >= ic.alpha)
    throw std::domain_error(
        "enumerate_in_wrapped_ball: requires r < alpha (single-wrap range)");
  const double r_sq = r * r * (1.0 + kMembershipRelTol);
  std::vector<WrappedPoint> out;
  const int n = ic.n;
  std::vector<double> min_rem(n + 1, 0.0);  // lower bound on the tail cost
  Eigen::VectorXi shift(n);
  for (int j = 0; j < ic.points.cols(); ++j) {
    // nearest per-coordinate wrap plus its two neighbors covers every copy
    // within r < alpha (distinct copies of one representative can both land
    // in the ball once r >= alpha/2)
    std::vector<std::array<double, 3>> cost(n);
    std::vector<int> base(n);
    for (int i = 0; i < n; ++i) {
      double diff = center[i] - ic.points(i, j);
      base[i] = static_cast<int>(std::lround(diff / ic.alpha));
      double best = 1e300;
      for (int d = 0; d < 3; ++d) {
        double e = diff - (base[i] + d - 1) * ic.alpha;
        cost[i][d] = e * e;
        best = std::min(best, cost[i][d]);
      }
      min_rem[i] = best;
    }
    min_rem[n] = 0.0;
    for (int i = n - 1; i >= 0; --i) min_rem[i] += min_rem[i + 1];
    // depth-first over the 3^n shift choices with suffix-sum pruning
    std::vector<int> d(n, 0);
    std::vector<double> acc(n + 1, 0.0);
    int lvl = 0;
    while (lvl >= 0) {
      if (d[lvl] == 3) {
        d[lvl] = 0;
        --lvl;
        if (lvl >= 0) ++d[lvl];
        continue;
      }
      double s = acc[lvl] + cost[lvl][d[lvl]];
      if (s + min_rem[lvl + 1] > r_sq) {
        ++d[lvl];
        continue;
      }
      if (lvl == n - 1) {
        WrappedPoint wp;
        wp.index = j;
        wp.shift.resize(n);
        wp.point.resize(n);
        for (int i = 0; i < n; ++i) {
          wp.shift[i] = base[i] + d[i] - 1;
          wp.point[i] = ic.points(i, j) + wp.shift[i] * ic.alpha;
        }
        out.push_back(std::move(wp));
        ++d[lvl];
      } else {
        acc[lvl + 1] = s;
        ++lvl;
      }
    }
  }
  return out;
}

ListReport ic_list_size(const PeriodicConstellation& ic, double N,
                        SearchMode mode, double delta) {
  const double r = std::sqrt(ic.n * N);
  if (!(r < ic.alpha / 2.0))
    throw std::domain_error("ic_list_size: requires sqrt(nN) < alpha/2");
  if (mode == SearchMode::Exact) {
    // lift to all periodic copies that can fall within r of a cell center
    std::vector<Eigen::VectorXd> lifted;
    Eigen::VectorXi k = Eigen::VectorXi::Constant(ic.n, -1);
    for (;;) {
      for (int j = 0; j < ic.points.cols(); ++j) {
        Eigen::VectorXd p =
            ic.points.col(j) + ic.alpha * k.cast<double>();
        bool in_range = true;
        for (int i = 0; i < ic.n; ++i)
          if (p[i] <= -r || p[i] >= ic.alpha + r) in_range = false;
        if (in_range) lifted.push_back(p);
      }
      int i = ic.n - 1;
      while (i >= 0 && k[i] == 1) k[i--] = -1;
      if (i < 0) break;
      ++k[i];
    }
    Eigen::MatrixXd pts(ic.n, static_cast<int>(lifted.size()));
    for (int j = 0; j < pts.cols(); ++j) pts.col(j) = lifted[j];
    return worst_case_list_size(pts, r);
  }
  const double eps = r * delta / 3.0;
  Eigen::MatrixXd net = grid_net(ic.alpha, eps, ic.n);
  ListReport rep;
  rep.mode = SearchMode::NetApproximate;
  rep.radius = r;
  rep.slack = eps;
  for (int c = 0; c < net.cols(); ++c) {
    auto hits = enumerate_in_wrapped_ball(ic, net.col(c), r + eps);
    if (static_cast<int>(hits.size()) > rep.list_size) {
      rep.list_size = static_cast<int>(hits.size());
      rep.witness_center = net.col(c);
      rep.witness_members.clear();
      for (const auto& h : hits) rep.witness_members.push_back(h.index);
    }
  }
  return rep;
}

long ic_analytic_list(double delta) {
  double x = (3.0 / delta) * std::log2(12.0 / delta);
  return static_cast<long>(std::ceil(x - 1e-12)) - 1;
}

std::vector<Eigen::VectorXd> intersect_ball(const PeriodicConstellation& ic,
                                            double P) {
  const double R = std::sqrt(ic.n * P);
  const double r_sq = R * R * (1.0 + kMembershipRelTol);
  const long span = static_cast<long>(std::ceil(R / ic.alpha)) + 1;
  double cells = std::pow(2.0 * span + 1.0, ic.n);
  if (cells > 1e6)
    throw BudgetError("intersect_ball: ball spans too many periods");
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXi k = Eigen::VectorXi::Constant(ic.n, static_cast<int>(-span));
  for (;;) {
    for (int j = 0; j < ic.points.cols(); ++j) {
      Eigen::VectorXd p = ic.points.col(j) + ic.alpha * k.cast<double>();
      if (p.squaredNorm() <= r_sq) out.push_back(p);
    }
    int i = ic.n - 1;
    while (i >= 0 && k[i] == span) k[i--] = static_cast<int>(-span);
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

BallRateReport ball_rate_check(const PeriodicConstellation& ic, double P,
                               double delta) {
  BallRateReport rep;
  rep.count = static_cast<long>(intersect_ball(ic, P).size());
  rep.expected = std::pow(std::sqrt(ic.n * P) / ic.effective_radius(), ic.n);
  rep.in_band = std::abs(rep.count - rep.expected) <= delta * rep.expected;
  return rep;
}

PeriodicConstellation greedy_packing(double alpha, int n,
                                     double grid_resolution) {
  if (n > 5) throw std::domain_error("greedy_packing: n > 5 not supported");
  const long m = std::max(1L, std::lround(alpha / grid_resolution));
  const double g = alpha / static_cast<double>(m);
  long total = 1;
  for (int i = 0; i < n; ++i) total *= m;
  std::vector<char> covered(total, 0);
  const long w = static_cast<long>(std::floor(2.0 / g)) + 1;
  std::vector<Eigen::VectorXd> chosen;

  // precompute per-axis wrapped squared distances for offsets 0..m-1
  std::vector<double> axis_sq(m);
  for (long d = 0; d < m; ++d) {
    double dd = std::min(d, m - d) * g;
    axis_sq[d] = dd * dd;
  }

  std::vector<long> idx(n), off(n);
  for (long flat = 0; flat < total; ++flat) {
    if (covered[flat]) continue;
    long t = flat;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = t % m;
      t /= m;
    }
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p[i] = idx[i] * g;
    chosen.push_back(p);
    // mark everything within wrapped distance 2 (closed, small tolerance)
    for (int i = 0; i < n; ++i) off[i] = -w;
    for (;;) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += axis_sq[std::abs(off[i]) % m];
      if (s <= 4.0 + 1e-9) {
        long f = 0;
        for (int i = 0; i < n; ++i)
          f = f * m + (((idx[i] + off[i]) % m) + m) % m;
        covered[f] = 1;
      }
      int i = n - 1;
      while (i >= 0 && off[i] == w) off[i--] = -w;
      if (i < 0) break;
      ++off[i];
    }
  }
  PeriodicConstellation ic;
  ic.alpha = alpha;
  ic.n = n;
  ic.points.resize(n, static_cast<int>(chosen.size()));
  for (int j = 0; j < ic.points.cols(); ++j) ic.points.col(j) = chosen[j];
  return ic;
}

AwgnEstimate awgn_error_mc(const PeriodicConstellation& ic, double sigma2,
                           long trials, std::mt19937_64& rng) {
  const int n = ic.n;
  if (!(std::sqrt(n * sigma2) < ic.alpha / 2.0))
    throw std::domain_error("awgn_error_mc: noise too large for the period");
  std::uniform_int_distribution<int> pick(0, static_cast<int>(ic.size()) - 1);
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2));
  const long M = ic.size();
  AwgnEstimate est;
  est.trials = trials;
  Eigen::VectorXd y(n);
  for (long t = 0; t < trials; ++t) {
    const int x = pick(rng);
    double z_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      double zi = gauss(rng);
      y[i] = ic.points(i, x) + zi;
      z_sq += zi * zi;
    }
    const double thresh = z_sq * (1.0 - 1e-9);
    bool err = false;
    for (long j = 0; j < M && !err; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        double d = std::abs(y[i] - ic.points(i, j));
        if (d > ic.alpha - d) d = ic.alpha - d;
        s += d * d;
        if (s >= thresh) break;
      }
      if (s >= thresh) continue;
      // strictly closer than the transmitted point. For j == x the zero-wrap
      // copy sits at exactly z_sq >= thresh, so s < thresh can only come from
      // a wrapped copy, which is a genuinely different constellation point.
      err = true;
    }
    if (err) ++est.errors;
  }
  est.p_err = static_cast<double>(est.errors) / std::max(1L, trials);
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(std::max(1L, trials));
  const double phat = est.p_err;
  const double denom = 1.0 + z * z / nn;
  const double center = (phat + z * z / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
  est.wilson_lo = std::max(0.0, center - half);
  est.wilson_hi = std::min(1.0, center + half);
  return est;
}

}  // namespace listlab
