#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "listlab/constellations.hpp"
#include "listlab/rng.hpp"

using namespace listlab;

namespace {

// Oracle: count copies over the wider shift box {-2..2}^n.
std::vector<Eigen::VectorXd> wide_shift_oracle(const PeriodicConstellation& ic,
                                               const Eigen::VectorXd& c,
                                               double r) {
  std::vector<Eigen::VectorXd> out;
  const double r_sq = r * r * (1.0 + kMembershipRelTol);
  Eigen::VectorXi k = Eigen::VectorXi::Constant(ic.n, -2);
  for (;;) {
    for (int j = 0; j < ic.points.cols(); ++j) {
      Eigen::VectorXd p = ic.points.col(j) + ic.alpha * k.cast<double>();
      if ((p - c).squaredNorm() <= r_sq) out.push_back(p);
    }
    int i = ic.n - 1;
    while (i >= 0 && k[i] == 2) k[i--] = -2;
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

std::multiset<std::vector<long long>> keyed(
    const std::vector<Eigen::VectorXd>& pts) {
  std::multiset<std::vector<long long>> out;
  for (const auto& p : pts) {
    std::vector<long long> k(p.size());
    for (int i = 0; i < p.size(); ++i) k[i] = std::llround(p[i] * 1e9);
    out.insert(k);
  }
  return out;
}

}  // namespace

TEST_CASE("sampling and effective radius") {
  auto rng = make_rng(21, "ic-sample", 0);
  PeriodicConstellation ic = sample_ic(4.0, 1, 2, rng);
  CHECK(ic.effective_radius() ==
        doctest::Approx(std::sqrt(16.0 / std::numbers::pi)).epsilon(1e-9));
  CHECK(ic.density() == doctest::Approx(1.0 / 16.0));
  for (int i = 0; i < 2; ++i) {
    CHECK(ic.points(i, 0) >= 0.0);
    CHECK(ic.points(i, 0) < 4.0);
  }
  // target M makes r_eff / sqrt(nN) = 2^delta up to rounding
  long M = ic_target_M(8.0, 2, 1.0, 0.5);
  PeriodicConstellation big = sample_ic(8.0, M, 2, rng);
  CHECK(big.effective_radius() / std::sqrt(2.0) ==
        doctest::Approx(std::exp2(0.5)).epsilon(0.15));
}

TEST_CASE("wrap distance") {
  PeriodicConstellation ic;
  ic.alpha = 4.0;
  ic.n = 2;
  Eigen::Vector2d x(0.1, 0.0), y(3.9, 0.0);
  CHECK(wrap_dist(ic, x, y) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(wrap_dist(ic, x, x) == doctest::Approx(0.0));
  // metric properties on random triples
  auto rng = make_rng(21, "ic-metric", 1);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::Vector2d a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    CHECK(wrap_dist(ic, a, b) == doctest::Approx(wrap_dist(ic, b, a)));
    CHECK(wrap_dist(ic, a, c) <=
          wrap_dist(ic, a, b) + wrap_dist(ic, b, c) + 1e-12);
  }
}

TEST_CASE("wrapped enumeration agrees with wider-shift oracle") {
  for (int inst = 0; inst < 10; ++inst) {
    auto rng = make_rng(22, "ic-enum", inst);
    PeriodicConstellation ic = sample_ic(4.0, 6, 2, rng);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    Eigen::Vector2d c(u(rng), u(rng));
    for (double r : {0.8, 1.7, 2.6, 3.5}) {
      auto fast = enumerate_in_wrapped_ball(ic, c, r);
      std::vector<Eigen::VectorXd> pts;
      for (const auto& h : fast) pts.push_back(h.point);
      CHECK(keyed(pts) == keyed(wide_shift_oracle(ic, c, r)));
    }
  }
  PeriodicConstellation ic;
  ic.alpha = 4.0;
  ic.n = 1;
  ic.points = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(
      enumerate_in_wrapped_ball(ic, Eigen::VectorXd::Zero(1), 4.0),
      std::domain_error);
}

TEST_CASE("list size: single point per cell") {
  auto rng = make_rng(23, "ic-ls1", 0);
  PeriodicConstellation ic = sample_ic(4.0, 1, 2, rng);
  // alpha = 4 sqrt(nN) with sqrt(nN) = 1
  ListReport rep = ic_list_size(ic, 0.5, SearchMode::Exact, 0.5);
  CHECK(rep.list_size == 1);
}

TEST_CASE("analytic list bound values") {
  CHECK(ic_analytic_list(0.5) == 27);   // ceil(6 log2 24) - 1 = 28 - 1
  CHECK(ic_analytic_list(0.25) == 67);  // ceil(12 log2 48) - 1
  CHECK(ic_analytic_list(1.0) == 10);   // ceil(3 log2 12) - 1
}

TEST_CASE("exact list size equals dense-grid oracle on n=2 instances") {
  for (int inst = 0; inst < 6; ++inst) {
    auto rng = make_rng(24, "ic-grid", inst);
    PeriodicConstellation ic = sample_ic(4.0, 8, 2, rng);
    const double r = 0.9;  // sqrt(nN) with N = 0.405
    ListReport exact = ic_list_size(ic, r * r / 2.0, SearchMode::Exact, 0.5);
    // oracle: 0.01-pitch grid over one period, wrapped counting with the
    // radius inflated by the grid half-diagonal (never undercounts)
    const double pitch = 0.01;
    const double slack = 0.5 * pitch * std::sqrt(2.0);
    int best = 0;
    for (double x = 0; x < 4.0; x += pitch)
      for (double y = 0; y < 4.0; y += pitch) {
        Eigen::Vector2d c(x, y);
        int cnt = static_cast<int>(
            enumerate_in_wrapped_ball(ic, c, r + slack).size());
        best = std::max(best, cnt);
      }
    CHECK(exact.list_size <= best);
    // and the oracle at deflated radius cannot beat the exact optimum
    int best_lo = 0;
    for (double x = 0; x < 4.0; x += pitch)
      for (double y = 0; y < 4.0; y += pitch) {
        Eigen::Vector2d c(x, y);
        best_lo = std::max(best_lo, static_cast<int>(
            enumerate_in_wrapped_ball(ic, c, r).size()));
      }
    CHECK(exact.list_size >= best_lo);
  }
}

TEST_CASE("net mode lower bounds exact at inflated radius") {
  auto rng = make_rng(25, "ic-net", 0);
  PeriodicConstellation ic = sample_ic(4.0, 10, 2, rng);
  ListReport net = ic_list_size(ic, 0.5, SearchMode::NetApproximate, 0.5);
  CHECK(net.mode == SearchMode::NetApproximate);
  CHECK(net.slack == doctest::Approx(1.0 * 0.5 / 3.0));
  CHECK(net.list_size >= 1);
}

TEST_CASE("translation invariance of exact list size") {
  auto rng = make_rng(26, "ic-shift", 0);
  PeriodicConstellation ic = sample_ic(4.0, 7, 2, rng);
  ListReport a = ic_list_size(ic, 0.4, SearchMode::Exact, 0.5);
  PeriodicConstellation moved = ic;
  for (int j = 0; j < moved.points.cols(); ++j)
    for (int i = 0; i < 2; ++i)
      moved.points(i, j) = std::fmod(moved.points(i, j) + 1.37, 4.0);
  ListReport b = ic_list_size(moved, 0.4, SearchMode::Exact, 0.5);
  CHECK(a.list_size == b.list_size);
}

TEST_CASE("ball intersection") {
  PeriodicConstellation ic;
  ic.alpha = 4.0;
  ic.n = 2;
  ic.points = Eigen::MatrixXd::Zero(2, 1);
  // sqrt(nP) = 6: the 3x3 grid of copies
  auto pts = intersect_ball(ic, 18.0);
  CHECK(pts.size() == 9);
  BallRateReport rep = ball_rate_check(ic, 18.0, 0.5);
  CHECK(rep.count == 9);
  CHECK(rep.expected == doctest::Approx(std::numbers::pi * 36.0 / 16.0));
}

TEST_CASE("greedy packing") {
  PeriodicConstellation pack = greedy_packing(8.0, 2, 0.1);
  CHECK(pack.size() >= 2);
  for (int a = 0; a < pack.points.cols(); ++a)
    for (int b = a + 1; b < pack.points.cols(); ++b)
      CHECK(wrap_dist(pack, pack.points.col(a), pack.points.col(b)) >=
            2.0 - 1e-9);
  // density lower bound with grid slack
  double slack = std::sqrt(2.0) * 0.1;
  CHECK(pack.size() >= std::floor(64.0 / ball_volume(2, 2.0 + slack)));
  // r_pack >= 1 by construction; compare against r_eff
  CHECK(1.0 / pack.effective_radius() >= 0.45);
}

TEST_CASE("awgn error estimate") {
  PeriodicConstellation ic;
  ic.alpha = 8.0;
  ic.n = 2;
  ic.points = Eigen::MatrixXd::Zero(2, 1);
  auto rng = make_rng(27, "ic-awgn", 0);
  // M = 1: error only when a wrapped copy is closer, i.e. some |z_i| > 4
  AwgnEstimate est = awgn_error_mc(ic, 1.0, 20000, rng);
  // oracle: Pr[any coordinate beats its wrap] ~ 2 Phi(-4) * 2 per dim
  double p_coord = 2.0 * 0.5 * std::erfc(4.0 / std::sqrt(2.0));
  double p_upper = 2.0 * p_coord;  // union bound over both coordinates
  CHECK(est.p_err <= p_upper + 3.0 * std::sqrt(p_upper / 20000.0) + 1e-4);
  AwgnEstimate tiny = awgn_error_mc(ic, 0.01, 2000, rng);
  CHECK(tiny.p_err == 0.0);
  CHECK(est.wilson_lo <= est.p_err);
  CHECK(est.wilson_hi >= est.p_err);
}
