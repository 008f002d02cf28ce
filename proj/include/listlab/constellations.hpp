#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "listlab/geometry.hpp"

namespace listlab {

// Periodic infinite constellation: M representatives in [0, alpha)^n,
// repeated over alpha Z^n.
struct PeriodicConstellation {
  double alpha = 1.0;
  int n = 0;
  Eigen::MatrixXd points;  // n x M, every coordinate in [0, alpha)

  long size() const { return points.cols(); }
  double density() const {
    return static_cast<double>(points.cols()) / std::pow(alpha, n);
  }
  double effective_radius() const;
};

PeriodicConstellation sample_ic(double alpha, long M, int n,
                                std::mt19937_64& rng);

// M making r_eff / sqrt(nN) = 2^delta, rounded to nearest integer.
long ic_target_M(double alpha, int n, double N, double delta);

// Torus metric: min over per-coordinate wraps.
double wrap_dist(const PeriodicConstellation& ic, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y);

struct WrappedPoint {
  int index = 0;
  Eigen::VectorXi shift;   // the realizing period shift
  Eigen::VectorXd point;   // representative + alpha * shift
};

// All constellation points within r of center; requires r < alpha so that
// per-coordinate shifts in {-1, 0, 1} suffice.
std::vector<WrappedPoint> enumerate_in_wrapped_ball(
    const PeriodicConstellation& ic, const Eigen::VectorXd& center, double r);

// Worst-case list size at noise radius sqrt(nN). Exact mode lifts each
// representative to its in-range periodic copies and runs the enclosing-ball
// search; net mode scans grid_net(alpha, eps) centers with eps =
// sqrt(nN) * delta / 3, counting within radius sqrt(nN) + eps (slack recorded).
ListReport ic_list_size(const PeriodicConstellation& ic, double N,
                        SearchMode mode, double delta);

// L from ceil((3/delta) log2(12/delta)) - 1.
long ic_analytic_list(double delta);

// All periodic copies with norm <= sqrt(nP).
std::vector<Eigen::VectorXd> intersect_ball(const PeriodicConstellation& ic,
                                            double P);

struct BallRateReport {
  long count = 0;
  double expected = 0.0;  // (sqrt(nP)/r_eff)^n
  bool in_band = false;   // count within expected * (1 +- delta)
};

BallRateReport ball_rate_check(const PeriodicConstellation& ic, double P,
                               double delta);

// Greedy grid packing: repeatedly take the first uncovered grid point and
// remove everything within wrapped distance 2.
PeriodicConstellation greedy_packing(double alpha, int n,
                                     double grid_resolution);

struct AwgnEstimate {
  double p_err = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  long errors = 0;
  long trials = 0;
};

AwgnEstimate awgn_error_mc(const PeriodicConstellation& ic, double sigma2,
                           long trials, std::mt19937_64& rng);

}  // namespace listlab
