#pragma once

#include <Eigen/Dense>
#include <random>

#include "listlab/geometry.hpp"

namespace listlab {

struct SphericalCode {
  int n = 0;
  double P = 0.0;
  Eigen::MatrixXd points;  // n x M, every column of norm sqrt(nP)
  double target_rate = 0.0;

  long size() const { return points.cols(); }
};

// M = floor(2^{nR}) i.i.d. uniform points on S^{n-1}(0, sqrt(nP)).
SphericalCode sample_spherical(int n, double P, double rate,
                               std::mt19937_64& rng);

// Radial projection x -> x sqrt(nP)/||x||; throws listing zero columns.
SphericalCode project_to_sphere(const Eigen::MatrixXd& ball_code, double P);

enum class AttackStrategy { RandomCap, CodewordSeeded, MebRefined };

// Monte Carlo search for a bad center; the result is a certified lower
// bound on the true worst-case list size.
ListReport spherical_list_mc(const SphericalCode& code, double N,
                             AttackStrategy strategy, long budget,
                             std::mt19937_64& rng);

struct WitnessStats {
  double log2_E_W_lower = 0.0;
  double log2_Var_W_upper = 0.0;
  double log2_failure_bound = 0.0;  // L^{2L+1} mu^{-L+1} M^{-L}
  double mu = 0.0;
  long M = 0;
  int L = 0;
  double log2_net_size = 0.0;
  double L_threshold = 0.0;  // C / delta
};

WitnessStats witness_bounds(const ChannelParams& channel, int L, double eps);

// Direct witness count: W = sum over net centers of C(k_y, L) with
// k_y = |code cap B(y, sqrt(nN))|.
double empirical_witness(const SphericalCode& code, double N,
                         const Eigen::MatrixXd& net, int L);

}  // namespace listlab
