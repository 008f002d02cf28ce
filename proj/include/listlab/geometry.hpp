#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace listlab {

// Relative tolerance for all squared-distance membership tests.
inline constexpr double kMembershipRelTol = 1e-9;

inline bool in_ball_sq(double dist_sq, double r_sq) {
  return dist_sq <= r_sq * (1.0 + kMembershipRelTol);
}

struct ChannelParams {
  int n = 0;
  double P = 0.0;      // transmit power
  double N = 0.0;      // adversary power
  double delta = 0.0;  // gap to capacity

  // Rate in bits per dimension, clipped at zero.
  double rate() const;
  static ChannelParams make(int n, double P, double N, double delta);
};

enum class NetKind { SphereNet, CubeGrid };

struct NetSpec {
  double eps = 0.0;
  NetKind kind = NetKind::CubeGrid;
};

enum class SearchMode { Exact, NetApproximate };

struct ListReport {
  int list_size = 0;
  Eigen::VectorXd witness_center;
  double radius = 0.0;
  SearchMode mode = SearchMode::Exact;
  std::vector<int> witness_members;
  double slack = 0.0;  // net slack (0 in exact mode)
};

double ball_volume(int n, double r);
double log_ball_volume(int n);  // ln V_n of the unit ball
double sphere_area(int n, double r);

// Fraction of the sphere S^{n-1}(0,sqrt(nP)) covered by the cap cut out by a
// noise ball of radius sqrt(nN) centered on the sphere.
double cap_fraction(int n, double P, double N);
double mu_lower_bound(int n, double P, double N);

double capacity(double P, double N);       // [1/2 log2(P/N)]^+
long cone_cover_count(double P, double N);  // ceil(P/(4N))

// Regularized incomplete beta I_x(a, b); exposed for tests.
double regularized_beta(double a, double b, double x);

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
};

// Smallest enclosing ball of the columns of `points` (Welzl's randomized
// incremental algorithm, shuffle pinned to `shuffle_seed`).
Ball min_enclosing_ball(const Eigen::MatrixXd& points,
                        std::uint64_t shuffle_seed = 0x5eed);

// Exact worst-case list size: the largest subset of columns fitting in some
// ball of radius r. Throws BudgetError (carrying the best lower bound found)
// if the branch-and-bound exceeds node_budget.
ListReport worst_case_list_size(const Eigen::MatrixXd& points, double r,
                                long node_budget = 50'000'000);

// Net-approximate mode: max over net centers of |points cap B(y, r + slack)|.
ListReport worst_case_list_size_net(const Eigen::MatrixXd& points, double r,
                                    const Eigen::MatrixXd& net, double slack);

// eps Z^n intersected with [0, alpha)^n, columns in lexicographic order.
Eigen::MatrixXd grid_net(double alpha, double eps, int n);

struct SphereNetResult {
  Eigen::MatrixXd points;
  int coverage_rounds = 0;  // probe rounds used before certification
  int probe_failures = 0;   // probes that failed across all rounds
};

// Random covering of S^{n-1}(0, radius): points are added until 1000 fresh
// probe points all fall within eps of the net. Throws BudgetError if the
// sample cap is hit first.
SphereNetResult sphere_net(int n, double radius, double eps,
                           std::mt19937_64& rng, int max_points = 2'000'000);

}  // namespace listlab
