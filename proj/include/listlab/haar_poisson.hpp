#pragma once

#include <Eigen/Dense>
#include <random>

#include "listlab/geometry.hpp"
#include "listlab/lattice.hpp"

namespace listlab {

// Determinant-one ensemble: diagonal omega with a uniformly random last row
// scaled by omega^{-(n-1)}; its omega -> 0 averages recover Haar averages.
struct RogersSample {
  int n = 0;
  double omega = 0.0;
  Eigen::VectorXd thetas;  // n-1 uniform [0,1) entries
  Lattice lattice;
};

RogersSample rogers_sample(int n, double omega, std::mt19937_64& rng);

struct SiegelResult {
  double mean = 0.0;
  double se = 0.0;
  long samples = 0;
};

// Monte Carlo average of |(Lambda \ {0}) cap B(center, r)| over the ensemble;
// the mean should approach vol(B(center, r)) as omega -> 0.
SiegelResult siegel_mc(int n, double omega, const Eigen::VectorXd& center,
                       double r, long samples, std::mt19937_64& rng);

double pois_pmf(double lambda, long k);
double pois_tail_exact(double lambda, long ell);   // Pr[p > ell]
double pois_tail_bound(double lambda, double ell); // e^{-l}(e l)^l / l^l form
double pois_moment(double lambda, int k);          // E[p^k]

double lambert_w_newton(double x);    // principal branch, w e^w = x
double lambert_w_estimate(double x);  // ln x - ln ln x

struct DistCalcTrace {
  long L = 0;  // minimal L with positive exponent
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double eps = 0.0;
  double lambda = 0.0;  // Poisson mean at the channel's n
  double exponent_at_L = 0.0;
  double exponent_at_L_minus_1 = 0.0;
  double shape = 0.0;  // L * delta / log2(1/delta)
};

DistCalcTrace conditional_list_dist(const ChannelParams& channel, double c1);

struct MmtCalcTrace {
  double a = 0.0;        // 1 + 1/c + margin
  double L = 0.0;        // (1/delta)^a
  double D = 0.0;        // moment-exponent estimate
  double exponent = 0.0; // D + c ln(L/2) - ln(c2/delta)
  double j_star = 0.0;   // critical index of the moment series
  double lambda = 0.0;
  long L_required = 0;   // minimal L making the exponent positive
};

MmtCalcTrace conditional_list_mmt(const ChannelParams& channel, double c,
                                  double c1, double margin = 0.001);

struct PoissonianityResult {
  double tv = 0.0;
  double chi_sq = 0.0;
  int chi_bins = 0;
  double mean = 0.0;
  double second_moment = 0.0;
  long samples = 0;
};

// Histogram of half the nonzero-point count in an origin-centered ball of
// volume V versus Pois(V/2).
PoissonianityResult empirical_poissonianity(int n, double omega, double V,
                                            long samples,
                                            std::mt19937_64& rng);

}  // namespace listlab
