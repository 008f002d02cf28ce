#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "listlab/finite_field.hpp"
#include "listlab/geometry.hpp"
#include "listlab/lattice.hpp"

namespace listlab {

struct ConstructionAParams {
  ChannelParams channel;
  long q = 2;        // smallest prime with 1 + sqrt(P/N)/q <= 2^{delta/8}
  long alpha = 1;    // smallest integer with 1 + sqrt(P/N)/alpha < 2^{delta/8}
  int kappa = 0;     // round(n R / log2 q)
  double realized_rate = 0.0;  // (kappa/n) log2 q
  bool delta_out_of_range = false;
};

ConstructionAParams select_params(const ChannelParams& channel);

// Phi(C) + q Z^n as a full-rank lattice (integer column reduction of
// [Phi(G) | qI]).
Lattice build_construction_a(const LinearCodeFq& code);

struct NestedPair {
  Lattice coarse;
  Lattice fine;
  LinearCodeFq code;
  // measured coarse-lattice ratios and their condition flags
  double rcov_over_reff = 0.0;   // upper bracket / r_eff
  double rpack_over_reff = 0.0;
  bool rcov_condition_ok = false;   // <= 2^{delta/8}
  bool rpack_condition_ok = false;  // > 1/4
};

NestedPair build_nested(const LinearCodeFq& code, const Lattice& coarse,
                        double delta);

// psi(m) = [(1/q) G_coarse (G m mod q)] mod coarse
Eigen::VectorXd encode_psi(const NestedPair& pair, const IntVector& m);

// All nested codewords psi(m), m over F_q^kappa, deduplicated.
std::vector<Eigen::VectorXd> codebook(const NestedPair& pair);

struct SandwichReport {
  int trials = 0;
  int violations = 0;
};

// Checks (q^n V_n / det)(r -+ rcov/q)^n sandwich on |(1/q)Lc cap B(y, r)|
// for random centers, using the certified upper bracket for rcov.
SandwichReport verify_count_sandwich(const Lattice& coarse, long q, int trials,
                                     std::mt19937_64& rng);

long analytic_ell(double delta, long alpha);  // ceil((8/(5 delta)) log2(4 alpha))

struct NestedListTrial {
  int empirical_list = 0;      // exact worst-case list size at sqrt(nN)
  int codebook_size = 0;
  long ell = 0;
  double log2_analytic_list = 0.0;  // log2(q^ell - 1) ~ ell log2 q
};

NestedListTrial nested_list_trial(long q, int kappa, double delta, long alpha,
                                  const Lattice& coarse, double noise_power,
                                  std::mt19937_64& rng);

}  // namespace listlab
