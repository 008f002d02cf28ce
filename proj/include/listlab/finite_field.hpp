#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace listlab {

using IntMatrix = Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<long, Eigen::Dynamic, 1>;

bool is_prime(long q);
long next_prime_at_least(long m);

// Linear code over the prime field F_q, given by an n x kappa generator
// matrix with entries in {0, ..., q-1}.
struct LinearCodeFq {
  long q = 2;
  int n = 0;
  int kappa = 0;
  IntMatrix G;        // n x kappa
  int rank = 0;       // rank of G over F_q
  int resamples = 0;  // attempts used by random_code when forcing full rank

  IntVector encode(const IntVector& m) const;  // G m mod q
  std::vector<IntVector> enumerate_codewords() const;
};

int rank_mod_q(IntMatrix A, long q);

LinearCodeFq random_code(long q, int n, int kappa, std::mt19937_64& rng,
                         bool require_full_rank = true);

}  // namespace listlab
