#include "listlab/finite_field.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "listlab/errors.hpp"

namespace listlab {

bool is_prime(long q) {
  if (q < 2) return false;
  for (long d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

long next_prime_at_least(long m) {
  long q = std::max(2L, m);
  while (!is_prime(q)) ++q;
  return q;
}

int rank_mod_q(IntMatrix A, long q) {
  const int rows = static_cast<int>(A.rows());
  const int cols = static_cast<int>(A.cols());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (A(r, c) % q != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    A.row(rank).swap(A.row(pivot));
    // scale pivot row to 1 (Fermat inverse)
    long inv = 1, base = ((A(rank, c) % q) + q) % q, e = q - 2;
    while (e > 0) {
      if (e & 1) inv = inv * base % q;
      base = base * base % q;
      e >>= 1;
    }
    for (int j = 0; j < cols; ++j)
      A(rank, j) = ((A(rank, j) * inv) % q + q) % q;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || A(r, c) % q == 0) continue;
      long f = ((A(r, c) % q) + q) % q;
      for (int j = 0; j < cols; ++j)
        A(r, j) = ((A(r, j) - f * A(rank, j)) % q + q) % q;
    }
    ++rank;
  }
  return rank;
}

IntVector LinearCodeFq::encode(const IntVector& m) const {
  if (m.size() != kappa)
    throw std::invalid_argument("encode: message length mismatch");
  for (int i = 0; i < kappa; ++i)
    if (m[i] < 0 || m[i] >= q)
      throw std::domain_error("encode: symbol out of range");
  IntVector c = G * m;
  for (int i = 0; i < n; ++i) c[i] = ((c[i] % q) + q) % q;
  return c;
}

std::vector<IntVector> LinearCodeFq::enumerate_codewords() const {
  double total = std::pow(static_cast<double>(q), kappa);
  if (total > (1 << 20))
    throw BudgetError("enumerate_codewords: q^kappa too large");
  std::set<std::vector<long>> seen;
  std::vector<IntVector> out;
  IntVector m = IntVector::Zero(kappa);
  long count = static_cast<long>(total);
  for (long i = 0; i < count; ++i) {
    IntVector c = encode(m);
    std::vector<long> key(c.data(), c.data() + c.size());
    if (seen.insert(key).second) out.push_back(c);
    for (int j = kappa - 1; j >= 0; --j) {
      if (++m[j] < q) break;
      m[j] = 0;
    }
  }
  return out;
}

LinearCodeFq random_code(long q, int n, int kappa, std::mt19937_64& rng,
                         bool require_full_rank) {
  if (!is_prime(q)) throw std::domain_error("random_code: q must be prime");
  if (kappa < 0 || kappa > n)
    throw std::invalid_argument("random_code: need 0 <= kappa <= n");
  std::uniform_int_distribution<long> u(0, q - 1);
  LinearCodeFq code;
  code.q = q;
  code.n = n;
  code.kappa = kappa;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    code.G.resize(n, kappa);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < kappa; ++j) code.G(i, j) = u(rng);
    code.rank = rank_mod_q(code.G, q);
    code.resamples = attempt;
    if (!require_full_rank || code.rank == kappa) return code;
  }
  throw BudgetError("random_code: full-rank resample budget exhausted");
}

}  // namespace listlab
