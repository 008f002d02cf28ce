#include "listlab/construction_a.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

#include "listlab/errors.hpp"
#include "listlab/rng.hpp"

namespace listlab {

namespace {

using Int64Matrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Column-style Hermite reduction: gcd elimination within each row, pivots
// collected in the leading columns. Returns the left n x n block.
Int64Matrix column_hnf(Int64Matrix A) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(A.cols());
  for (int row = 0; row < n; ++row) {
    for (;;) {
      int jmin = -1;
      long long best = 0;
      int nonzero = 0;
      for (int j = row; j < m; ++j) {
        long long v = std::llabs(A(row, j));
        if (v == 0) continue;
        ++nonzero;
        if (jmin < 0 || v < best) {
          jmin = j;
          best = v;
        }
      }
      if (jmin < 0)
        throw std::logic_error("column_hnf: rank-deficient input");
      if (nonzero == 1) {
        A.col(row).swap(A.col(jmin));
        if (A(row, row) < 0) A.col(row) = -A.col(row);
        break;
      }
      for (int j = row; j < m; ++j) {
        if (j == jmin || A(row, j) == 0) continue;
        long long t = A(row, j) / A(row, jmin);
        A.col(j) -= t * A.col(jmin);
      }
    }
  }
  return A.leftCols(n);
}

}  // namespace

ConstructionAParams select_params(const ChannelParams& channel) {
  if (channel.P <= channel.N)
    throw std::domain_error("select_params: requires P > N");
  ConstructionAParams p;
  p.channel = channel;
  const double delta = channel.delta;
  if (delta >= 0.9) {
    p.delta_out_of_range = true;
    std::cerr << "listlab: select_params delta=" << delta
              << " is outside the analysis range [0, 0.9); proceeding\n";
  }
  const double growth = std::exp2(delta / 8.0) - 1.0;
  const double threshold = std::sqrt(channel.P / channel.N) / growth;
  p.q = next_prime_at_least(static_cast<long>(std::ceil(threshold - 1e-12)));
  p.alpha = static_cast<long>(std::floor(threshold + 1e-12)) + 1;
  const double R = channel.rate();
  p.kappa = static_cast<int>(
      std::llround(channel.n * R / std::log2(static_cast<double>(p.q))));
  p.realized_rate = (static_cast<double>(p.kappa) / channel.n) *
                    std::log2(static_cast<double>(p.q));
  return p;
}

Lattice build_construction_a(const LinearCodeFq& code) {
  const int n = code.n;
  Int64Matrix A(n, code.kappa + n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < code.kappa; ++j)
      A(i, j) = ((code.G(i, j) % code.q) + code.q) % code.q;
    for (int j = 0; j < n; ++j)
      A(i, code.kappa + j) = (i == j) ? code.q : 0;
  }
  Int64Matrix H = column_hnf(A);
  Lattice lat(H.cast<double>());
  const double expect = std::pow(static_cast<double>(code.q), n - code.rank);
  if (std::abs(lat.det() - expect) > 1e-6 * expect)
    throw std::logic_error("build_construction_a: determinant mismatch");
  return lat;
}

NestedPair build_nested(const LinearCodeFq& code, const Lattice& coarse,
                        double delta) {
  if (code.n != coarse.dim())
    throw std::invalid_argument("build_nested: code length != dimension");
  Lattice ca = build_construction_a(code);
  Lattice fine(coarse.basis() * (ca.basis() / static_cast<double>(code.q)));
  NestedPair pair{coarse, fine, code};
  if (!sublattice_check(coarse, fine))
    throw std::logic_error("build_nested: coarse not contained in fine");
  const double reff = coarse.effective_radius();
  pair.rcov_over_reff = coarse.cov_upper() / reff;
  pair.rpack_over_reff = coarse.packing_radius() / reff;
  pair.rcov_condition_ok = pair.rcov_over_reff <= std::exp2(delta / 8.0);
  pair.rpack_condition_ok = pair.rpack_over_reff > 0.25;
  return pair;
}

Eigen::VectorXd encode_psi(const NestedPair& pair, const IntVector& m) {
  IntVector c = pair.code.encode(m);
  Eigen::VectorXd x =
      pair.coarse.basis() * (c.cast<double>() / static_cast<double>(pair.code.q));
  return pair.coarse.mod_lattice(x);
}

std::vector<Eigen::VectorXd> codebook(const NestedPair& pair) {
  const long q = pair.code.q;
  const int kappa = pair.code.kappa;
  double total = std::pow(static_cast<double>(q), kappa);
  if (total > 4096) throw BudgetError("codebook: q^kappa exceeds cap");
  std::map<std::vector<long long>, Eigen::VectorXd> seen;
  IntVector m = IntVector::Zero(kappa);
  for (long i = 0; i < static_cast<long>(total); ++i) {
    Eigen::VectorXd w = encode_psi(pair, m);
    std::vector<long long> key(w.size());
    for (int j = 0; j < w.size(); ++j)
      key[j] = static_cast<long long>(std::llround(w[j] * 1e6));
    seen.emplace(std::move(key), w);
    for (int j = kappa - 1; j >= 0; --j) {
      if (++m[j] < q) break;
      m[j] = 0;
    }
  }
  std::vector<Eigen::VectorXd> out;
  for (auto& [k, v] : seen) out.push_back(v);
  return out;
}

SandwichReport verify_count_sandwich(const Lattice& coarse, long q, int trials,
                                     std::mt19937_64& rng) {
  const int n = coarse.dim();
  const double rcov_u = coarse.cov_upper();
  Lattice fineq = coarse.scale(1.0 / static_cast<double>(q));
  const double density = std::pow(static_cast<double>(q), n) *
                         ball_volume(n, 1.0) / coarse.det();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SandwichReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = (2.0 * u(rng) - 1.0) * rcov_u;
    const double r = (rcov_u / q) * (1.2 + 2.8 * u(rng));
    const double count =
        static_cast<double>(fineq.enumerate_in_ball(y, r).size());
    const double lo = density * std::pow(r - rcov_u / q, n);
    const double hi = density * std::pow(r + rcov_u / q, n);
    if (count < lo * (1.0 - 1e-9) || count > hi * (1.0 + 1e-9)) ++rep.violations;
  }
  return rep;
}

long analytic_ell(double delta, long alpha) {
  return static_cast<long>(
      std::ceil((8.0 / (5.0 * delta)) * std::log2(4.0 * static_cast<double>(alpha)) -
                1e-12));
}

NestedListTrial nested_list_trial(long q, int kappa, double delta, long alpha,
                                  const Lattice& coarse, double noise_power,
                                  std::mt19937_64& rng) {
  LinearCodeFq code = random_code(q, coarse.dim(), kappa, rng);
  NestedPair pair = build_nested(code, coarse, delta);
  std::vector<Eigen::VectorXd> cb = codebook(pair);
  Eigen::MatrixXd pts(coarse.dim(), static_cast<int>(cb.size()));
  for (int j = 0; j < pts.cols(); ++j) pts.col(j) = cb[j];
  NestedListTrial out;
  out.codebook_size = static_cast<int>(cb.size());
  out.empirical_list =
      worst_case_list_size(pts, std::sqrt(coarse.dim() * noise_power)).list_size;
  out.ell = analytic_ell(delta, alpha);
  out.log2_analytic_list =
      out.ell * std::log2(static_cast<double>(q)) +
      std::log2(1.0 - std::pow(static_cast<double>(q), -static_cast<double>(out.ell)));
  return out;
}

}  // namespace listlab
