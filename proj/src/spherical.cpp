#include "listlab/spherical.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "listlab/errors.hpp"
#include "listlab/rng.hpp"

namespace listlab {

namespace {

int count_in_ball(const Eigen::MatrixXd& pts, const Eigen::VectorXd& y,
                  double r_sq, std::vector<int>* members = nullptr) {
  int c = 0;
  for (int j = 0; j < pts.cols(); ++j) {
    if ((pts.col(j) - y).squaredNorm() <= r_sq) {
      ++c;
      if (members) members->push_back(j);
    }
  }
  return c;
}

double log2_binomial(double k, int l) {
  if (k < l) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (int i = 0; i < l; ++i) s += std::log2(k - i) - std::log2(i + 1.0);
  return s;
}

}  // namespace

SphericalCode sample_spherical(int n, double P, double rate,
                               std::mt19937_64& rng) {
  if (n * rate > 30.0)
    throw BudgetError("sample_spherical: 2^{nR} exceeds the memory cap");
  SphericalCode code;
  code.n = n;
  code.P = P;
  code.target_rate = rate;
  const long M = std::max(1L, static_cast<long>(std::floor(std::exp2(n * rate))));
  code.points.resize(n, M);
  const double radius = std::sqrt(n * P);
  for (long j = 0; j < M; ++j)
    code.points.col(j) = uniform_sphere(n, radius, rng);
  return code;
}

SphericalCode project_to_sphere(const Eigen::MatrixXd& ball_code, double P) {
  std::vector<int> zeros;
  for (int j = 0; j < ball_code.cols(); ++j)
    if (ball_code.col(j).norm() == 0.0) zeros.push_back(j);
  if (!zeros.empty()) {
    std::ostringstream msg;
    msg << "project_to_sphere: zero vectors at indices";
    for (int z : zeros) msg << ' ' << z;
    throw std::domain_error(msg.str());
  }
  SphericalCode code;
  code.n = static_cast<int>(ball_code.rows());
  code.P = P;
  const double radius = std::sqrt(code.n * P);
  code.points = ball_code;
  for (int j = 0; j < code.points.cols(); ++j)
    code.points.col(j) *= radius / code.points.col(j).norm();
  return code;
}

ListReport spherical_list_mc(const SphericalCode& code, double N,
                             AttackStrategy strategy, long budget,
                             std::mt19937_64& rng) {
  const int n = code.n;
  const double r = std::sqrt(n * N);
  const double r_sq = r * r * (1.0 + kMembershipRelTol);
  const double rho = std::sqrt(n * code.P);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(code.size()) - 1);

  ListReport best;
  best.mode = SearchMode::NetApproximate;  // Monte Carlo lower bound
  best.radius = r;
  auto consider = [&](const Eigen::VectorXd& y) {
    std::vector<int> members;
    int c = count_in_ball(code.points, y, r_sq, &members);
    if (c > best.list_size) {
      best.list_size = c;
      best.witness_center = y;
      best.witness_members = std::move(members);
    }
  };

  // a codeword is itself a valid center: guarantees list >= 1 and catches
  // the degenerate regime where one noise ball covers the whole sphere
  consider(code.points.col(0));

  const long probes = (strategy == AttackStrategy::MebRefined)
                          ? std::max(1L, budget / 2)
                          : budget;
  for (long t = 0; t < probes; ++t) {
    Eigen::VectorXd y;
    if (strategy == AttackStrategy::RandomCap) {
      const double lo = std::max(0.0, rho - r);
      y = uniform_sphere(n, lo + (rho + r - lo) * u(rng), rng);
    } else {
      y = code.points.col(pick(rng)) + uniform_sphere(n, r, rng);
    }
    consider(y);
  }
  if (strategy == AttackStrategy::MebRefined && best.list_size > 0) {
    // recenter on the best cluster and grow greedily
    for (long round = 0; round < budget - probes; ++round) {
      Eigen::MatrixXd cluster(n, static_cast<int>(best.witness_members.size()));
      for (int i = 0; i < cluster.cols(); ++i)
        cluster.col(i) = code.points.col(best.witness_members[i]);
      Ball b = min_enclosing_ball(cluster);
      int before = best.list_size;
      consider(b.center);
      if (best.list_size == before) break;
    }
  }
  return best;
}

WitnessStats witness_bounds(const ChannelParams& channel, int L, double eps) {
  if (L < 1) throw std::domain_error("witness_bounds: L >= 1 required");
  WitnessStats w;
  w.L = L;
  w.mu = cap_fraction(channel.n, channel.P, channel.N);
  w.M = std::max(1L, static_cast<long>(std::floor(
                         std::exp2(channel.n * channel.rate()))));
  // standard covering bound for a sqrt(n eps)-net on S^{n-1}(0, sqrt(n(P-N)))
  w.log2_net_size =
      channel.n * std::log2(3.0 * std::sqrt((channel.P - channel.N) / eps));
  const double log2_mu = std::log2(w.mu);
  const double log2_M = std::log2(static_cast<double>(w.M));
  const double log2_L = std::log2(static_cast<double>(L));
  w.log2_E_W_lower = L * (log2_M - log2_L) + w.log2_net_size + L * log2_mu;
  w.log2_Var_W_upper =
      2.0 * w.log2_net_size + log2_L + L * log2_M + (L + 1) * log2_mu;
  w.log2_failure_bound =
      (2.0 * L + 1.0) * log2_L + (1.0 - L) * log2_mu - L * log2_M;
  w.L_threshold = capacity(channel.P, channel.N) / channel.delta;
  return w;
}

double empirical_witness(const SphericalCode& code, double N,
                         const Eigen::MatrixXd& net, int L) {
  if (code.size() > 64 || L > 3 || net.cols() > 10000)
    throw BudgetError("empirical_witness: instance exceeds the desk-scale cap");
  const double r = std::sqrt(code.n * N);
  const double r_sq = r * r * (1.0 + kMembershipRelTol);
  double W = 0.0;
  for (int c = 0; c < net.cols(); ++c) {
    int k = count_in_ball(code.points, net.col(c), r_sq);
    if (k >= L) W += std::exp2(log2_binomial(k, L));
  }
  return W;
}

}  // namespace listlab
