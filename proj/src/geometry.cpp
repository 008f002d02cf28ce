#include "listlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "listlab/errors.hpp"
#include "listlab/rng.hpp"

namespace listlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

double ChannelParams::rate() const {
  return std::max(0.0, 0.5 * std::log2(P / N) - delta);
}

ChannelParams ChannelParams::make(int n, double P, double N, double delta) {
  if (n < 1) throw std::domain_error("ChannelParams: n must be positive");
  if (P <= 0 || N <= 0 || delta <= 0)
    throw std::domain_error("ChannelParams: P, N, delta must be positive");
  return ChannelParams{n, P, N, delta};
}

double log_ball_volume(int n) {
  return 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0);
}

double ball_volume(int n, double r) {
  if (n < 1) throw std::domain_error("ball_volume: n must be >= 1");
  if (r < 0) throw std::domain_error("ball_volume: r must be >= 0");
  if (r == 0) return 0.0;
  return std::exp(log_ball_volume(n) + n * std::log(r));
}

double sphere_area(int n, double r) {
  if (n < 2) throw std::domain_error("sphere_area: n must be >= 2");
  return n * std::exp(log_ball_volume(n) + (n - 1) * std::log(r));
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kFpMin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double cap_fraction(int n, double P, double N) {
  if (N <= 0 || N > P) throw std::domain_error("cap_fraction: need 0 < N <= P");
  // cos(phi) = sqrt((P-N)/P), mu = 1/2 I_{sin^2 phi}((n-1)/2, 1/2).
  double sin2 = N / P;
  return 0.5 * regularized_beta(0.5 * (n - 1), 0.5, sin2);
}

double mu_lower_bound(int n, double P, double N) {
  if (N <= 0 || N >= P)
    throw std::domain_error("mu_lower_bound: need 0 < N < P");
  // vol(B^{n-1}(0, sqrt(nN))) / area(S^{n-1}(0, sqrt(nP)))
  double log_num = log_ball_volume(n - 1) + (n - 1) * 0.5 * std::log(n * N);
  double log_den = std::log(static_cast<double>(n)) + log_ball_volume(n) +
                   (n - 1) * 0.5 * std::log(n * P);
  return std::exp(log_num - log_den);
}

double capacity(double P, double N) {
  if (P <= 0 || N <= 0) throw std::domain_error("capacity: P, N must be > 0");
  return std::max(0.0, 0.5 * std::log2(P / N));
}

long cone_cover_count(double P, double N) {
  if (N >= P) throw std::domain_error("cone_cover_count: need N < P");
  if (N <= 0) throw std::domain_error("cone_cover_count: need N > 0");
  return static_cast<long>(std::ceil(P / (4.0 * N)));
}

namespace {

// Circumsphere of an affinely independent (possibly degenerate) support set;
// minimal-norm center within the affine hull.
Ball ball_from_support(const Eigen::MatrixXd& pts,
                       const std::vector<int>& support) {
  Ball b;
  if (support.empty()) {
    b.center = Eigen::VectorXd::Zero(pts.rows());
    b.radius = -1.0;  // empty ball: contains nothing
    return b;
  }
  const int k = static_cast<int>(support.size());
  Eigen::VectorXd p0 = pts.col(support[0]);
  if (k == 1) {
    b.center = p0;
    b.radius = 0.0;
    return b;
  }
  Eigen::MatrixXd Q(pts.rows(), k - 1);
  Eigen::VectorXd d(k - 1);
  for (int i = 1; i < k; ++i) {
    Q.col(i - 1) = pts.col(support[i]) - p0;
    d[i - 1] = Q.col(i - 1).squaredNorm();
  }
  Eigen::MatrixXd A = 2.0 * Q.transpose() * Q;
  Eigen::VectorXd u = A.completeOrthogonalDecomposition().solve(d);
  b.center = p0 + Q * u;
  b.radius = 0.0;
  for (int i = 0; i < k; ++i)
    b.radius = std::max(b.radius, (pts.col(support[i]) - b.center).norm());
  return b;
}

bool ball_contains(const Ball& b, const Eigen::VectorXd& p) {
  if (b.radius < 0) return false;
  double d2 = (p - b.center).squaredNorm();
  return d2 <= b.radius * b.radius * (1.0 + kMembershipRelTol) + 1e-30;
}

Ball welzl(const Eigen::MatrixXd& pts, std::vector<int>& order, int m,
           std::vector<int>& support) {
  if (m == 0 || static_cast<int>(support.size()) ==
                    static_cast<int>(pts.rows()) + 1) {
    return ball_from_support(pts, support);
  }
  int p = order[m - 1];
  Ball b = welzl(pts, order, m - 1, support);
  if (ball_contains(b, pts.col(p))) return b;
  support.push_back(p);
  b = welzl(pts, order, m - 1, support);
  support.pop_back();
  // move-to-front heuristic
  std::rotate(order.begin(), order.begin() + (m - 1), order.begin() + m);
  return b;
}

}  // namespace

Ball min_enclosing_ball(const Eigen::MatrixXd& points,
                        std::uint64_t shuffle_seed) {
  const int m = static_cast<int>(points.cols());
  if (m == 0) throw std::invalid_argument("min_enclosing_ball: empty set");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(shuffle_seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> support;
  return welzl(points, order, m, support);
}

namespace {

struct ListSearch {
  const Eigen::MatrixXd& pts;
  double r;
  double r_sq_tol;
  std::vector<std::vector<char>> adj;
  long nodes = 0;
  long node_budget;
  std::vector<int> best;

  bool feasible(const std::vector<int>& subset) const {
    if (subset.size() <= 1) return true;
    Eigen::MatrixXd sub(pts.rows(), subset.size());
    for (size_t i = 0; i < subset.size(); ++i) sub.col(i) = pts.col(subset[i]);
    Ball b = min_enclosing_ball(sub);
    return b.radius * b.radius <= r_sq_tol;
  }

  void expand(std::vector<int>& current, std::vector<int>& cand) {
    if (current.size() > best.size()) best = current;
    if (current.size() + cand.size() <= best.size()) return;
    if (++nodes > node_budget) {
      throw BudgetError("worst_case_list_size: node budget exceeded",
                        static_cast<long>(best.size()));
    }
    while (!cand.empty()) {
      if (current.size() + cand.size() <= best.size()) return;
      int v = cand.back();
      cand.pop_back();
      // branch: include v
      current.push_back(v);
      if (feasible(current)) {
        std::vector<int> next;
        next.reserve(cand.size());
        for (int u : cand)
          if (adj[v][u]) next.push_back(u);
        expand(current, next);
      }
      current.pop_back();
      // exclude v: continue loop
    }
  }
};

}  // namespace

ListReport worst_case_list_size(const Eigen::MatrixXd& points, double r,
                                long node_budget) {
  const int m = static_cast<int>(points.cols());
  if (m == 0) throw std::invalid_argument("worst_case_list_size: empty set");
  ListSearch s{points, r, r * r * (1.0 + kMembershipRelTol), {}, 0,
               node_budget, {}};
  const double pair_sq = 4.0 * r * r * (1.0 + kMembershipRelTol);
  s.adj.assign(m, std::vector<char>(m, 0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      bool e = (points.col(i) - points.col(j)).squaredNorm() <= pair_sq;
      s.adj[i][j] = s.adj[j][i] = e;
    }
  // greedy seed: grow from each vertex by ascending distance
  for (int i = 0; i < m && i < 64; ++i) {
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return (points.col(a) - points.col(i)).squaredNorm() <
             (points.col(b) - points.col(i)).squaredNorm();
    });
    std::vector<int> cur;
    for (int v : order) {
      cur.push_back(v);
      if (!s.feasible(cur)) cur.pop_back();
    }
    if (cur.size() > s.best.size()) s.best = cur;
  }
  std::vector<int> current, cand(m);
  std::iota(cand.begin(), cand.end(), 0);
  s.expand(current, cand);

  ListReport rep;
  rep.list_size = static_cast<int>(s.best.size());
  rep.witness_members = s.best;
  std::sort(rep.witness_members.begin(), rep.witness_members.end());
  rep.radius = r;
  rep.mode = SearchMode::Exact;
  if (!s.best.empty()) {
    Eigen::MatrixXd sub(points.rows(), s.best.size());
    for (size_t i = 0; i < s.best.size(); ++i) sub.col(i) = points.col(s.best[i]);
    rep.witness_center = min_enclosing_ball(sub).center;
  } else {
    rep.witness_center = Eigen::VectorXd::Zero(points.rows());
  }
  return rep;
}

ListReport worst_case_list_size_net(const Eigen::MatrixXd& points, double r,
                                    const Eigen::MatrixXd& net, double slack) {
  const double rr = (r + slack) * (r + slack) * (1.0 + kMembershipRelTol);
  ListReport rep;
  rep.mode = SearchMode::NetApproximate;
  rep.radius = r;
  rep.slack = slack;
  rep.list_size = 0;
  rep.witness_center = net.cols() > 0 ? Eigen::VectorXd(net.col(0))
                                      : Eigen::VectorXd::Zero(points.rows());
  for (int j = 0; j < net.cols(); ++j) {
    std::vector<int> members;
    for (int i = 0; i < points.cols(); ++i)
      if ((points.col(i) - net.col(j)).squaredNorm() <= rr)
        members.push_back(i);
    if (static_cast<int>(members.size()) > rep.list_size) {
      rep.list_size = static_cast<int>(members.size());
      rep.witness_center = net.col(j);
      rep.witness_members = std::move(members);
    }
  }
  return rep;
}

Eigen::MatrixXd grid_net(double alpha, double eps, int n) {
  if (eps <= 0 || eps > alpha)
    throw std::domain_error("grid_net: need 0 < eps <= alpha");
  double ratio = alpha / eps;
  long per_dim = static_cast<long>(std::floor(ratio * (1.0 + 1e-12)));
  if (per_dim * eps >= alpha * (1.0 - 1e-12)) {
    // eps divides alpha: last multiple coincides with alpha, excluded
    per_dim = static_cast<long>(std::llround(ratio));
  } else {
    per_dim += 1;
  }
  long total = 1;
  for (int i = 0; i < n; ++i) {
    total *= per_dim;
    if (total > 50'000'000)
      throw BudgetError("grid_net: too many grid points");
  }
  Eigen::MatrixXd pts(n, total);
  std::vector<long> idx(n, 0);
  for (long c = 0; c < total; ++c) {
    for (int i = 0; i < n; ++i) pts(i, c) = idx[i] * eps;
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < per_dim) break;
      idx[i] = 0;
    }
  }
  return pts;
}

SphereNetResult sphere_net(int n, double radius, double eps,
                           std::mt19937_64& rng, int max_points) {
  if (eps <= 0) throw std::domain_error("sphere_net: eps must be > 0");
  constexpr int kProbes = 1000;
  const double eps_sq = eps * eps * (1.0 + kMembershipRelTol);
  std::vector<Eigen::VectorXd> net;
  SphereNetResult res;
  int batch = 64;
  while (true) {
    for (int i = 0; i < batch; ++i)
      net.push_back(uniform_sphere(n, radius, rng));
    if (static_cast<int>(net.size()) > max_points)
      throw BudgetError("sphere_net: sample cap exceeded",
                        static_cast<long>(net.size()));
    ++res.coverage_rounds;
    bool covered = true;
    for (int p = 0; p < kProbes; ++p) {
      Eigen::VectorXd probe = uniform_sphere(n, radius, rng);
      bool hit = false;
      for (const auto& q : net) {
        if ((probe - q).squaredNorm() <= eps_sq) {
          hit = true;
          break;
        }
      }
      if (!hit) {
        covered = false;
        ++res.probe_failures;
        break;
      }
    }
    if (covered) break;
    batch = std::min(2 * batch, 65536);
  }
  res.points.resize(n, net.size());
  for (size_t i = 0; i < net.size(); ++i) res.points.col(i) = net[i];
  return res;
}

}  // namespace listlab
