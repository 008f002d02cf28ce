#include "listlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "listlab/errors.hpp"
#include "listlab/geometry.hpp"

namespace listlab {

namespace {

// Size reduction only (no swaps): enough to tighten the half-diagonal
// covering bound at desk scale.
Eigen::MatrixXd size_reduce(Eigen::MatrixXd b) {
  const int n = static_cast<int>(b.cols());
  for (int pass = 0; pass < 2; ++pass) {
    // Gram-Schmidt recomputed per pass; n <= 64 so cost is negligible.
    Eigen::MatrixXd gs = b;
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        mu(i, j) = b.col(i).dot(gs.col(j)) / gs.col(j).squaredNorm();
        gs.col(i) -= mu(i, j) * gs.col(j);
      }
    }
    bool changed = false;
    for (int i = 1; i < n; ++i) {
      for (int j = i - 1; j >= 0; --j) {
        double m = std::round(b.col(i).dot(gs.col(j)) / gs.col(j).squaredNorm());
        if (m != 0.0) {
          b.col(i) -= m * b.col(j);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return b;
}

bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

Lattice::Lattice(const Eigen::MatrixXd& basis) : basis_(basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0)
    throw std::invalid_argument("Lattice: basis must be square and nonempty");
  n_ = static_cast<int>(basis.rows());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis_);
  q_ = qr.householderQ();
  tri_ = qr.matrixQR().triangularView<Eigen::Upper>();
  // Normalize so the triangular factor has a positive diagonal.
  for (int i = 0; i < n_; ++i) {
    if (tri_(i, i) < 0) {
      tri_.row(i) = -tri_.row(i);
      q_.col(i) = -q_.col(i);
    }
  }
  det_ = std::abs(tri_.diagonal().prod());
  if (!(det_ > 0.0) || !std::isfinite(det_))
    throw std::invalid_argument("Lattice: basis is singular");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis_);
  cond_ = svd.singularValues()(0) / svd.singularValues()(n_ - 1);
  inv_ = basis_.inverse();
  cov_upper_ = 0.5 * std::sqrt(size_reduce(basis_).colwise().squaredNorm().sum());
}

Lattice Lattice::cubic(int n, double scale) {
  return Lattice(scale * Eigen::MatrixXd::Identity(n, n));
}

Lattice Lattice::hexagonal() {
  Eigen::MatrixXd b(2, 2);
  b << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  return Lattice(b);
}

std::vector<Eigen::VectorXi> Lattice::enumerate_coeffs_in_ball(
    const Eigen::VectorXd& center, double r, long max_points) const {
  if (r < 0) throw std::domain_error("enumerate_in_ball: r < 0");
  if (center.size() != n_)
    throw std::invalid_argument("enumerate_in_ball: center dimension");
  // sound pre-check: the count is at least vol(B(r - rcov))/det, so an
  // oversized lower estimate proves the cap will be blown before any work.
  // (The (r + rcov) upper estimate is uselessly loose for skewed bases.)
  if (r > cov_upper_ &&
      ball_volume(n_, r - cov_upper_) / det_ > static_cast<double>(max_points))
    throw BudgetError("enumerate_in_ball: estimated count exceeds cap");
  long nodes = 0;
  const long node_budget = 200 * max_points + 1'000'000;

  const double r_sq = r * r * (1.0 + kMembershipRelTol);
  const Eigen::VectorXd c = q_.transpose() * center;  // ||tri a - c|| target

  std::vector<Eigen::VectorXi> out;
  Eigen::VectorXi a = Eigen::VectorXi::Zero(n_);
  // partial[i] = squared residual accumulated from levels > i
  std::vector<double> partial(n_ + 1, 0.0);
  // proj[i] = sum_{j>i} tri_(i,j) a_j, maintained on descent
  std::vector<double> proj(n_, 0.0);

  // Iterative depth-first enumeration, level i from n_-1 down to 0.
  std::vector<long> lo(n_), hi(n_);
  int level = n_ - 1;
  bool descend = true;
  while (true) {
    if (descend) {
      proj[level] = 0.0;
      for (int j = level + 1; j < n_; ++j) proj[level] += tri_(level, j) * a[j];
      double rem = r_sq - partial[level + 1];
      if (rem < 0) rem = 0;
      double t = std::sqrt(rem);
      double mid = (c[level] - proj[level]) / tri_(level, level);
      double half = t / tri_(level, level);
      lo[level] = static_cast<long>(std::ceil(mid - half - 1e-12));
      hi[level] = static_cast<long>(std::floor(mid + half + 1e-12));
      a[level] = static_cast<int>(lo[level]);
    } else {
      ++a[level];
    }
    if (a[level] > hi[level]) {
      ++level;
      if (level >= n_) break;
      descend = false;
      continue;
    }
    if (++nodes > node_budget)
      throw BudgetError("enumerate_in_ball: search node budget exceeded",
                        static_cast<long>(out.size()));
    double resid = tri_(level, level) * a[level] + proj[level] - c[level];
    double s = partial[level + 1] + resid * resid;
    if (s > r_sq) {
      descend = false;
      continue;
    }
    partial[level] = s;
    if (level == 0) {
      out.push_back(a);
      if (static_cast<long>(out.size()) > max_points)
        throw BudgetError("enumerate_in_ball: count exceeds cap",
                          static_cast<long>(out.size()));
      descend = false;
    } else {
      --level;
      descend = true;
    }
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

std::vector<Eigen::VectorXd> Lattice::enumerate_in_ball(
    const Eigen::VectorXd& center, double r, long max_points) const {
  std::vector<Eigen::VectorXd> pts;
  for (const auto& a : enumerate_coeffs_in_ball(center, r, max_points))
    pts.push_back(point(a));
  return pts;
}

Eigen::VectorXd Lattice::quantize(const Eigen::VectorXd& x) const {
  Eigen::VectorXd t = inv_ * x;
  Eigen::VectorXi babai(n_);
  for (int i = 0; i < n_; ++i) babai[i] = static_cast<int>(std::llround(t[i]));
  double r0 = (x - point(babai)).norm();
  auto coeffs = enumerate_coeffs_in_ball(x, r0 * (1.0 + 1e-9) + 1e-12);
  double best_sq = std::numeric_limits<double>::infinity();
  Eigen::VectorXi best = babai;
  for (const auto& a : coeffs) {  // lex order: first within-tolerance min wins
    double d = (x - point(a)).squaredNorm();
    if (d < best_sq * (1.0 - kMembershipRelTol)) {
      best_sq = d;
      best = a;
    }
  }
  return point(best);
}

double Lattice::packing_radius() const {
  double r = basis_.colwise().norm().minCoeff();
  r = std::min(r, 2.0 * effective_radius());
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_);
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : enumerate_coeffs_in_ball(zero, r)) {
      if (a.isZero()) continue;
      best = std::min(best, point(a).norm());
    }
    if (std::isfinite(best)) return 0.5 * best;
    r *= 1.5;  // ball held only the origin; grow until a neighbor appears
  }
}

double Lattice::effective_radius() const {
  return std::pow(det_ / ball_volume(n_, 1.0), 1.0 / n_);
}

RadiiReport Lattice::covering_radius_bounds(int samples,
                                            std::mt19937_64& rng) const {
  RadiiReport rep;
  rep.r_pack = packing_radius();
  rep.r_eff = effective_radius();
  rep.r_cov_upper = cov_upper_;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd coeff(n_);
    for (int i = 0; i < n_; ++i) coeff[i] = u(rng);
    worst = std::max(worst, mod_lattice(basis_ * coeff).norm());
  }
  rep.r_cov_lower = worst;
  return rep;
}

bool Lattice::contains(const Eigen::VectorXd& x) const {
  Eigen::VectorXd a = inv_ * x;
  double resid = 0.0;
  for (int i = 0; i < n_; ++i)
    resid = std::max(resid, std::abs(a[i] - std::round(a[i])));
  if (resid > kIntegralityTol && resid < 1e-5)
    std::cerr << "listlab: contains() residual " << resid
              << " in the ill-conditioned band; treating as non-member\n";
  return resid <= kIntegralityTol;
}

Lattice Lattice::scale(double c) const {
  if (c == 0.0) throw std::domain_error("scale: c must be nonzero");
  return Lattice(c * basis_);
}

bool sublattice_check(const Lattice& coarse, const Lattice& fine) {
  if (coarse.dim() != fine.dim()) return false;
  for (int j = 0; j < coarse.dim(); ++j)
    if (!fine.contains(coarse.basis().col(j))) return false;
  return true;
}

}  // namespace listlab
