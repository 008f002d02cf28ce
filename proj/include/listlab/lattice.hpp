#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

namespace listlab {

// Exact-integrality tolerance for coefficient solves (contains, sublattice).
inline constexpr double kIntegralityTol = 1e-7;

struct RadiiReport {
  double r_pack = 0.0;
  double r_eff = 0.0;
  double r_cov_lower = 0.0;  // Monte Carlo dither bound
  double r_cov_upper = 0.0;  // parallelepiped half-diagonal of reduced basis
  std::string lower_method = "mc-dither";
  std::string upper_method = "reduced-half-diagonal";
};

// Full-rank lattice given by basis columns. Immutable after construction;
// determinant, the triangular enumeration factor, and the basis inverse are
// cached up front.
class Lattice {
 public:
  explicit Lattice(const Eigen::MatrixXd& basis);

  static Lattice cubic(int n, double scale = 1.0);  // scale * Z^n
  static Lattice hexagonal();                       // [[1, 1/2], [0, sqrt3/2]]

  int dim() const { return n_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  double det() const { return det_; }
  double condition_number() const { return cond_; }

  Eigen::VectorXd point(const Eigen::VectorXi& coeffs) const {
    return basis_ * coeffs.cast<double>();
  }

  // All lattice points within r of center (squared-distance membership
  // tolerance), ordered lexicographically by coefficient vector. Throws
  // BudgetError when the volume-based estimate or the actual count
  // exceeds max_points.
  std::vector<Eigen::VectorXd> enumerate_in_ball(
      const Eigen::VectorXd& center, double r,
      long max_points = 5'000'000) const;
  std::vector<Eigen::VectorXi> enumerate_coeffs_in_ball(
      const Eigen::VectorXd& center, double r,
      long max_points = 5'000'000) const;

  // Closest lattice point; ties broken by lexicographically smallest
  // coefficient vector.
  Eigen::VectorXd quantize(const Eigen::VectorXd& x) const;
  Eigen::VectorXd mod_lattice(const Eigen::VectorXd& x) const {
    return x - quantize(x);
  }

  double packing_radius() const;
  double effective_radius() const;
  RadiiReport covering_radius_bounds(int samples, std::mt19937_64& rng) const;

  bool contains(const Eigen::VectorXd& x) const;
  Lattice scale(double c) const;

  // Half-diagonal covering bound from the size-reduced basis (upper bracket).
  double cov_upper() const { return cov_upper_; }

 private:
  int n_;
  Eigen::MatrixXd basis_;
  double det_;
  double cond_;
  Eigen::MatrixXd tri_;      // upper-triangular factor, basis = Q * tri_
  Eigen::MatrixXd q_;        // orthogonal factor
  Eigen::MatrixXd inv_;      // basis inverse
  double cov_upper_;
};

bool sublattice_check(const Lattice& coarse, const Lattice& fine);

}  // namespace listlab
