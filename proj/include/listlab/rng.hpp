#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string_view>

namespace listlab {

// splitmix64: cheap avalanche mix used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Counter-mode seed schedule: the generator for trial i depends only on
// (master seed, experiment tag, i), never on scheduling or worker count.
inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view tag,
                                std::uint64_t trial) {
  std::uint64_t s = splitmix64(master ^ splitmix64(fnv1a(tag) + trial));
  return std::mt19937_64(s);
}

inline Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// Uniform on the sphere of the given radius.
inline Eigen::VectorXd uniform_sphere(int n, double radius,
                                      std::mt19937_64& rng) {
  Eigen::VectorXd v = gaussian_vector(n, rng);
  double nv = v.norm();
  while (nv == 0.0) {
    v = gaussian_vector(n, rng);
    nv = v.norm();
  }
  return v * (radius / nv);
}

// Uniform in the solid ball of the given radius.
inline Eigen::VectorXd uniform_ball(int n, double radius,
                                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v = uniform_sphere(n, radius, rng);
  return v * std::pow(u(rng), 1.0 / n);
}

inline Eigen::VectorXd uniform_cube(int n, double side, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, side);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace listlab
