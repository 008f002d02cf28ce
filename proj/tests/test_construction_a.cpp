#include <doctest.h>

#include <cmath>
#include <set>

#include "listlab/construction_a.hpp"
#include "listlab/rng.hpp"

using namespace listlab;

TEST_CASE("parameter selection") {
  ChannelParams ch = ChannelParams::make(4, 4.0, 1.0, 0.8);
  ConstructionAParams p = select_params(ch);
  CHECK(p.q == 29);
  CHECK(p.alpha == 28);
  // Bertrand bracket
  double growth = std::exp2(0.8 / 8.0) - 1.0;
  double lo = std::sqrt(4.0) / growth;
  CHECK(p.q >= lo);
  CHECK(p.q <= 2.0 * lo + 2.0);
  CHECK(p.realized_rate == doctest::Approx((p.kappa / 4.0) * std::log2(29.0)));

  ChannelParams wide = ChannelParams::make(4, 4.0, 1.0, 0.95);
  CHECK(select_params(wide).delta_out_of_range);
}

TEST_CASE("construction A lattice structure") {
  // q=2, C = {00, 11}
  LinearCodeFq rep;
  rep.q = 2;
  rep.n = 2;
  rep.kappa = 1;
  rep.G.resize(2, 1);
  rep.G << 1, 1;
  rep.rank = 1;
  Lattice lat = build_construction_a(rep);
  CHECK(lat.det() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lat.contains(Eigen::Vector2d(1, 1)));
  CHECK(lat.contains(Eigen::Vector2d(0, 2)));
  CHECK_FALSE(lat.contains(Eigen::Vector2d(1, 0)));

  // kappa = 0 -> qZ^n
  LinearCodeFq zero;
  zero.q = 3;
  zero.n = 3;
  zero.kappa = 0;
  zero.G.resize(3, 0);
  zero.rank = 0;
  Lattice z = build_construction_a(zero);
  CHECK(z.det() == doctest::Approx(27.0));
  CHECK(z.contains(Eigen::Vector3d(3, 0, -6)));
  CHECK_FALSE(z.contains(Eigen::Vector3d(1, 0, 0)));

  // kappa = n full rank -> Z^n
  auto rng = make_rng(4, "ca-full", 0);
  LinearCodeFq full = random_code(3, 3, 3, rng);
  Lattice zn = build_construction_a(full);
  CHECK(zn.det() == doctest::Approx(1.0));
  CHECK(zn.contains(Eigen::Vector3d(0, 1, 0)));
}

TEST_CASE("membership characterization: integral and codeword mod q") {
  auto rng = make_rng(4, "ca-member", 1);
  LinearCodeFq code = random_code(3, 4, 2, rng);
  Lattice lat = build_construction_a(code);
  std::set<std::vector<long>> words;
  for (const auto& w : code.enumerate_codewords())
    words.insert({w.data(), w.data() + w.size()});
  // every enumerated lattice point reduces to a codeword mod q
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  for (const auto& v : lat.enumerate_in_ball(zero, 3.0)) {
    std::vector<long> red(4);
    for (int i = 0; i < 4; ++i) {
      long c = static_cast<long>(std::llround(v[i]));
      CHECK(std::abs(v[i] - c) < 1e-9);
      red[i] = ((c % 3) + 3) % 3;
    }
    CHECK(words.count(red) == 1);
  }
}

TEST_CASE("nested pair structure and psi") {
  auto rng = make_rng(8, "ca-nested", 0);
  Lattice coarse = Lattice::cubic(2, 6.0);
  LinearCodeFq code = random_code(3, 2, 1, rng);
  NestedPair pair = build_nested(code, coarse, 0.5);
  CHECK(sublattice_check(pair.coarse, pair.fine));
  CHECK(pair.fine.det() * 3.0 == doctest::Approx(pair.coarse.det()).epsilon(1e-10));

  auto cb = codebook(pair);
  CHECK(cb.size() == 3);

  IntVector m0 = IntVector::Zero(1);
  CHECK(encode_psi(pair, m0).isZero(1e-12));

  // every codeword lies in the fine lattice and in V(coarse)
  for (const auto& w : cb) {
    CHECK(pair.fine.contains(w));
    CHECK((pair.coarse.mod_lattice(w) - w).norm() < 1e-9);
    CHECK(w.norm() <= pair.coarse.cov_upper() * (1.0 + 1e-9));
  }
}

TEST_CASE("codebook size q^kappa and psi bijective for acceptance triples") {
  struct Cfg { long q; int kappa; int n; };
  for (Cfg cfg : {Cfg{2, 2, 3}, Cfg{3, 2, 4}, Cfg{5, 1, 4}}) {
    auto rng = make_rng(8, "ca-bij", cfg.q * 100 + cfg.kappa * 10 + cfg.n);
    Lattice coarse = Lattice::cubic(cfg.n, 4.0);
    LinearCodeFq code = random_code(cfg.q, cfg.n, cfg.kappa, rng);
    NestedPair pair = build_nested(code, coarse, 0.5);
    long expect = 1;
    for (int i = 0; i < cfg.kappa; ++i) expect *= cfg.q;
    CHECK(static_cast<long>(codebook(pair).size()) == expect);
    double lhs = pair.fine.det() * std::pow(static_cast<double>(cfg.q), cfg.kappa);
    CHECK(std::abs(lhs - pair.coarse.det()) <= 1e-8 * pair.coarse.det());
  }
}

TEST_CASE("counting sandwich has no violations") {
  auto rng = make_rng(9, "ca-sandwich", 0);
  for (long q : {2L, 3L, 5L}) {
    SandwichReport a = verify_count_sandwich(Lattice::cubic(2), q, 50, rng);
    CHECK(a.violations == 0);
    SandwichReport b = verify_count_sandwich(Lattice::hexagonal(), q, 50, rng);
    CHECK(b.violations == 0);
  }
}

TEST_CASE("analytic exponent") {
  CHECK(analytic_ell(0.8, 28) == 14);  // (8/(5*0.8)) log2(112) = 13.61 -> 14
  auto rng = make_rng(10, "ca-trial", 0);
  NestedListTrial t =
      nested_list_trial(3, 2, 0.8, 28, Lattice::cubic(3, 4.0), 0.25, rng);
  CHECK(t.empirical_list >= 1);
  CHECK(t.codebook_size == 9);
  CHECK(t.ell == 14);
}
