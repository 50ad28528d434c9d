#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "wgf/error.hpp"
#include "wgf/floquet.hpp"
#include "wgf/integrate.hpp"

using namespace wgf;

namespace {

double circular_distance(double a, double b, double omega) {
  double d = std::fmod(std::abs(a - b), omega);
  return std::min(d, omega - d);
}

}  // namespace

TEST_CASE("three-site drive has a unit Floquet multiplier") {
  LatticeConfig c{3, 1.0, 1.0, 6.6, 3.0};
  const auto u = monodromy(c);
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
  double best = 1.0;
  for (int k = 0; k < 3; ++k) best = std::min(best, std::abs(es.eigenvalues()[k] - cplx(1.0)));
  CHECK(best < 1e-8);
}

TEST_CASE("undriven folding") {
  LatticeConfig c{3, 1.0, 3.0, 0.0, 3.0};
  const auto eps = quasienergies(monodromy(c), c.omega);
  REQUIRE(eps.size() == 3);
  CHECK(eps[0] == doctest::Approx(-0.16227766016838).epsilon(1e-9));
  CHECK(std::abs(eps[1]) < 1e-10);
  CHECK(eps[2] == doctest::Approx(0.16227766016838).epsilon(1e-9));
}

TEST_CASE("fast drive renormalises the dimer coupling") {
  // Independent adaptive-integrator value; the J0 estimate is 0.98794.
  LatticeConfig c{2, 1.0, 1.0, 6.6, 30.0};
  const auto eps = quasienergies(monodromy(c), c.omega);
  CHECK(eps[0] == doctest::Approx(-0.987883513966603).epsilon(1e-8));
  CHECK(eps[1] == doctest::Approx(0.987883513966603).epsilon(1e-8));
}

TEST_CASE("fold into (-omega/2, omega/2]") {
  const double w = 2.0;
  const double t = 2.0 * std::numbers::pi / w;
  CHECK(fold_quasienergy(std::numbers::pi, w) == doctest::Approx(w / 2.0));
  CHECK(fold_quasienergy(-std::numbers::pi, w) == doctest::Approx(w / 2.0));
  CHECK(fold_quasienergy(0.5, w) == doctest::Approx(-0.5 / t));
  testing::Gen gen(31);
  for (int i = 0; i < 100; ++i) {
    const double e = fold_quasienergy(gen.uniform(-std::numbers::pi, std::numbers::pi), w);
    CHECK(e > -w / 2.0);
    CHECK(e <= w / 2.0);
  }
}

TEST_CASE("dark mode of the three-site chain") {
  LatticeConfig c{3, 1.0, 1.0, 6.6, 3.0};
  const auto sol = solve_floquet(c);
  REQUIRE(sol.dark_index.has_value());
  CHECK_FALSE(sol.dark_ambiguous);
  const auto p = sol.avg_populations.row(static_cast<Eigen::Index>(*sol.dark_index));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p[0] > 0.5);
  // Micromotion keeps about 9% in the centre guide at this drive frequency.
  CHECK(p[0] == doctest::Approx(0.90409132).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.08631845).epsilon(1e-5));
  CHECK(p[2] == doctest::Approx(0.00959023).epsilon(1e-4));
}

TEST_CASE("dark mode persists at omega2 = 2") {
  LatticeConfig c{3, 1.0, 2.0, 6.6, 3.0};
  CHECK(solve_floquet(c).dark_index.has_value());
}

TEST_CASE("even chains have no zero branch away from crossings") {
  for (const double w2 : {0.7, 2.0, 3.3, 5.1}) {
    LatticeConfig c{4, 1.0, w2, 6.6, 3.0};
    const auto sol = solve_floquet(c);
    CHECK_FALSE(sol.dark_index.has_value());
    CHECK_FALSE(sol.dark_ambiguous);
  }
}

TEST_CASE("dark search") {
  const auto unique = dark_floquet(std::vector<double>{-1.0, 2e-7, 1.0}, 1e-6);
  REQUIRE(unique.index.has_value());
  CHECK(*unique.index == 1);
  const auto none = dark_floquet(std::vector<double>{-1.0, 2e-6, 1.0}, 1e-6);
  CHECK_FALSE(none.index.has_value());
  const auto twice = dark_floquet(std::vector<double>{-1e-7, 1e-7, 1.0}, 1e-6);
  CHECK_FALSE(twice.index.has_value());
  CHECK(twice.ambiguous);
}

TEST_CASE("non-unitary input is rejected") {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(3, 3);
  u(0, 0) = 1.01;
  CHECK_THROWS_AS(floquet_spectrum(u, 1.0), NumericalError);
}

TEST_CASE("match_modes follows a shuffled basis") {
  testing::Gen gen(32);
  const int n = 5;
  const auto q = Eigen::HouseholderQR<Eigen::MatrixXcd>(Eigen::MatrixXcd::Random(n, n)).householderQ();
  const Eigen::MatrixXcd basis = q;
  std::vector<Eigen::VectorXcd> prev, cur(n);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  for (int k = 0; k < n; ++k) prev.push_back(basis.col(k));
  for (int k = 0; k < n; ++k) {
    const double phase = gen.uniform(0.0, 6.0);
    cur[perm[k]] = basis.col(k) * std::polar(1.0, phase);
  }
  CHECK(match_modes(prev, cur) == perm);
}

TEST_CASE("property: monodromy unitarity defect below 1e-8") {
  testing::Gen gen(33);
  for (int i = 0; i < testing::kCases; ++i) {
    const auto c = gen.lattice();
    CHECK(unitarity_defect(monodromy(c)) < 1e-8);
  }
}

TEST_CASE("property: modes return with exp(-i eps T)") {
  testing::Gen gen(34);
  for (int i = 0; i < testing::kCases; ++i) {
    const auto c = gen.lattice();
    const auto spec = floquet_spectrum(monodromy(c), c.omega);
    for (std::size_t k = 0; k < spec.modes.size(); ++k) {
      const auto after = propagate_to(c, {spec.modes[k], 0.0}, c.period());
      const cplx phase = std::polar(1.0, -spec.quasienergies[k] * c.period());
      CHECK((after.amplitudes - phase * spec.modes[k]).norm() < 1e-6);
    }
  }
}

TEST_CASE("property: quasienergies are symmetric about zero") {
  testing::Gen gen(35);
  for (int i = 0; i < testing::kCases; ++i) {
    const auto c = gen.lattice();
    const auto eps = quasienergies(monodromy(c), c.omega);
    std::vector<bool> used(eps.size(), false);
    for (std::size_t k = 0; k < eps.size(); ++k) {
      double best = c.omega;
      std::size_t at = 0;
      for (std::size_t m = 0; m < eps.size(); ++m) {
        const double d = circular_distance(eps[k], -eps[m], c.omega);
        if (!used[m] && d < best) {
          best = d;
          at = m;
        }
      }
      used[at] = true;
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("property: odd chains always carry a zero quasienergy") {
  testing::Gen gen(36);
  for (int i = 0; i < testing::kCases; ++i) {
    auto c = gen.lattice();
    c.n_sites = 2 * gen.integer(1, 3) + 1;
    const auto eps = quasienergies(monodromy(c), c.omega);
    double best = c.omega;
    for (const double e : eps) best = std::min(best, std::abs(e));
    CHECK(best < 1e-6 * c.omega);
  }
}

TEST_CASE("property: average populations of every mode sum to one") {
  testing::Gen gen(37);
  for (int i = 0; i < 10; ++i) {
    const auto c = gen.lattice();
    const auto sol = solve_floquet(c);
    for (Eigen::Index k = 0; k < sol.avg_populations.rows(); ++k) {
      CHECK(sol.avg_populations.row(k).sum() == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}
