#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "wgf/continuum.hpp"
#include "wgf/error.hpp"
#include "wgf/integrate.hpp"

using namespace wgf;

namespace {

ContinuumConfig fig6(double ws2) {
  ContinuumConfig c;
  c.ws2 = ws2;
  return c;
}

// Lowest eigenvalue of the second-order finite-difference operator
// -1/2 d2/dx2 - p exp(-(x/w)^6) on n interior points, by Sturm-count bisection.
double fd_ground_energy(double p, double w, double half_width, int n) {
  const double dx = 2.0 * half_width / (n + 1);
  const double off = -0.5 / (dx * dx);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) {
    const double x = -half_width + (i + 1) * dx;
    diag[i] = 1.0 / (dx * dx) - p * std::exp(-std::pow(x / w, 6));
  }
  const auto below = [&](double e) {
    int count = 0;
    double q = diag[0] - e;
    if (q < 0) ++count;
    for (int i = 1; i < n; ++i) {
      q = diag[i] - e - off * off / (q == 0.0 ? 1e-300 : q);
      if (q < 0) ++count;
    }
    return count;
  };
  double lo = -p - 1.0, hi = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double max_trace_difference(const BpmResult& a, const BpmResult& b) {
  REQUIRE(a.trace.size() == b.trace.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].z == doctest::Approx(b.trace[i].z));
    for (std::size_t g = 0; g < a.trace[i].guides.size(); ++g) {
      worst = std::max(worst, std::abs(a.trace[i].guides[g] / a.trace[i].total -
                                       b.trace[i].guides[g] / b.trace[i].total));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("guide layout") {
  const auto pos = fig6(2.22).guide_positions();
  REQUIRE(pos.size() == 3);
  CHECK(pos[0] == doctest::Approx(3.2));
  CHECK(pos[1] == doctest::Approx(0.0));
  CHECK(pos[2] == doctest::Approx(-2.22));

  ContinuumConfig five = fig6(1.2);
  five.n_guides = 5;
  const auto p5 = five.guide_positions();
  CHECK(p5[0] - p5[1] == doctest::Approx(3.2));
  CHECK(p5[3] - p5[4] == doctest::Approx(1.2));
}

TEST_CASE("refractive index") {
  const auto c = fig6(3.2);
  const double crest = std::numbers::pi / (2.0 * c.omega);
  CHECK(refractive_index(c, 3.2, crest) == doctest::Approx(1.0 + c.mu).epsilon(1e-12));
  CHECK(refractive_index(c, 3.2, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(refractive_index(c, 0.0, crest) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(refractive_index(c, 1.6, 0.0) < 1e-10);
  CHECK(refractive_index(c, 3.2 + 0.3, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("config validation") {
  auto c = fig6(3.2);
  c.grid.n_x = 1000;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = fig6(3.2);
  c.ws1 = 19.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = fig6(0.0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = fig6(3.2);
  c.grid.dz = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("fundamental mode") {
  const ContinuumConfig c;
  const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
  CHECK(mode.field.power() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mode.beta > 0.0);
  CHECK(mode.beta < c.p);
  const auto& s = mode.field.samples;
  const int n = c.grid.n_x;
  double asym = 0.0;
  for (int i = 1; i < n; ++i) asym = std::max(asym, std::abs(s[i] - s[n - i]));
  CHECK(asym < 1e-8);
  CHECK(std::abs(s[n / 2].imag()) < 1e-12);
  CHECK(s[n / 2].real() > 0.0);

  const double coarse = fd_ground_energy(c.p, c.w_x, c.grid.half_width, 4095);
  const double fine = fd_ground_energy(c.p, c.w_x, c.grid.half_width, 8191);
  const double extrapolated = (4.0 * fine - coarse) / 3.0;
  CHECK(mode.beta == doctest::Approx(-extrapolated).epsilon(2e-4));
}

TEST_CASE("property: deeper wells bind more strongly") {
  const TransverseGrid grid;
  double previous = 0.0;
  for (const double p : {1.0, 2.0, 2.78, 5.0, 10.0}) {
    const auto m = fundamental_mode(p, 0.3, grid);
    CHECK(m.beta > previous);
    CHECK(m.beta < p);
    previous = m.beta;
  }
}

TEST_CASE("shift by a grid multiple is a roll") {
  const ContinuumConfig c;
  const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
  const int k = 37;
  const auto shifted = shift_field(mode.field, k * c.grid.dx());
  double worst = 0.0;
  const int n = c.grid.n_x;
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(shifted.samples[i] - mode.field.samples[(i - k + n) % n]));
  }
  CHECK(worst < 1e-10);
  const auto back = shift_field(shift_field(mode.field, 1.234), -1.234);
  worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(back.samples[i] - mode.field.samples[i]));
  CHECK(worst < 1e-10);
}

TEST_CASE("driven propagation conserves power") {
  auto c = fig6(2.22);
  c.grid.z_max = 40.0;
  const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
  const auto r = bpm_propagate(c, launch_guide(c, mode, 0), {10, {}});
  CHECK(r.max_power_drift < 1e-6);
  CHECK(r.max_edge_fraction < kEdgePowerLimit);
  CHECK(r.trace.size() == static_cast<std::size_t>(std::lround(40.0 / (10 * c.grid.dz))) + 1);
  CHECK(r.trace.back().z == doctest::Approx(40.0));
}

TEST_CASE("symmetric supermode of a coupler stays balanced") {
  ContinuumConfig c;
  c.n_guides = 2;
  c.mu = 0.0;
  c.grid.z_max = 150.0;
  const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
  auto a = launch_guide(c, mode, 0);
  const auto b = launch_guide(c, mode, 1);
  for (std::size_t i = 0; i < a.samples.size(); ++i) a.samples[i] += b.samples[i];
  const double norm = std::sqrt(a.power());
  for (auto& v : a.samples) v /= norm;
  const auto r = bpm_propagate(c, a, {25, {}});
  double worst = 0.0;
  for (const auto& s : r.trace) worst = std::max(worst, std::abs(s.guides[0] / s.total - 0.5));
  CHECK(worst < 1e-3);
}

TEST_CASE("coupler beat period at the lattice spacing") {
  const auto cal = calibrate_coupling(3.2, 2.78, 0.3, TransverseGrid{});
  CHECK(cal.beat_period == doctest::Approx(100.0).epsilon(0.05));
  CHECK(cal.coupling == doctest::Approx(std::numbers::pi / cal.beat_period));
}

TEST_CASE("leakage into the window edge is reported") {
  ContinuumConfig c;
  c.n_guides = 1;
  c.mu = 0.0;
  c.grid.z_max = 100.0;
  Field f{std::vector<cplx>(c.grid.n_x), c.grid.dx(), 0.0};
  for (int i = 0; i < c.grid.n_x; ++i) {
    const double x = c.grid.x(i) + 6.0;
    f.samples[i] = std::exp(-x * x / 0.02);
  }
  const double norm = std::sqrt(f.power());
  for (auto& v : f.samples) v /= norm;
  CHECK_THROWS_AS(bpm_propagate(c, f), NumericalError);
}

TEST_CASE("input must be normalised") {
  const ContinuumConfig c;
  const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
  auto f = launch_guide(c, mode, 0);
  for (auto& v : f.samples) v *= 1.1;
  CHECK_THROWS_AS(bpm_propagate(c, f), ConfigError);
}

TEST_CASE("snapshots and csv") {
  auto c = fig6(3.2);
  c.grid.z_max = 2.0;
  const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
  const auto r = bpm_propagate(c, launch_guide(c, mode, 0), {50, {1.0, 0.0}});
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].z == 0.0);
  CHECK(r.snapshots[1].z == doctest::Approx(1.0));
  std::ostringstream os;
  write_power_csv(os, r);
  CHECK(os.str().rfind("z,P_guide1,P_guide2,P_guide3,P_total\n0,", 0) == 0);
  std::ostringstream dump;
  write_field_dump(dump, r.snapshots[1].field, c.grid.half_width);
  CHECK(dump.str().rfind("# z = 1", 0) == 0);
}

TEST_CASE("batch runs match single runs") {
  std::vector<ContinuumConfig> cs{fig6(3.2), fig6(2.22)};
  for (auto& c : cs) c.grid.z_max = 10.0;
  const auto batch = bpm_propagate_batch(cs, 2, 5);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const auto mode = fundamental_mode(cs[i].p, cs[i].w_x, cs[i].grid);
    const auto single = bpm_propagate(cs[i], launch_guide(cs[i], mode, 0), {5, {}});
    CHECK(max_trace_difference(batch[i], single) == 0.0);
  }
}

TEST_CASE("splitting is fourth order in dz") {
  // Guide powers at z_max; the raw field is dominated by stiff radiation
  // modes that never enter the asymptotic regime.
  auto c = fig6(2.22);
  c.grid.z_max = 20.0;
  const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
  const auto input = launch_guide(c, mode, 0);
  std::vector<std::vector<double>> out;
  for (const double dz : {0.08, 0.04, 0.02}) {
    c.grid.dz = dz;
    const auto r = bpm_propagate(c, input, {1000000, {}});
    REQUIRE(r.trace.back().z == doctest::Approx(c.grid.z_max));
    out.push_back(r.trace.back().guides);
  }
  const auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    double w = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g) w = std::max(w, std::abs(a[g] - b[g]));
    return w;
  };
  const double ratio = dist(out[0], out[1]) / dist(out[1], out[2]);
  CHECK(ratio == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("grid convergence of the three-guide traces") {
  for (const double ws2 : {3.2, 2.22, 1.2}) {
    const auto base = fig6(ws2);
    auto fine = base;
    fine.grid.n_x *= 2;
    fine.grid.dz /= 2.0;
    const auto m0 = fundamental_mode(base.p, base.w_x, base.grid);
    const auto m1 = fundamental_mode(fine.p, fine.w_x, fine.grid);
    const auto a = bpm_propagate(base, launch_guide(base, m0, 0), {50, {}});
    const auto b = bpm_propagate(fine, launch_guide(fine, m1, 0), {100, {}});
    INFO("ws2 = " << ws2);
    CHECK(max_trace_difference(a, b) < 1e-3);
  }
}

TEST_CASE("coupled-mode model reproduces the continuum minima") {
  const auto drive = calibrate_drive(fig6(3.2));
  CHECK(drive.a_per_mu > 0.0);
  for (const double ws2 : {3.2, 2.22, 1.2}) {
    const auto c = fig6(ws2);
    const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
    const double continuum = bpm_propagate(c, launch_guide(c, mode, 0), {10, {}}).min_fraction(0);
    const auto lat = lattice_equivalent(c, drive);
    const double lattice = propagate_min_population(lat, site_excitation(3, 0), c.grid.z_max,
                                                    {2000, 200}, 0);
    INFO("ws2 = " << ws2 << ": continuum " << continuum << ", lattice " << lattice);
    CHECK(std::abs(continuum - lattice) < 0.15);
  }
}
