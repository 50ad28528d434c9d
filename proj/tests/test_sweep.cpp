#include <doctest.h>

#include <cmath>
#include <sstream>

#include "wgf/error.hpp"
#include "wgf/sweep.hpp"

using namespace wgf;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.base = {3, 1.0, 1.0, 6.6, 3.0};
  s.parameter = SweepParameter::omega2;
  s.grid = linear_grid(0.0, 8.0, 24);
  s.z_end = ZEndPolicy::parse("20T");
  s.stepping = {400, 40};
  return s;
}

std::string csv(const SweepResult& r) {
  std::ostringstream os;
  write_sweep_csv(os, r);
  return os.str();
}

SweepRow row(double param, double min_p1) {
  SweepRow r;
  r.param = param;
  r.min_p1 = min_p1;
  return r;
}

}  // namespace

TEST_CASE("grid endpoints are exact") {
  const auto g = linear_grid(0.5, 9.0, 400);
  REQUIRE(g.size() == 400);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == 9.0);
  CHECK(linear_grid(2.0, 3.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("config_at maps each axis") {
  SweepSpec s = small_spec();
  CHECK(config_at(s, 2.5).omega2 == 2.5);
  s.parameter = SweepParameter::amplitude_over_omega;
  CHECK(config_at(s, 2.0).amplitude == doctest::Approx(6.0));
  CHECK(config_at(s, 2.0).omega == 3.0);
  s.parameter = SweepParameter::omega;
  CHECK(config_at(s, 1.5).omega == 1.5);
  CHECK(config_at(s, 1.5).amplitude == 6.6);
}

TEST_CASE("parameter names") {
  for (auto p : {SweepParameter::omega2, SweepParameter::amplitude_over_omega,
                 SweepParameter::omega}) {
    CHECK(parse_sweep_parameter(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_sweep_parameter("Omega2"), ConfigError);
}

TEST_CASE("spec validation") {
  SweepSpec s = small_spec();
  s.grid = {1.0, 1.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.grid.clear();
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.initial_site = 3;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.parameter = SweepParameter::omega;
  s.grid = {-1.0, 1.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("parallel and serial sweeps are byte-identical") {
  const auto spec = small_spec();
  const std::string reference = csv(run_sweep_serial(spec));
  for (int workers : {1, 2, 3, 4}) CHECK(csv(run_sweep(spec, workers)) == reference);
  CHECK(csv(run_sweep(spec, 4)) == csv(run_sweep(spec, 4)));
}

TEST_CASE("refined sweeps are deterministic and add points") {
  auto spec = small_spec();
  spec.refine = true;
  const auto serial = run_sweep_serial(spec);
  CHECK(serial.size() > spec.grid.size());
  CHECK(csv(run_sweep(spec, 3)) == csv(serial));
  for (std::size_t i = 1; i < serial.size(); ++i) {
    CHECK(serial.rows[i].param > serial.rows[i - 1].param);
  }
}

TEST_CASE("three-site rows carry the tracked dark mode") {
  const auto r = run_sweep(small_spec(), 2);
  REQUIRE(r.size() == 24);
  CHECK(r.n_sites == 3);
  for (const auto& rw : r.rows) {
    CHECK_FALSE(rw.failed);
    CHECK(rw.dark_present);
    REQUIRE(rw.dark_populations.size() == 3);
    double sum = 0.0;
    for (double p : rw.dark_populations) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rw.min_p1 >= 0.0);
    CHECK(rw.min_p1 <= 1.0);
  }
}

TEST_CASE("failed points are isolated and written as NaN") {
  auto spec = small_spec();
  spec.parameter = SweepParameter::amplitude_over_omega;
  spec.base.omega = 1.0;
  spec.stepping = {1000, 10};
  spec.z_end = ZEndPolicy::parse("5T");
  spec.grid = {1.0, 1e5};
  const auto r = run_sweep(spec, 2);
  REQUIRE(r.size() == 2);
  CHECK_FALSE(r.rows[0].failed);
  CHECK(r.rows[1].failed);
  CHECK_FALSE(r.rows[1].error.empty());
  CHECK(r.failures() == 1);
  const auto text = csv(r);
  CHECK(text.find("100000,nan") != std::string::npos);
}

TEST_CASE("csv header and dark columns") {
  const auto text = csv(run_sweep_serial(small_spec()));
  CHECK(text.rfind("param,min_p1,eps_1,eps_2,eps_3,dark_present,dark_p1,dark_p2,dark_p3\n", 0) ==
        0);

  SweepSpec four = small_spec();
  four.base.n_sites = 4;
  four.grid = {2.0, 3.3};
  const auto t4 = csv(run_sweep_serial(four));
  CHECK(t4.find(",0,,,,\n") != std::string::npos);
}

TEST_CASE("dip diagnostics") {
  SweepResult r;
  r.n_sites = 3;
  const double ys[] = {0.8, 0.7, 0.2, 0.0, 0.1, 0.6, 0.9};
  for (int i = 0; i < 7; ++i) r.rows.push_back(row(i * 0.5, ys[i]));
  CHECK(argmin_min_p1(r, 0.0, 3.0) == 3);
  CHECK(argmax_min_p1(r, 0.0, 1.0) == 0);
  CHECK(argmin_min_p1(r, 10.0, 11.0) == r.size());
  // Crossings at 0.25 interpolate to 0.95 and 2.15.
  CHECK(width_below(r, 3, 0.25) == doctest::Approx(1.2));
  CHECK(width_below(r, 0, 0.25) == 0.0);
}

TEST_CASE("non-dark gap is circular") {
  SweepRow r;
  r.omega = 3.0;
  r.quasienergies = {-1.45, 0.0, 1.45};
  r.dark_present = true;
  r.dark_populations = {1.0, 0.0, 0.0};
  CHECK(nondark_min_gap(r) == doctest::Approx(0.1));
}
