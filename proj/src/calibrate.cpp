#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <omp.h>

#include "beam.hpp"
#include "wgf/continuum.hpp"
#include "wgf/error.hpp"
#include "wgf/integrate.hpp"

namespace wgf {
namespace {

/// Vertex of the least-squares parabola through the samples within
/// +-half_window of `center`.
double parabola_vertex(const std::vector<double>& z, const std::vector<double>& f, double center,
                       double half_window) {
  double s[5] = {0, 0, 0, 0, 0};
  double t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double u = z[i] - center;
    if (std::abs(u) > half_window) continue;
    double up = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += up;
      if (k < 3) t[k] += up * f[i];
      up *= u;
    }
  }
  Eigen::Matrix3d m;
  m << s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4];
  const Eigen::Vector3d coef = m.ldlt().solve(Eigen::Vector3d(t[0], t[1], t[2]));
  if (!(coef(2) < 0.0)) throw NumericalError("beat maximum is not resolved");
  return center - coef(1) / (2.0 * coef(2));
}

/// Golden-section maximisation of f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, int iterations) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Scan-then-refine maximiser; the scan runs in parallel.
template <class F>
double locate_peak(F&& f, double lo, double hi, int points, int workers) {
  std::vector<double> values(static_cast<std::size_t>(points));
  const double step = (hi - lo) / (points - 1);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < points; ++i) values[static_cast<std::size_t>(i)] = f(lo + i * step);
  const auto best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(points - 1, best + 1) * step;
  return golden_max(f, a, b, 12);
}

}  // namespace

CouplingCalibration calibrate_coupling(double spacing, double p, double w_x,
                                       const TransverseGrid& grid) {
  ContinuumConfig c;
  c.n_guides = 2;
  c.ws1 = spacing;
  c.p = p;
  c.w_x = w_x;
  c.mu = 0.0;
  c.omega = 0.0;
  c.grid = grid;
  c.validate();

  const auto mode = fundamental_mode(p, w_x, grid);
  detail::BeamPropagator beam(c, launch_guide(c, mode, 0));
  std::vector<double> zs{0.0};
  std::vector<double> frac;
  {
    const auto s = beam.powers();
    frac.push_back(s.guides[0] / s.total);
  }

  double z_down = -1.0, z_up = -1.0;
  const auto crossing = [&](std::size_t i) {
    const double a = frac[i - 1], b = frac[i];
    return zs[i - 1] + (0.5 - a) / (b - a) * (zs[i] - zs[i - 1]);
  };
  const auto n_steps = static_cast<long>(std::llround(grid.z_max / grid.dz));
  for (long step = 1; step <= n_steps; ++step) {
    beam.step();
    const auto s = beam.powers();
    zs.push_back(beam.z());
    frac.push_back(s.guides[0] / s.total);
    const std::size_t i = frac.size() - 1;
    if (z_down < 0.0) {
      if (frac[i] < 0.5) z_down = crossing(i);
      continue;
    }
    if (z_up < 0.0) {
      if (frac[i] > 0.5) z_up = crossing(i);
      continue;
    }
    const double half_beat = z_up - z_down;
    const double center = z_up + 0.5 * half_beat;
    if (beam.z() < center + 0.3 * half_beat) continue;

    double vertex = parabola_vertex(zs, frac, center, 0.2 * half_beat);
    vertex = parabola_vertex(zs, frac, vertex, 0.2 * half_beat);
    return {spacing, vertex, std::numbers::pi / vertex};
  }
  throw NumericalError(fmt::format(
      "no full beat observed within z_max = {} at spacing {}; increase z_max", grid.z_max,
      spacing));
}

DriveCalibration calibrate_drive(const ContinuumConfig& config, int workers) {
  config.validate();
  if (!(config.omega > 0.0)) throw ConfigError("drive calibration needs omega > 0");

  DriveCalibration out;
  const auto beat = calibrate_coupling(config.ws1, config.p, config.w_x, config.grid);
  out.omega1 = beat.coupling;
  out.beat_period = beat.beat_period;

  // Lattice side: first peak of Min(P1) against A for the driven dimer,
  // observed over the same window as the continuum runs.
  LatticeConfig dimer;
  dimer.n_sites = 2;
  dimer.omega1 = out.omega1;
  dimer.omega2 = out.omega1;
  dimer.omega = config.omega;
  const double z_end = config.grid.z_max;
  const auto lattice_min_p1 = [&](double amplitude) {
    LatticeConfig c = dimer;
    c.amplitude = amplitude;
    return propagate_min_population(c, site_excitation(2, 0), z_end, Stepping{}, 0);
  };
  out.lattice_a_star =
      locate_peak(lattice_min_p1, 1.5 * config.omega, 3.5 * config.omega, 101, workers);

  // Continuum side: same feature against mu, starting from the overlap estimate.
  const auto mode = fundamental_mode(config.p, config.w_x, config.grid);
  const auto well = detail::guide_profile(config.grid, 0.0, config.w_x);
  double overlap = 0.0;
  for (std::size_t i = 0; i < well.size(); ++i) overlap += std::norm(mode.field.samples[i]) * well[i];
  out.overlap_estimate = config.p * overlap * mode.field.dx;

  ContinuumConfig coupler = config;
  coupler.n_guides = 2;
  const Field input = launch_guide(coupler, mode, 0);
  const auto continuum_min_p1 = [&](double mu) {
    ContinuumConfig c = coupler;
    c.mu = mu;
    BpmOptions opt;
    opt.record_every = 5;
    return bpm_propagate(c, input, opt).min_fraction(0);
  };
  const double mu_guess = out.lattice_a_star / out.overlap_estimate;
  out.mu_star = locate_peak(continuum_min_p1, 0.85 * mu_guess, 1.15 * mu_guess, 13, workers);
  out.a_per_mu = out.lattice_a_star / out.mu_star;
  return out;
}

LatticeConfig lattice_equivalent(const ContinuumConfig& config, const DriveCalibration& drive) {
  config.validate();
  LatticeConfig lat;
  lat.n_sites = config.n_guides;
  lat.omega1 = drive.omega1;
  lat.omega2 = drive.omega1;
  if (config.n_guides >= 3) {
    lat.omega2 = calibrate_coupling(config.ws2, config.p, config.w_x, config.grid).coupling;
  }
  lat.amplitude = drive.a_per_mu * config.mu;
  lat.omega = config.omega;
  return lat;
}

}  // namespace wgf
