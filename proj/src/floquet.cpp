#include "wgf/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "wgf/error.hpp"

namespace wgf {

Eigen::MatrixXcd monodromy(const LatticeConfig& config, int steps_per_period) {
  config.validate();
  if (steps_per_period < 100) {
    throw ConfigError(fmt::format("steps_per_period must be >= 100 (got {})", steps_per_period));
  }
  const ChainHamiltonian hamiltonian(config);
  const auto apply = [&](double z, const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) {
    hamiltonian.apply(z, in, out);
  };
  const double h = config.period() / steps_per_period;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(config.n_sites, config.n_sites);
  Rk4Stepper<Eigen::MatrixXcd> stepper;
  for (int k = 0; k < steps_per_period; ++k) stepper.step(apply, k * h, h, u);

  if (!u.allFinite()) throw NumericalError("non-finite monodromy");
  const double defect = unitarity_defect(u);
  if (defect > kUnitarityLimit) {
    throw NumericalError(fmt::format(
        "monodromy unitarity defect {:.3e} exceeds {:.0e}; increase steps_per_period", defect,
        kUnitarityLimit));
  }
  return u;
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

double fold_quasienergy(double phase_angle, double omega) {
  const double period = 2.0 * std::numbers::pi / omega;
  double eps = -phase_angle / period;
  // arg() lies in (-pi, pi], so eps lands in [-omega/2, omega/2).
  if (eps <= -0.5 * omega) eps += omega;
  return eps;
}

FloquetSpectrum floquet_spectrum(const Eigen::MatrixXcd& u, double omega) {
  if (u.rows() != u.cols() || u.rows() == 0) throw ConfigError("monodromy must be square");
  const double defect = unitarity_defect(u);
  if (!(defect <= kUnitarityLimit)) {
    throw NumericalError(fmt::format("matrix is not unitary (defect {:.3e})", defect));
  }
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  const auto& t = schur.matrixT();
  const auto& q = schur.matrixU();
  const auto n = static_cast<std::size_t>(u.rows());

  std::vector<double> eps(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    eps[k] = fold_quasienergy(std::arg(t(i, i)), omega);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });

  FloquetSpectrum out;
  for (const auto k : order) {
    const auto i = static_cast<Eigen::Index>(k);
    out.quasienergies.push_back(eps[k]);
    out.multipliers.push_back(t(i, i));
    out.modes.emplace_back(q.col(i));
  }
  return out;
}

std::vector<double> quasienergies(const Eigen::MatrixXcd& u, double omega) {
  return floquet_spectrum(u, omega).quasienergies;
}

std::vector<double> avg_populations(const LatticeConfig& config, const Eigen::VectorXcd& mode,
                                    const Stepping& stepping) {
  if (mode.size() != config.n_sites) throw ConfigError("mode size does not match n_sites");
  StateVector start;
  start.amplitudes = mode.normalized();

  const auto n = static_cast<std::size_t>(config.n_sites);
  std::vector<double> sum(n, 0.0);
  std::vector<double> first(n), last(n);
  Eigen::VectorXcd final_state;
  int samples = 0;
  propagate_observed(config, start, config.period(), stepping,
                     [&](double, const Eigen::VectorXcd& s) {
                       for (std::size_t j = 0; j < n; ++j) {
                         const double p = std::norm(s(static_cast<Eigen::Index>(j)));
                         if (samples == 0) first[j] = p;
                         last[j] = p;
                         sum[j] += p;
                       }
                       final_state = s;
                       ++samples;
                     });

  const cplx lambda = start.amplitudes.dot(final_state);
  const double residual = (final_state - lambda * start.amplitudes).cwiseAbs().maxCoeff();
  if (residual > 1e-6) {
    throw NumericalError(
        fmt::format("vector is not a Floquet mode (one-period residual {:.3e})", residual));
  }

  const double intervals = samples - 1;
  for (std::size_t j = 0; j < n; ++j) {
    sum[j] = (sum[j] - 0.5 * (first[j] + last[j])) / intervals;
  }
  return sum;
}

DarkSearch dark_floquet(const std::vector<double>& quasienergies, double eps_tol) {
  DarkSearch out;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < quasienergies.size(); ++k) {
    if (std::abs(quasienergies[k]) < eps_tol) {
      ++hits;
      out.index = k;
    }
  }
  if (hits > 1) {
    out.index.reset();
    out.ambiguous = true;
  }
  return out;
}

DarkSearch dark_floquet(const FloquetSolution& solution, double eps_tol) {
  return dark_floquet(solution.quasienergies, eps_tol);
}

FloquetSolution solve_floquet(const LatticeConfig& config, const Stepping& stepping,
                              double eps_rel_tol) {
  const Eigen::MatrixXcd u = monodromy(config, stepping.steps_per_period);
  auto spectrum = floquet_spectrum(u, config.omega);

  FloquetSolution sol;
  sol.omega = config.omega;
  sol.unitarity_defect = unitarity_defect(u);
  sol.quasienergies = std::move(spectrum.quasienergies);
  sol.modes = std::move(spectrum.modes);
  sol.avg_populations.resize(config.n_sites, config.n_sites);
  for (std::size_t k = 0; k < sol.modes.size(); ++k) {
    const auto p = avg_populations(config, sol.modes[k], stepping);
    for (std::size_t j = 0; j < p.size(); ++j) {
      sol.avg_populations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = p[j];
    }
  }
  const auto dark = dark_floquet(sol.quasienergies, eps_rel_tol * config.omega);
  sol.dark_index = dark.index;
  sol.dark_ambiguous = dark.ambiguous;
  return sol;
}

std::vector<std::size_t> match_modes(const std::vector<Eigen::VectorXcd>& previous,
                                     const std::vector<Eigen::VectorXcd>& current) {
  const std::size_t n = previous.size();
  if (current.size() != n) throw ConfigError("mode sets differ in size");
  Eigen::MatrixXd overlap(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      overlap(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          std::norm(previous[a].dot(current[b]));
    }
  }
  std::vector<std::size_t> result(n, n);
  std::vector<bool> used_prev(n, false), used_cur(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    double best = -1.0;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (used_prev[a]) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (used_cur[b]) continue;
        const double o = overlap(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (o > best) {
          best = o;
          ba = a;
          bb = b;
        }
      }
    }
    used_prev[ba] = used_cur[bb] = true;
    result[ba] = bb;
  }
  return result;
}

}  // namespace wgf
