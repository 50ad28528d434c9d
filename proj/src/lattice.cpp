#include "wgf/lattice.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "wgf/error.hpp"

namespace wgf {

void LatticeConfig::validate() const {
  if (n_sites < 2) {
    throw ConfigError(fmt::format("n_sites must be >= 2 (got {})", n_sites));
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ConfigError(fmt::format("omega must be positive (got {})", omega));
  }
  if (!(omega1 > 0.0) || !std::isfinite(omega1)) {
    throw ConfigError(fmt::format("omega1 must be positive (got {})", omega1));
  }
  if (!(omega2 >= 0.0) || !std::isfinite(omega2)) {
    throw ConfigError(fmt::format("omega2 must be non-negative (got {})", omega2));
  }
  if (!std::isfinite(amplitude)) {
    throw ConfigError("amplitude must be finite");
  }
}

double LatticeConfig::period() const { return 2.0 * std::numbers::pi / omega; }

double LatticeConfig::drive(double z) const { return amplitude * std::sin(omega * z); }

std::vector<double> LatticeConfig::bonds() const {
  validate();
  std::vector<double> b(static_cast<std::size_t>(n_sites - 1), omega1);
  if (n_sites > 2) b.back() = omega2;
  return b;
}

StateVector site_excitation(int n_sites, std::size_t site) {
  if (n_sites < 2 || site >= static_cast<std::size_t>(n_sites)) {
    throw ConfigError(fmt::format("site {} out of range for {} sites", site + 1, n_sites));
  }
  StateVector s;
  s.amplitudes = Eigen::VectorXcd::Zero(n_sites);
  s.amplitudes(static_cast<Eigen::Index>(site)) = 1.0;
  return s;
}

Eigen::MatrixXd static_hamiltonian(const LatticeConfig& config) {
  const auto b = config.bonds();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(config.n_sites, config.n_sites);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    h(i, i + 1) = b[j];
    h(i + 1, i) = b[j];
  }
  return h;
}

Eigen::MatrixXcd hamiltonian_at(const LatticeConfig& config, double z) {
  Eigen::MatrixXcd h = static_hamiltonian(config).cast<cplx>();
  h(0, 0) = config.drive(z);
  return h;
}

std::vector<double> unmodulated_spectrum(const LatticeConfig& config) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(static_hamiltonian(config),
                                                        Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

StateVector dark_state_unmodulated(const LatticeConfig& config) {
  config.validate();
  if (config.n_sites != 3) {
    throw ConfigError(
        fmt::format("the closed-form dark state needs n_sites = 3 (got {})", config.n_sites));
  }
  StateVector s;
  s.amplitudes = Eigen::VectorXcd(3);
  s.amplitudes << -config.omega2 / config.omega1, 0.0, 1.0;
  s.amplitudes.normalize();
  return s;
}

ChainHamiltonian::ChainHamiltonian(const LatticeConfig& config)
    : bonds_(config.bonds()), amplitude_(config.amplitude), omega_(config.omega) {}

}  // namespace wgf
