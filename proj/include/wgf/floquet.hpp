#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wgf/integrate.hpp"
#include "wgf/lattice.hpp"

namespace wgf {

/// Monodromy/quasienergy routines refuse inputs further than this from unitary.
inline constexpr double kUnitarityLimit = 1e-6;

/// Default dark-mode window, relative to omega.
inline constexpr double kDarkEpsRelTol = 1e-6;

/// One-period propagator U(T, 0), column k = evolved basis vector e_k.
Eigen::MatrixXcd monodromy(const LatticeConfig& config, int steps_per_period = 2000);

/// max |(U^dagger U - I)_{ij}|
double unitarity_defect(const Eigen::MatrixXcd& u);

/// Fold -arg(lambda)/T into (-omega/2, omega/2].
double fold_quasienergy(double phase_angle, double omega);

struct FloquetSpectrum {
  std::vector<double> quasienergies;   // ascending
  std::vector<cplx> multipliers;       // eigenvalues of U, same order
  std::vector<Eigen::VectorXcd> modes; // orthonormal, same order
};

/// Eigen-decomposition of a (numerically) unitary monodromy. The Schur basis
/// is used, so modes stay orthonormal inside degenerate subspaces.
FloquetSpectrum floquet_spectrum(const Eigen::MatrixXcd& u, double omega);

std::vector<double> quasienergies(const Eigen::MatrixXcd& u, double omega);

/// Trapezoidal <|a_j|^2> over one period along a Floquet mode.
/// Throws NumericalError if `mode` does not return to a multiple of itself.
std::vector<double> avg_populations(const LatticeConfig& config, const Eigen::VectorXcd& mode,
                                    const Stepping& stepping = {});

struct DarkSearch {
  std::optional<std::size_t> index;
  bool ambiguous = false;
};

/// The unique mode with |eps| < eps_tol. Several candidates -> ambiguous.
DarkSearch dark_floquet(const std::vector<double>& quasienergies, double eps_tol);

struct FloquetSolution {
  double omega = 0.0;
  std::vector<double> quasienergies;
  std::vector<Eigen::VectorXcd> modes;
  Eigen::MatrixXd avg_populations;  // (mode, site)
  std::optional<std::size_t> dark_index;
  bool dark_ambiguous = false;
  double unitarity_defect = 0.0;
};

FloquetSolution solve_floquet(const LatticeConfig& config, const Stepping& stepping = {},
                              double eps_rel_tol = kDarkEpsRelTol);

DarkSearch dark_floquet(const FloquetSolution& solution, double eps_tol);

/// Greedy maximum-overlap matching: result[k] is the index in `current`
/// continuing branch k of `previous`.
std::vector<std::size_t> match_modes(const std::vector<Eigen::VectorXcd>& previous,
                                     const std::vector<Eigen::VectorXcd>& current);

}  // namespace wgf
