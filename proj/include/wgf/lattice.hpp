#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace wgf {

using cplx = std::complex<double>;

/// Driven tight-binding chain. Site 1 (index 0) is the modulated top guide,
/// site N (index N-1) the bottom guide attached through omega2.
///
///   i da_1/dz = A sin(omega z) a_1 + omega1 a_2
///   i da_j/dz = omega1 (a_{j-1} + a_{j+1})          2 <= j <= N-2
///   i da_{N-1}/dz = omega1 a_{N-2} + omega2 a_N
///   i da_N/dz = omega2 a_{N-1}
///
/// For N = 2 the chain has a single bond and it carries omega1.
struct LatticeConfig {
  int n_sites = 3;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double amplitude = 0.0;
  double omega = 1.0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  double period() const;
  double drive(double z) const;
  /// Couplings of the N-1 bonds, top to bottom.
  std::vector<double> bonds() const;
};

struct StateVector {
  Eigen::VectorXcd amplitudes;
  double z = 0.0;

  double norm2() const { return amplitudes.squaredNorm(); }
};

/// Unit excitation on one site (0-based).
StateVector site_excitation(int n_sites, std::size_t site);

Eigen::MatrixXcd hamiltonian_at(const LatticeConfig& config, double z);
Eigen::MatrixXd static_hamiltonian(const LatticeConfig& config);

/// Eigenvalues of the undriven chain, ascending.
std::vector<double> unmodulated_spectrum(const LatticeConfig& config);

/// Zero-energy state (-omega2/omega1, 0, 1)/norm of the undriven three-site chain.
StateVector dark_state_unmodulated(const LatticeConfig& config);

/// Matrix-free H(z) applied to the columns of a state block. Cheaper than the
/// dense product for the RHS evaluations inside the integrator.
class ChainHamiltonian {
 public:
  explicit ChainHamiltonian(const LatticeConfig& config);

  int size() const { return static_cast<int>(bonds_.size()) + 1; }
  double drive(double z) const { return amplitude_ * std::sin(omega_ * z); }

  template <class In, class Out>
  void apply(double z, const In& in, Out& out) const {
    const Eigen::Index n = in.rows();
    const double sigma = drive(z);
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
      out(0, c) = sigma * in(0, c) + bonds_[0] * in(1, c);
      for (Eigen::Index j = 1; j + 1 < n; ++j) {
        out(j, c) = bonds_[j - 1] * in(j - 1, c) + bonds_[j] * in(j + 1, c);
      }
      out(n - 1, c) = bonds_[n - 2] * in(n - 2, c);
    }
  }

 private:
  std::vector<double> bonds_;
  double amplitude_;
  double omega_;
};

}  // namespace wgf
