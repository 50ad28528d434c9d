#pragma once

#include <iosfwd>
#include <vector>

namespace wgf {

/// J_n(x) for 0 <= n <= 20, |x| <= 1e4, absolute accuracy ~1e-12.
/// Ascending series near the origin, Miller downward recurrence elsewhere.
double bessel_j(int n, double x);

/// First `count` positive zeros of J_n, ascending (count <= 20).
std::vector<double> bessel_zeros(int n, int count);

/// Photon-resonance location of the undriven three-site spacing
/// omega0 = sqrt(omega1^2 + omega2^2) = n * omega.
struct ResonancePrediction {
  int n = 0;
  double omega0 = 0.0;        // = n * omega
  double omega2_star = 0.0;   // sqrt((n omega)^2 - omega1^2)
  double omega2_naive = 0.0;  // n * omega
};

/// Orders with n * omega <= omega1 have no real solution and are skipped.
std::vector<ResonancePrediction> resonance_positions(double omega1, double omega, int n_max);

void write_resonance_csv(std::ostream& out, const std::vector<ResonancePrediction>& rows);
void write_zeros_csv(std::ostream& out, int n, const std::vector<double>& zeros);

}  // namespace wgf
