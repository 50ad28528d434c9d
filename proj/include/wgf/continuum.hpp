#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <vector>

#include "wgf/lattice.hpp"

namespace wgf {

/// Relative power drift that aborts a beam propagation.
inline constexpr double kPowerDriftLimit = 1e-4;
/// Fraction of the power allowed in the outer 10% of the window.
inline constexpr double kEdgePowerLimit = 1e-3;

/// Periodic transverse window [-half_width, half_width) with n_x samples,
/// longitudinal step dz and run length z_max. Lengths in units of 10 um.
struct TransverseGrid {
  double half_width = 20.0;
  int n_x = 2048;
  double dz = 0.01;
  double z_max = 400.0;

  void validate() const;
  double dx() const { return 2.0 * half_width / n_x; }
  double x(int i) const { return -half_width + i * dx(); }
};

/// Super-Gaussian waveguide array
///   R(x, z) = sum_j [1 + f_j(z)] exp(-((x - X_j) / w_x)^6),  f_1 = mu sin(omega z)
/// with the driven guide on top (largest x). Spacing ws1 everywhere except
/// ws2 between the bottom guide and its neighbour.
struct ContinuumConfig {
  int n_guides = 3;
  double p = 2.78;
  double w_x = 0.3;
  double mu = 0.2;
  double omega = 3.45 * std::numbers::pi / 100.0;
  double ws1 = 3.2;
  double ws2 = 3.2;
  TransverseGrid grid;

  void validate() const;
  /// Guide centres, top (driven) guide first, strictly decreasing.
  std::vector<double> guide_positions() const;
};

struct Field {
  std::vector<cplx> samples;
  double dx = 0.0;
  double z = 0.0;

  double power() const;
};

double refractive_index(const ContinuumConfig& config, double x, double z);

struct BoundMode {
  Field field;   // centred on x = 0, unit power, real and positive
  double beta = 0.0;
  long iterations = 0;
};

/// Ground state of -1/2 d^2/dx^2 - p exp(-(x/w_x)^6) by normalised
/// imaginary-axis relaxation. Throws NumericalError when beta <= 0.
BoundMode fundamental_mode(double p, double w_x, const TransverseGrid& grid);

/// Band-limited translation by `offset` (need not be a grid multiple).
Field shift_field(const Field& field, double offset);

/// Isolated-guide mode placed on guide `guide` (0 = top).
Field launch_guide(const ContinuumConfig& config, const BoundMode& mode, std::size_t guide = 0);

struct PowerSample {
  double z = 0.0;
  std::vector<double> guides;  // top first
  double total = 0.0;
};

struct FieldSnapshot {
  double z = 0.0;
  Field field;
};

struct BpmOptions {
  int record_every = 1;
  std::vector<double> snapshot_z;
};

struct BpmResult {
  std::vector<PowerSample> trace;
  std::vector<FieldSnapshot> snapshots;
  double max_power_drift = 0.0;
  double max_edge_fraction = 0.0;

  /// min over the trace of guide power / total power.
  double min_fraction(std::size_t guide) const;
};

/// Fourth-order split-step Fourier: a symmetric composition of five
/// kinetic/potential Strang stages, each using R at its own midpoint.
/// Per-guide powers by bins bounded at the midpoints between neighbouring guides.
/// Throws NumericalError on power drift or edge leakage.
BpmResult bpm_propagate(const ContinuumConfig& config, const Field& input,
                        const BpmOptions& options = {});

/// Top-guide launches for several independent configurations (OpenMP over runs).
std::vector<BpmResult> bpm_propagate_batch(const std::vector<ContinuumConfig>& configs,
                                           int workers = 0, int record_every = 1);

struct CouplingCalibration {
  double spacing = 0.0;
  double beat_period = 0.0;
  double coupling = 0.0;  // pi / beat_period
};

/// Unmodulated two-guide coupler; beat period from the first return maximum
/// of the launched guide's power.
CouplingCalibration calibrate_coupling(double spacing, double p, double w_x,
                                       const TransverseGrid& grid);

/// Links the continuum drive depth mu to the lattice amplitude A by matching
/// the first suppression-of-tunnelling peak of a driven two-guide coupler in
/// both models.
struct DriveCalibration {
  double omega1 = 0.0;
  double beat_period = 0.0;
  double lattice_a_star = 0.0;  // lattice A at the first peak of Min(P1)
  double mu_star = 0.0;         // continuum mu at the same feature
  double a_per_mu = 0.0;
  double overlap_estimate = 0.0;  // p * int |phi|^2 profile, first guess
};

DriveCalibration calibrate_drive(const ContinuumConfig& config, int workers = 0);

/// Coupled-mode counterpart of a continuum configuration.
LatticeConfig lattice_equivalent(const ContinuumConfig& config, const DriveCalibration& drive);

/// z,P_guide1..P_guideN,P_total
void write_power_csv(std::ostream& out, const BpmResult& result);
/// x,re,im per grid point.
void write_field_dump(std::ostream& out, const Field& field, double half_width);

}  // namespace wgf
