#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include <fftw3.h>

#include "wgf/continuum.hpp"

namespace wgf::detail {

/// In-place complex FFT pair bound to an owned buffer.
class SpectralBuffer {
 public:
  explicit SpectralBuffer(int n);
  ~SpectralBuffer();
  SpectralBuffer(const SpectralBuffer&) = delete;
  SpectralBuffer& operator=(const SpectralBuffer&) = delete;

  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }
  void forward();
  /// Inverse including the 1/n factor.
  void backward();

 private:
  std::vector<cplx> data_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Angular wavenumbers in FFTW order.
std::vector<double> wavenumbers(const TransverseGrid& grid);

std::vector<double> guide_profile(const TransverseGrid& grid, double center, double w_x);

/// Stage lengths (fractions of dz) of Suzuki's fourth-order five-stage
/// splitting (p, p, 1 - 4p, p, p) with p = 1 / (4 - 4^(1/3)).
inline const double kSuzukiP = 1.0 / (4.0 - std::cbrt(4.0));
inline const std::vector<double> kSplitWeights = {kSuzukiP, kSuzukiP, 1.0 - 4.0 * kSuzukiP,
                                                  kSuzukiP, kSuzukiP};

/// Split-step integrator for one configuration. Holds the field between steps.
class BeamPropagator {
 public:
  BeamPropagator(const ContinuumConfig& config, const Field& input);

  void step();
  double z() const { return z_; }
  const std::vector<cplx>& field() const { return buffer_.data(); }
  Field snapshot() const;
  PowerSample powers() const;
  double edge_power() const;

 private:
  void kinetic(const std::vector<cplx>& factor);
  void kick(std::size_t stage, double z_mid);

  ContinuumConfig config_;
  SpectralBuffer buffer_;
  std::vector<std::vector<cplx>> kinetic_;
  std::vector<std::vector<cplx>> static_phase_;
  std::vector<int> driven_index_;
  std::vector<double> driven_profile_;
  std::vector<int> bin_;
  std::vector<bool> edge_;
  double z_ = 0.0;
  long steps_ = 0;
};

}  // namespace wgf::detail
