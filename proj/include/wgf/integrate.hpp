#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wgf/lattice.hpp"

namespace wgf {

/// A run aborts once |norm^2 - 1| exceeds this; the step is too coarse.
inline constexpr double kNormDriftLimit = 1e-6;

struct Stepping {
  int steps_per_period = 2000;
  int samples_per_period = 200;

  void validate() const;
  int stride() const { return steps_per_period / samples_per_period; }
};

/// max(50 T, 200 / omega1): long enough for the slow beats near resonances.
double default_z_end(const LatticeConfig& config);

/// How far to propagate: the default horizon, an absolute length, or a
/// number of drive periods. Text form: "default", "123.4" or "50T".
struct ZEndPolicy {
  enum class Kind { automatic, absolute, periods };
  Kind kind = Kind::automatic;
  double value = 0.0;

  double resolve(const LatticeConfig& config) const;
  std::string to_string() const;
  static ZEndPolicy parse(std::string_view text);
};

/// Classical fourth-order Runge-Kutta for i dy/dz = H(z) y, where y is any
/// block of state columns and `apply(z, in, out)` writes H(z) * in to out.
template <class Block>
class Rk4Stepper {
 public:
  template <class Apply>
  void step(const Apply& apply, double z, double h, Block& y) {
    const cplx mih(0.0, -h);
    k1_.resizeLike(y);
    k2_.resizeLike(y);
    k3_.resizeLike(y);
    k4_.resizeLike(y);
    apply(z, y, k1_);
    k1_ *= mih;
    tmp_ = y + 0.5 * k1_;
    apply(z + 0.5 * h, tmp_, k2_);
    k2_ *= mih;
    tmp_ = y + 0.5 * k2_;
    apply(z + 0.5 * h, tmp_, k3_);
    k3_ *= mih;
    tmp_ = y + k3_;
    apply(z + h, tmp_, k4_);
    k4_ *= mih;
    y += (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_) / 6.0;
  }

 private:
  Block k1_, k2_, k3_, k4_, tmp_;
};

struct Trajectory {
  std::vector<double> z;
  std::vector<Eigen::VectorXcd> states;
  double max_norm_drift = 0.0;

  std::size_t size() const { return z.size(); }
};

using SampleObserver = std::function<void(double z, const Eigen::VectorXcd& state)>;

/// Integrates from z = 0 to z_end with h = T / steps_per_period (the final
/// step is shortened to land on z_end) and reports the state every
/// `stride()` steps plus at z_end. No renormalisation is applied.
/// Throws NumericalError on norm drift beyond kNormDriftLimit or a
/// non-finite state. Returns the largest observed drift.
double propagate_observed(const LatticeConfig& config, const StateVector& initial, double z_end,
                          const Stepping& stepping, const SampleObserver& observer);

Trajectory propagate(const LatticeConfig& config, const StateVector& initial, double z_end,
                     const Stepping& stepping = {});

/// Final state only.
StateVector propagate_to(const LatticeConfig& config, const StateVector& initial, double z_end,
                         const Stepping& stepping = {});

double min_population(const Trajectory& trajectory, std::size_t site);

/// Min |a_site|^2 along a run without storing the trajectory.
double propagate_min_population(const LatticeConfig& config, const StateVector& initial,
                                double z_end, const Stepping& stepping, std::size_t site);

/// Columns: z, re_a1, im_a1, ..., P1, ..., PN.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace wgf
