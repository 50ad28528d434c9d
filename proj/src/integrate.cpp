#include "wgf/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "wgf/error.hpp"

namespace wgf {

void Stepping::validate() const {
  if (steps_per_period < 100) {
    throw ConfigError(fmt::format("steps_per_period must be >= 100 (got {})", steps_per_period));
  }
  if (samples_per_period < 1 || steps_per_period % samples_per_period != 0) {
    throw ConfigError(fmt::format("samples_per_period ({}) must divide steps_per_period ({})",
                                  samples_per_period, steps_per_period));
  }
}

double default_z_end(const LatticeConfig& config) {
  config.validate();
  const double slow = std::min(config.omega1, std::max(config.omega2, config.omega1));
  return std::max(50.0 * config.period(), 200.0 / slow);
}

double ZEndPolicy::resolve(const LatticeConfig& config) const {
  switch (kind) {
    case Kind::absolute:
      return value;
    case Kind::periods:
      return value * config.period();
    case Kind::automatic:
      break;
  }
  return default_z_end(config);
}

std::string ZEndPolicy::to_string() const {
  switch (kind) {
    case Kind::absolute:
      return fmt::format("{}", value);
    case Kind::periods:
      return fmt::format("{}T", value);
    case Kind::automatic:
      break;
  }
  return "default";
}

ZEndPolicy ZEndPolicy::parse(std::string_view text) {
  ZEndPolicy p;
  if (text.empty() || text == "default" || text == "auto") return p;
  std::string body(text);
  if (body.back() == 'T') {
    p.kind = Kind::periods;
    body.pop_back();
  } else {
    p.kind = Kind::absolute;
  }
  std::size_t used = 0;
  try {
    p.value = std::stod(body, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != body.size() || !(p.value > 0.0) || !std::isfinite(p.value)) {
    throw ConfigError(fmt::format("bad z_end '{}': expected 'default', a length or '<k>T'", text));
  }
  return p;
}

double propagate_observed(const LatticeConfig& config, const StateVector& initial, double z_end,
                          const Stepping& stepping, const SampleObserver& observer) {
  config.validate();
  stepping.validate();
  if (!(z_end > 0.0) || !std::isfinite(z_end)) {
    throw ConfigError(fmt::format("z_end must be positive (got {})", z_end));
  }
  if (initial.amplitudes.size() != config.n_sites) {
    throw ConfigError("initial state size does not match n_sites");
  }

  const ChainHamiltonian hamiltonian(config);
  const auto apply = [&](double z, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    hamiltonian.apply(z, in, out);
  };

  const double h = config.period() / stepping.steps_per_period;
  const auto n_steps = static_cast<long>(std::ceil(z_end / h - 1e-9));
  const long stride = stepping.stride();
  const double norm0 = initial.norm2();

  Eigen::VectorXcd y = initial.amplitudes;
  Rk4Stepper<Eigen::VectorXcd> stepper;
  double max_drift = 0.0;

  const auto check = [&](double z) {
    const double n2 = y.squaredNorm();
    if (!std::isfinite(n2)) {
      throw NumericalError(fmt::format("non-finite state at z = {}", z));
    }
    const double drift = std::abs(n2 - norm0);
    max_drift = std::max(max_drift, drift);
    if (drift > kNormDriftLimit) {
      throw NumericalError(fmt::format(
          "norm drift {:.3e} at z = {} exceeds {:.0e}; increase steps_per_period", drift, z,
          kNormDriftLimit));
    }
    if (observer) observer(z, y);
  };

  check(0.0);
  for (long k = 0; k < n_steps; ++k) {
    const double z = static_cast<double>(k) * h;
    const bool last = (k + 1 == n_steps);
    const double step = last ? z_end - z : h;
    stepper.step(apply, z, step, y);
    if (last) {
      check(z_end);
    } else if ((k + 1) % stride == 0) {
      check(static_cast<double>(k + 1) * h);
    }
  }
  return max_drift;
}

Trajectory propagate(const LatticeConfig& config, const StateVector& initial, double z_end,
                     const Stepping& stepping) {
  Trajectory t;
  t.max_norm_drift =
      propagate_observed(config, initial, z_end, stepping,
                         [&](double z, const Eigen::VectorXcd& state) {
                           t.z.push_back(z);
                           t.states.push_back(state);
                         });
  return t;
}

StateVector propagate_to(const LatticeConfig& config, const StateVector& initial, double z_end,
                         const Stepping& stepping) {
  StateVector out;
  propagate_observed(config, initial, z_end, stepping,
                     [&](double z, const Eigen::VectorXcd& state) {
                       out.amplitudes = state;
                       out.z = z;
                     });
  return out;
}

double min_population(const Trajectory& trajectory, std::size_t site) {
  if (trajectory.states.empty()) throw ConfigError("empty trajectory");
  const auto idx = static_cast<Eigen::Index>(site);
  if (idx >= trajectory.states.front().size()) {
    throw ConfigError(fmt::format("site {} out of range", site + 1));
  }
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : trajectory.states) m = std::min(m, std::norm(s(idx)));
  return m;
}

double propagate_min_population(const LatticeConfig& config, const StateVector& initial,
                                double z_end, const Stepping& stepping, std::size_t site) {
  const auto idx = static_cast<Eigen::Index>(site);
  if (idx >= config.n_sites) throw ConfigError(fmt::format("site {} out of range", site + 1));
  double m = std::numeric_limits<double>::infinity();
  propagate_observed(config, initial, z_end, stepping,
                     [&](double, const Eigen::VectorXcd& state) {
                       m = std::min(m, std::norm(state(idx)));
                     });
  return m;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const Eigen::Index n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  out << "z";
  for (Eigen::Index j = 1; j <= n; ++j) out << fmt::format(",re_a{0},im_a{0}", j);
  for (Eigen::Index j = 1; j <= n; ++j) out << fmt::format(",P{}", j);
  out << '\n';
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& s = trajectory.states[i];
    out << fmt::format("{:.12g}", trajectory.z[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      out << fmt::format(",{:.12g},{:.12g}", s(j).real(), s(j).imag());
    }
    for (Eigen::Index j = 0; j < n; ++j) out << fmt::format(",{:.12g}", std::norm(s(j)));
    out << '\n';
  }
}

}  // namespace wgf
