#include "wgf/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>

#include <fmt/format.h>
#include <omp.h>

#include "beam.hpp"
#include "wgf/error.hpp"

namespace wgf {

namespace detail {
namespace {
// Plan creation and destruction in FFTW are not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralBuffer::SpectralBuffer(int n) : data_(static_cast<std::size_t>(n)) {
  auto* buf = reinterpret_cast<fftw_complex*>(data_.data());
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralBuffer::~SpectralBuffer() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(backward_);
}

void SpectralBuffer::forward() { fftw_execute(forward_); }

void SpectralBuffer::backward() {
  fftw_execute(backward_);
  const double scale = 1.0 / static_cast<double>(data_.size());
  for (auto& v : data_) v *= scale;
}

std::vector<double> wavenumbers(const TransverseGrid& grid) {
  const int n = grid.n_x;
  const double dk = std::numbers::pi / grid.half_width;
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = dk * (i < n / 2 ? i : i - n);
  return k;
}

std::vector<double> guide_profile(const TransverseGrid& grid, double center, double w_x) {
  std::vector<double> g(static_cast<std::size_t>(grid.n_x));
  for (int i = 0; i < grid.n_x; ++i) {
    const double u = (grid.x(i) - center) / w_x;
    const double u2 = u * u;
    g[static_cast<std::size_t>(i)] = std::exp(-u2 * u2 * u2);
  }
  return g;
}

BeamPropagator::BeamPropagator(const ContinuumConfig& config, const Field& input)
    : config_(config), buffer_(config.grid.n_x) {
  config_.validate();
  const auto& grid = config_.grid;
  const auto n = static_cast<std::size_t>(grid.n_x);
  if (input.samples.size() != n) throw ConfigError("input field does not match the grid");
  buffer_.data() = input.samples;
  z_ = input.z;

  // Kinetic factor before each kick and after the last one; neighbouring
  // half steps of adjacent stages are merged.
  const auto k = wavenumbers(grid);
  const auto& w = kSplitWeights;
  kinetic_.assign(w.size() + 1, std::vector<cplx>(n));
  for (std::size_t s = 0; s <= w.size(); ++s) {
    const double a = s == 0 ? 0.5 * w.front()
                     : s == w.size() ? 0.5 * w.back()
                                     : 0.5 * (w[s - 1] + w[s]);
    for (std::size_t i = 0; i < n; ++i) {
      kinetic_[s][i] = std::polar(1.0, -0.5 * k[i] * k[i] * a * grid.dz);
    }
  }

  const auto centers = config_.guide_positions();
  std::vector<double> index(n, 0.0);
  for (const double c : centers) {
    const auto g = guide_profile(grid, c, config_.w_x);
    for (std::size_t i = 0; i < n; ++i) index[i] += g[i];
  }
  static_phase_.assign(w.size(), std::vector<cplx>(n));
  for (std::size_t s = 0; s < w.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      static_phase_[s][i] = std::polar(1.0, config_.p * index[i] * w[s] * grid.dz);
    }
  }
  const auto top = guide_profile(grid, centers.front(), config_.w_x);
  for (std::size_t i = 0; i < n; ++i) {
    if (top[i] > 1e-18) {
      driven_index_.push_back(static_cast<int>(i));
      driven_profile_.push_back(top[i]);
    }
  }

  // Bins: guide j owns the interval between the midpoints to its neighbours.
  bin_.resize(n);
  edge_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(static_cast<int>(i));
    int b = 0;
    while (b + 1 < config_.n_guides &&
           x < 0.5 * (centers[static_cast<std::size_t>(b)] + centers[static_cast<std::size_t>(b + 1)])) {
      ++b;
    }
    bin_[i] = b;
    edge_[i] = std::abs(x) >= 0.9 * grid.half_width;
  }
}

void BeamPropagator::kinetic(const std::vector<cplx>& factor) {
  auto& e = buffer_.data();
  buffer_.forward();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] *= factor[i];
  buffer_.backward();
}

void BeamPropagator::kick(std::size_t stage, double z_mid) {
  auto& e = buffer_.data();
  const double h = kSplitWeights[stage] * config_.grid.dz;
  const auto& phase = static_phase_[stage];
  for (std::size_t i = 0; i < e.size(); ++i) e[i] *= phase[i];
  const double drive = config_.mu * std::sin(config_.omega * z_mid);
  if (drive != 0.0) {
    const double scale = config_.p * drive * h;
    for (std::size_t m = 0; m < driven_index_.size(); ++m) {
      e[static_cast<std::size_t>(driven_index_[m])] *= std::polar(1.0, scale * driven_profile_[m]);
    }
  }
}

// Symmetric composition of Strang sub-steps; each stage kicks with R at its
// own midpoint.
void BeamPropagator::step() {
  const double dz = config_.grid.dz;
  double z = z_;
  for (std::size_t s = 0; s < kSplitWeights.size(); ++s) {
    kinetic(kinetic_[s]);
    kick(s, z + 0.5 * kSplitWeights[s] * dz);
    z += kSplitWeights[s] * dz;
  }
  kinetic(kinetic_.back());

  ++steps_;
  z_ = static_cast<double>(steps_) * dz;
}

Field BeamPropagator::snapshot() const {
  return Field{buffer_.data(), config_.grid.dx(), z_};
}

PowerSample BeamPropagator::powers() const {
  PowerSample s;
  s.z = z_;
  s.guides.assign(static_cast<std::size_t>(config_.n_guides), 0.0);
  const auto& e = buffer_.data();
  const double dx = config_.grid.dx();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double w = std::norm(e[i]) * dx;
    s.guides[static_cast<std::size_t>(bin_[i])] += w;
    s.total += w;
  }
  return s;
}

double BeamPropagator::edge_power() const {
  const auto& e = buffer_.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (edge_[i]) sum += std::norm(e[i]);
  }
  return sum * config_.grid.dx();
}

}  // namespace detail

void TransverseGrid::validate() const {
  if (!(half_width > 0.0)) throw ConfigError("half_width must be positive");
  if (n_x < 16 || (n_x & (n_x - 1)) != 0) {
    throw ConfigError(fmt::format("n_x must be a power of two >= 16 (got {})", n_x));
  }
  if (!(dz > 0.0)) throw ConfigError("dz must be positive");
  if (!(z_max > 0.0)) throw ConfigError("z_max must be positive");
}

void ContinuumConfig::validate() const {
  grid.validate();
  if (n_guides < 1) throw ConfigError(fmt::format("n_guides must be >= 1 (got {})", n_guides));
  if (!(w_x > 0.0)) throw ConfigError("w_x must be positive");
  if (!std::isfinite(p) || !std::isfinite(mu)) throw ConfigError("p and mu must be finite");
  if (!(omega >= 0.0)) throw ConfigError("omega must be non-negative");
  if (n_guides >= 2 && !(ws1 > 0.0)) throw ConfigError("ws1 must be positive");
  if (n_guides >= 3 && !(ws2 > 0.0)) throw ConfigError("ws2 must be positive");
  const auto pos = guide_positions();
  const double margin = 5.0 * w_x;
  if (pos.front() + margin > grid.half_width || pos.back() - margin < -grid.half_width) {
    throw ConfigError(fmt::format(
        "guides span [{}, {}] but need {} margin inside +-{}", pos.back(), pos.front(), margin,
        grid.half_width));
  }
}

std::vector<double> ContinuumConfig::guide_positions() const {
  std::vector<double> pos;
  if (n_guides == 1) return {0.0};
  pos.push_back(ws1);
  for (int j = 2; j < n_guides; ++j) pos.push_back(pos.back() - ws1);
  pos.push_back(pos.back() - (n_guides > 2 ? ws2 : ws1));
  return pos;
}

double Field::power() const {
  double s = 0.0;
  for (const auto& v : samples) s += std::norm(v);
  return s * dx;
}

double refractive_index(const ContinuumConfig& config, double x, double z) {
  const auto pos = config.guide_positions();
  double r = 0.0;
  for (std::size_t j = 0; j < pos.size(); ++j) {
    const double u = (x - pos[j]) / config.w_x;
    const double u2 = u * u;
    const double f = j == 0 ? config.mu * std::sin(config.omega * z) : 0.0;
    r += (1.0 + f) * std::exp(-u2 * u2 * u2);
  }
  return r;
}

BoundMode fundamental_mode(double p, double w_x, const TransverseGrid& grid) {
  grid.validate();
  if (!(w_x > 0.0)) throw ConfigError("w_x must be positive");
  const auto n = static_cast<std::size_t>(grid.n_x);
  const double dx = grid.dx();
  const auto k = detail::wavenumbers(grid);
  const auto well = detail::guide_profile(grid, 0.0, w_x);
  std::vector<double> potential(n);
  for (std::size_t i = 0; i < n; ++i) potential[i] = -p * well[i];

  detail::SpectralBuffer buf(grid.n_x);
  auto& e = buf.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(static_cast<int>(i)) / (2.0 * w_x);
    e[i] = std::exp(-x * x);
  }
  const auto normalise = [&] {
    double s = 0.0;
    for (const auto& v : e) s += std::norm(v);
    const double f = 1.0 / std::sqrt(s * dx);
    for (auto& v : e) v *= f;
  };
  std::vector<cplx> spectrum(n);
  const auto energy = [&] {
    // <T> from the spectrum (Parseval), <V> on the grid.
    spectrum = e;
    double pot = 0.0;
    for (std::size_t i = 0; i < n; ++i) pot += potential[i] * std::norm(e[i]);
    buf.forward();
    double kin = 0.0;
    for (std::size_t i = 0; i < n; ++i) kin += 0.5 * k[i] * k[i] * std::norm(e[i]);
    e = spectrum;
    return (kin / static_cast<double>(n) + pot) * dx;
  };
  normalise();

  BoundMode mode;
  double eigen = energy();
  constexpr long max_iterations = 400000;
  for (const double dtau : {0.05, 5e-3, 5e-4}) {
    std::vector<double> kinetic(n), local(n);
    for (std::size_t i = 0; i < n; ++i) {
      kinetic[i] = std::exp(-0.25 * k[i] * k[i] * dtau);
      local[i] = std::exp(-potential[i] * dtau);
    }
    long it = 0;
    for (; it < max_iterations; ++it) {
      buf.forward();
      for (std::size_t i = 0; i < n; ++i) e[i] *= kinetic[i];
      buf.backward();
      for (std::size_t i = 0; i < n; ++i) e[i] *= local[i];
      buf.forward();
      for (std::size_t i = 0; i < n; ++i) e[i] *= kinetic[i];
      buf.backward();
      for (auto& v : e) v = v.real();
      normalise();
      const double next = energy();
      const double change = std::abs(next - eigen);
      eigen = next;
      if (change < 1e-12 * std::abs(eigen)) break;
    }
    mode.iterations += it;
    if (it == max_iterations) throw NumericalError("mode relaxation did not converge");
  }
  mode.beta = -eigen;
  if (!(mode.beta > 0.0)) {
    throw NumericalError(fmt::format(
        "no bound mode (beta = {:.3e}) for p = {}, w_x = {}", mode.beta, p, w_x));
  }
  if (e[n / 2].real() < 0.0) {
    for (auto& v : e) v = -v;
  }
  mode.field = Field{e, dx, 0.0};
  return mode;
}

Field shift_field(const Field& field, double offset) {
  const auto n = static_cast<int>(field.samples.size());
  TransverseGrid grid;
  grid.n_x = n;
  grid.half_width = 0.5 * n * field.dx;
  const auto k = detail::wavenumbers(grid);
  detail::SpectralBuffer buf(n);
  buf.data() = field.samples;
  buf.forward();
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    // Drop the unpaired Nyquist component so a real field stays real.
    buf.data()[idx] *= (i == n / 2) ? cplx(0.0) : std::polar(1.0, -k[idx] * offset);
  }
  buf.backward();
  return Field{buf.data(), field.dx, field.z};
}

Field launch_guide(const ContinuumConfig& config, const BoundMode& mode, std::size_t guide) {
  config.validate();
  const auto pos = config.guide_positions();
  if (guide >= pos.size()) throw ConfigError(fmt::format("guide {} out of range", guide + 1));
  if (mode.field.samples.size() != static_cast<std::size_t>(config.grid.n_x) ||
      std::abs(mode.field.dx - config.grid.dx()) > 1e-12) {
    throw ConfigError("mode was computed on a different grid");
  }
  Field f = shift_field(mode.field, pos[guide]);
  const double s = 1.0 / std::sqrt(f.power());
  for (auto& v : f.samples) v *= s;
  return f;
}

double BpmResult::min_fraction(std::size_t guide) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : trace) m = std::min(m, s.guides.at(guide) / s.total);
  return m;
}

BpmResult bpm_propagate(const ContinuumConfig& config, const Field& input,
                        const BpmOptions& options) {
  config.validate();
  if (options.record_every < 1) throw ConfigError("record_every must be >= 1");
  const double p0 = input.power();
  if (std::abs(p0 - 1.0) > 1e-6) {
    throw ConfigError(fmt::format("input power must be normalised to 1 (got {})", p0));
  }
  detail::BeamPropagator beam(config, input);
  const auto n_steps = static_cast<long>(std::llround(config.grid.z_max / config.grid.dz));

  std::vector<double> pending = options.snapshot_z;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snapshot = 0;

  BpmResult result;
  const auto record = [&] {
    auto s = beam.powers();
    const double drift = std::abs(s.total - p0) / p0;
    result.max_power_drift = std::max(result.max_power_drift, drift);
    if (!std::isfinite(s.total) || drift > kPowerDriftLimit) {
      throw NumericalError(fmt::format(
          "power drift {:.3e} at z = {} exceeds {:.0e}; refine the grid", drift, s.z,
          kPowerDriftLimit));
    }
    const double edge = beam.edge_power() / s.total;
    result.max_edge_fraction = std::max(result.max_edge_fraction, edge);
    if (edge > kEdgePowerLimit) {
      throw NumericalError(fmt::format(
          "boundary leakage: {:.3e} of the power in the outer 10% of the window at z = {}", edge,
          s.z));
    }
    result.trace.push_back(std::move(s));
  };
  const auto take_snapshots = [&] {
    const double half = 0.5 * config.grid.dz;
    while (next_snapshot < pending.size() && pending[next_snapshot] <= beam.z() + half) {
      result.snapshots.push_back({beam.z(), beam.snapshot()});
      ++next_snapshot;
    }
  };

  record();
  take_snapshots();
  for (long s = 1; s <= n_steps; ++s) {
    beam.step();
    if (s % options.record_every == 0 || s == n_steps) record();
    take_snapshots();
  }
  return result;
}

std::vector<BpmResult> bpm_propagate_batch(const std::vector<ContinuumConfig>& configs,
                                           int workers, int record_every) {
  for (const auto& c : configs) c.validate();
  std::vector<BpmResult> out(configs.size());
  std::vector<std::string> errors(configs.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  const auto count = static_cast<long>(configs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      const auto& c = configs[idx];
      const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
      BpmOptions opt;
      opt.record_every = record_every;
      out[idx] = bpm_propagate(c, launch_guide(c, mode, 0), opt);
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw NumericalError(fmt::format("run {}: {}", i + 1, errors[i]));
  }
  return out;
}

void write_power_csv(std::ostream& out, const BpmResult& result) {
  const std::size_t n = result.trace.empty() ? 0 : result.trace.front().guides.size();
  out << "z";
  for (std::size_t j = 1; j <= n; ++j) out << ",P_guide" << j;
  out << ",P_total\n";
  for (const auto& s : result.trace) {
    out << fmt::format("{:.10g}", s.z);
    for (const double g : s.guides) out << fmt::format(",{:.10g}", g);
    out << fmt::format(",{:.12g}\n", s.total);
  }
}

void write_field_dump(std::ostream& out, const Field& field, double half_width) {
  out << fmt::format("# z = {:.10g}\nx,re,im\n", field.z);
  for (std::size_t i = 0; i < field.samples.size(); ++i) {
    const double x = -half_width + static_cast<double>(i) * field.dx;
    out << fmt::format("{:.10g},{:.10g},{:.10g}\n", x, field.samples[i].real(),
                       field.samples[i].imag());
  }
}

}  // namespace wgf
