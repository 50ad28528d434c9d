#include "wgf/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <omp.h>

#include "sweep_detail.hpp"
#include "wgf/floquet.hpp"
#include "wgf/error.hpp"

namespace wgf {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::omega2:
      return "omega2";
    case SweepParameter::amplitude_over_omega:
      return "amplitude_over_omega";
    case SweepParameter::omega:
      return "omega";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "omega2") return SweepParameter::omega2;
  if (name == "amplitude_over_omega") return SweepParameter::amplitude_over_omega;
  if (name == "omega") return SweepParameter::omega;
  throw ConfigError(fmt::format(
      "unknown sweep parameter '{}' (expected omega2, amplitude_over_omega or omega)", name));
}

void SweepSpec::validate() const {
  base.validate();
  stepping.validate();
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("sweep grid must be strictly ascending");
  }
  if (initial_site >= static_cast<std::size_t>(base.n_sites)) {
    throw ConfigError(fmt::format("initial_site {} out of range", initial_site + 1));
  }
  for (const double v : {grid.front(), grid.back()}) config_at(*this, v).validate();
}

std::vector<double> linear_grid(double start, double stop, std::size_t count) {
  if (count == 0) throw ConfigError("grid count must be positive");
  if (count == 1) return {start};
  std::vector<double> g(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = start + static_cast<double>(i) * step;
  g.back() = stop;
  return g;
}

LatticeConfig config_at(const SweepSpec& spec, double value) {
  LatticeConfig c = spec.base;
  switch (spec.parameter) {
    case SweepParameter::omega2:
      c.omega2 = value;
      break;
    case SweepParameter::amplitude_over_omega:
      c.amplitude = value * c.omega;
      break;
    case SweepParameter::omega:
      c.omega = value;
      break;
  }
  return c;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; }));
}

namespace detail {

PointResult evaluate_point(const SweepSpec& spec, double value) {
  PointResult out;
  try {
    const LatticeConfig config = config_at(spec, value);
    const StateVector start = site_excitation(config.n_sites, spec.initial_site);
    out.min_p1 = propagate_min_population(config, start, spec.z_end.resolve(config),
                                          spec.stepping, spec.initial_site);
    out.floquet = solve_floquet(config, spec.stepping);
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

namespace {

std::vector<double> refinement_points(const std::vector<double>& grid,
                                      const std::vector<PointResult>& points) {
  const std::size_t n = grid.size();
  constexpr std::size_t reach = 5;
  constexpr int density = 10;
  std::vector<bool> refine_interval(n > 0 ? n - 1 : 0, false);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (points[i].failed || points[i - 1].failed || points[i + 1].failed) continue;
    const double v = points[i].min_p1;
    const bool is_min = v < points[i - 1].min_p1 && v <= points[i + 1].min_p1;
    const bool is_max = v > points[i - 1].min_p1 && v >= points[i + 1].min_p1;
    if (!is_min && !is_max) continue;
    const std::size_t lo = i >= reach ? i - reach : 0;
    const std::size_t hi = std::min(n - 1, i + reach);
    double depth = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (!points[j].failed) depth = std::max(depth, std::abs(points[j].min_p1 - v));
    }
    if (depth < kRefineProminence) continue;
    for (std::size_t j = lo; j < hi; ++j) refine_interval[j] = true;
  }
  std::vector<double> extra;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!refine_interval[j]) continue;
    for (int m = 1; m < density; ++m) {
      extra.push_back(grid[j] + (grid[j + 1] - grid[j]) * m / density);
    }
  }
  return extra;
}

}  // namespace

SweepResult sweep_with(const SweepSpec& spec, const PointEvaluator& evaluate) {
  spec.validate();
  std::vector<double> values = spec.grid;
  std::vector<PointResult> points = evaluate(spec, values);

  if (spec.refine) {
    const auto extra = refinement_points(values, points);
    if (!extra.empty()) {
      auto extra_points = evaluate(spec, extra);
      std::vector<std::size_t> order(values.size() + extra.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      const auto value_of = [&](std::size_t i) {
        return i < values.size() ? values[i] : extra[i - values.size()];
      };
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return value_of(a) < value_of(b); });
      std::vector<double> merged_values;
      std::vector<PointResult> merged_points;
      for (const auto i : order) {
        merged_values.push_back(value_of(i));
        merged_points.push_back(i < values.size() ? std::move(points[i])
                                                  : std::move(extra_points[i - values.size()]));
      }
      values = std::move(merged_values);
      points = std::move(merged_points);
    }
  }

  SweepResult result;
  result.n_sites = spec.base.n_sites;
  result.rows.reserve(values.size());
  std::vector<Eigen::VectorXcd> branch_modes;  // previous row, branch order
  const auto n = static_cast<std::size_t>(spec.base.n_sites);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t i = 0; i < values.size(); ++i) {
    const PointResult& pt = points[i];
    SweepRow row;
    row.param = values[i];
    row.omega = config_at(spec, values[i]).omega;
    if (pt.failed) {
      row.failed = true;
      row.error = pt.error;
      row.min_p1 = nan;
      row.quasienergies.assign(n, nan);
      result.rows.push_back(std::move(row));
      continue;
    }
    row.min_p1 = pt.min_p1;
    const auto& sol = pt.floquet;
    std::vector<std::size_t> perm(n);
    if (branch_modes.empty()) {
      for (std::size_t k = 0; k < n; ++k) perm[k] = k;
    } else {
      perm = match_modes(branch_modes, sol.modes);
    }
    branch_modes.clear();
    for (std::size_t k = 0; k < n; ++k) {
      row.quasienergies.push_back(sol.quasienergies[perm[k]]);
      branch_modes.push_back(sol.modes[perm[k]]);
    }
    if (sol.dark_index) {
      row.dark_present = true;
      const auto d = static_cast<Eigen::Index>(*sol.dark_index);
      for (Eigen::Index j = 0; j < sol.avg_populations.cols(); ++j) {
        row.dark_populations.push_back(sol.avg_populations(d, j));
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace detail

SweepResult run_sweep(const SweepSpec& spec, int workers) {
  return detail::sweep_with(
      spec, [workers](const SweepSpec& s, const std::vector<double>& values) {
        std::vector<detail::PointResult> out(values.size());
        const int threads = workers > 0 ? workers : omp_get_max_threads();
        const auto count = static_cast<long>(values.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (long i = 0; i < count; ++i) {
          out[static_cast<std::size_t>(i)] =
              detail::evaluate_point(s, values[static_cast<std::size_t>(i)]);
        }
        return out;
      });
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  const int n = result.n_sites;
  out << "param,min_p1";
  for (int k = 1; k <= n; ++k) out << ",eps_" << k;
  out << ",dark_present";
  for (int k = 1; k <= n; ++k) out << ",dark_p" << k;
  out << '\n';
  for (const auto& row : result.rows) {
    out << fmt::format("{:.10g},{:.10g}", row.param, row.min_p1);
    for (const double e : row.quasienergies) out << fmt::format(",{:.10g}", e);
    out << ',' << (row.dark_present ? 1 : 0);
    for (int k = 0; k < n; ++k) {
      out << ',';
      if (row.dark_present) out << fmt::format("{:.10g}", row.dark_populations[k]);
    }
    out << '\n';
  }
}

namespace {

template <class Better>
std::size_t arg_extreme(const SweepResult& result, double lo, double hi, Better better) {
  std::size_t best = result.size();
  for (std::size_t i = 0; i < result.size(); ++i) {
    const auto& r = result.rows[i];
    if (r.failed || r.param < lo || r.param > hi) continue;
    if (best == result.size() || better(r.min_p1, result.rows[best].min_p1)) best = i;
  }
  return best;
}

}  // namespace

std::size_t argmin_min_p1(const SweepResult& result, double lo, double hi) {
  return arg_extreme(result, lo, hi, std::less<double>());
}

std::size_t argmax_min_p1(const SweepResult& result, double lo, double hi) {
  return arg_extreme(result, lo, hi, std::greater<double>());
}

double width_below(const SweepResult& result, std::size_t index, double level) {
  if (index >= result.size()) throw ConfigError("row index out of range");
  const auto& rows = result.rows;
  const auto below = [&](std::size_t i) { return !rows[i].failed && rows[i].min_p1 < level; };
  if (!below(index)) return 0.0;
  const auto crossing = [&](std::size_t in, std::size_t out) {
    const double a = rows[in].min_p1, b = rows[out].min_p1;
    if (rows[out].failed || b == a) return rows[in].param;
    return rows[in].param + (level - a) / (b - a) * (rows[out].param - rows[in].param);
  };
  std::size_t l = index, r = index;
  while (l > 0 && below(l - 1)) --l;
  while (r + 1 < rows.size() && below(r + 1)) ++r;
  const double left = l > 0 ? crossing(l, l - 1) : rows[l].param;
  const double right = r + 1 < rows.size() ? crossing(r, r + 1) : rows[r].param;
  return right - left;
}

double nondark_min_gap(const SweepRow& row) {
  const double omega = row.omega;
  const double tol = kDarkEpsRelTol * omega;
  std::vector<double> eps;
  bool skipped = false;
  for (const double e : row.quasienergies) {
    if (row.dark_present && !skipped && std::abs(e) < tol) {
      skipped = true;
      continue;
    }
    eps.push_back(e);
  }
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < eps.size(); ++a) {
    for (std::size_t b = a + 1; b < eps.size(); ++b) {
      const double d = std::fmod(std::abs(eps[a] - eps[b]), omega);
      gap = std::min(gap, std::min(d, omega - d));
    }
  }
  return gap;
}

}  // namespace wgf
