#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wgf/integrate.hpp"
#include "wgf/lattice.hpp"

namespace wgf {

enum class SweepParameter { omega2, amplitude_over_omega, omega };

std::string_view to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(std::string_view name);

/// Extrema whose depth against their +-5-step neighbourhood is below this are
/// not refined.
inline constexpr double kRefineProminence = 0.05;

struct SweepSpec {
  LatticeConfig base;
  SweepParameter parameter = SweepParameter::omega2;
  std::vector<double> grid;
  std::size_t initial_site = 0;  // 0-based
  ZEndPolicy z_end;
  Stepping stepping;
  /// Second pass at 10x density over +-5 grid steps around each extremum.
  bool refine = false;

  void validate() const;
};

/// `count` evenly spaced values from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, std::size_t count);

/// Lattice parameters at one grid value.
LatticeConfig config_at(const SweepSpec& spec, double value);

struct SweepRow {
  double param = 0.0;
  double omega = 0.0;
  double min_p1 = 0.0;
  /// Quasienergies ordered by branch: row 0 ascending, later rows follow
  /// the maximum-overlap continuation of the previous row's modes.
  std::vector<double> quasienergies;
  bool dark_present = false;
  std::vector<double> dark_populations;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  int n_sites = 0;
  std::vector<SweepRow> rows;

  std::size_t size() const { return rows.size(); }
  std::size_t failures() const;
};

/// OpenMP over grid points; workers <= 0 uses the OpenMP default.
/// Output is independent of the worker count.
SweepResult run_sweep(const SweepSpec& spec, int workers = 0);

/// Single-threaded reference for run_sweep.
SweepResult run_sweep_serial(const SweepSpec& spec);

/// Header: param,min_p1,eps_1..eps_N,dark_present,dark_p1..dark_pN
void write_sweep_csv(std::ostream& out, const SweepResult& result);

// Diagnostics on a finished sweep. Windows are inclusive parameter ranges;
// failed rows are skipped. Return result.size() when the window is empty.
std::size_t argmin_min_p1(const SweepResult& result, double lo, double hi);
std::size_t argmax_min_p1(const SweepResult& result, double lo, double hi);

/// Width of the connected region around `index` where min_p1 < level, with
/// linear interpolation at the crossings; 0 if min_p1 at index >= level.
double width_below(const SweepResult& result, std::size_t index, double level);

/// Smallest circular distance (mod omega) between two quasienergies of the
/// row, ignoring the dark mode when one is present.
double nondark_min_gap(const SweepRow& row);

}  // namespace wgf
