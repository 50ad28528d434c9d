#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "wgf/continuum.hpp"
#include "wgf/floquet.hpp"
#include "wgf/integrate.hpp"
#include "wgf/lattice.hpp"
#include "wgf/sweep.hpp"

namespace wgf {

using json = nlohmann::json;

struct GridRange {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
};

struct SweepSection {
  SweepParameter parameter = SweepParameter::omega2;
  std::vector<double> grid;
  std::optional<GridRange> range;  // when the grid was given as a range
  std::size_t initial_site = 0;    // 0-based; 1-based in files
  bool refine = false;
};

struct IntegrateSection {
  ZEndPolicy z_end;
  Stepping stepping;
};

/// Run description with sections `lattice`, `integrate`, `sweep` and
/// `continuum`. Missing fields take the struct defaults; unknown keys are
/// rejected with ConfigError.
struct RunConfig {
  std::optional<LatticeConfig> lattice;
  IntegrateSection integrate;
  std::optional<SweepSection> sweep;
  std::optional<ContinuumConfig> continuum;
};

RunConfig parse_run_config(const json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Fully resolved document; parse_run_config(to_json(c)) reproduces c.
json to_json(const RunConfig& config);
json to_json(const LatticeConfig& config);
json to_json(const ContinuumConfig& config);

LatticeConfig parse_lattice(const json& section);
ContinuumConfig parse_continuum(const json& section);

/// Requires the lattice and sweep sections.
SweepSpec make_sweep_spec(const RunConfig& config);

/// quasienergies, dark_index (0-based or null), avg_populations, ...
json floquet_to_json(const FloquetSolution& solution);

/// Reproducibility record written next to a sweep CSV.
json sweep_sidecar(const RunConfig& config, const SweepResult& result);

}  // namespace wgf
