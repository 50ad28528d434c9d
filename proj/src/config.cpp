#include "wgf/config.hpp"

#include <fstream>
#include <set>
#include <string>
#include <type_traits>

#include <fmt/format.h>

#include "wgf/error.hpp"

namespace wgf {
namespace {

void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(fmt::format("'{}' must be an object", where));
}

void check_keys(const json& j, std::string_view section, const std::set<std::string>& allowed) {
  require_object(j, section);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(fmt::format("unknown key '{}' in section '{}'", key, section));
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, std::string_view section) {
  if (!j.contains(key)) return;
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) {
      throw ConfigError(fmt::format("'{}.{}' must be a non-negative integer (got {})", section,
                                    key, v.dump()));
    }
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("bad value for '{}.{}': {}", section, key, j.at(key).dump()));
  }
}

IntegrateSection parse_integrate(const json& s) {
  check_keys(s, "integrate", {"z_end", "steps_per_period", "samples_per_period"});
  IntegrateSection out;
  if (s.contains("z_end")) {
    const auto& v = s.at("z_end");
    if (v.is_number()) {
      out.z_end = ZEndPolicy::parse(fmt::format("{}", v.get<double>()));
    } else if (v.is_string()) {
      out.z_end = ZEndPolicy::parse(v.get<std::string>());
    } else {
      throw ConfigError("integrate.z_end must be a number or a string");
    }
  }
  read(s, "steps_per_period", out.stepping.steps_per_period, "integrate");
  read(s, "samples_per_period", out.stepping.samples_per_period, "integrate");
  out.stepping.validate();
  return out;
}

SweepSection parse_sweep(const json& s) {
  check_keys(s, "sweep", {"parameter", "grid", "initial_site", "refine"});
  SweepSection out;
  std::string name = "omega2";
  read(s, "parameter", name, "sweep");
  out.parameter = parse_sweep_parameter(name);
  if (!s.contains("grid")) throw ConfigError("sweep.grid is required");
  const auto& g = s.at("grid");
  if (g.is_array()) {
    read(s, "grid", out.grid, "sweep");
  } else {
    check_keys(g, "sweep.grid", {"start", "stop", "count"});
    GridRange r;
    if (!g.contains("start") || !g.contains("stop") || !g.contains("count")) {
      throw ConfigError("sweep.grid range needs start, stop and count");
    }
    read(g, "start", r.start, "sweep.grid");
    read(g, "stop", r.stop, "sweep.grid");
    read(g, "count", r.count, "sweep.grid");
    out.grid = linear_grid(r.start, r.stop, r.count);
    out.range = r;
  }
  std::size_t site = 1;
  read(s, "initial_site", site, "sweep");
  if (site < 1) throw ConfigError("sweep.initial_site is 1-based");
  out.initial_site = site - 1;
  read(s, "refine", out.refine, "sweep");
  return out;
}

}  // namespace

LatticeConfig parse_lattice(const json& s) {
  check_keys(s, "lattice", {"n_sites", "omega1", "omega2", "amplitude", "omega"});
  LatticeConfig c;
  read(s, "n_sites", c.n_sites, "lattice");
  read(s, "omega1", c.omega1, "lattice");
  read(s, "omega2", c.omega2, "lattice");
  read(s, "amplitude", c.amplitude, "lattice");
  read(s, "omega", c.omega, "lattice");
  c.validate();
  return c;
}

ContinuumConfig parse_continuum(const json& s) {
  check_keys(s, "continuum",
             {"n_guides", "p", "w_x", "mu", "omega", "ws1", "ws2", "half_width", "n_x", "dz",
              "z_max"});
  ContinuumConfig c;
  read(s, "n_guides", c.n_guides, "continuum");
  read(s, "p", c.p, "continuum");
  read(s, "w_x", c.w_x, "continuum");
  read(s, "mu", c.mu, "continuum");
  read(s, "omega", c.omega, "continuum");
  read(s, "ws1", c.ws1, "continuum");
  read(s, "ws2", c.ws2, "continuum");
  read(s, "half_width", c.grid.half_width, "continuum");
  read(s, "n_x", c.grid.n_x, "continuum");
  read(s, "dz", c.grid.dz, "continuum");
  read(s, "z_max", c.grid.z_max, "continuum");
  c.validate();
  return c;
}

RunConfig parse_run_config(const json& doc) {
  check_keys(doc, "<root>", {"lattice", "integrate", "sweep", "continuum"});
  RunConfig out;
  if (doc.contains("lattice")) out.lattice = parse_lattice(doc.at("lattice"));
  if (doc.contains("integrate")) out.integrate = parse_integrate(doc.at("integrate"));
  if (doc.contains("sweep")) out.sweep = parse_sweep(doc.at("sweep"));
  if (doc.contains("continuum")) out.continuum = parse_continuum(doc.at("continuum"));
  return out;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_run_config(doc);
}

json to_json(const LatticeConfig& c) {
  return {{"n_sites", c.n_sites},
          {"omega1", c.omega1},
          {"omega2", c.omega2},
          {"amplitude", c.amplitude},
          {"omega", c.omega}};
}

json to_json(const ContinuumConfig& c) {
  return {{"n_guides", c.n_guides},   {"p", c.p},
          {"w_x", c.w_x},             {"mu", c.mu},
          {"omega", c.omega},         {"ws1", c.ws1},
          {"ws2", c.ws2},             {"half_width", c.grid.half_width},
          {"n_x", c.grid.n_x},        {"dz", c.grid.dz},
          {"z_max", c.grid.z_max}};
}

json to_json(const RunConfig& c) {
  json doc = json::object();
  if (c.lattice) doc["lattice"] = to_json(*c.lattice);
  json integ = {{"steps_per_period", c.integrate.stepping.steps_per_period},
                {"samples_per_period", c.integrate.stepping.samples_per_period}};
  if (c.integrate.z_end.kind == ZEndPolicy::Kind::absolute) {
    integ["z_end"] = c.integrate.z_end.value;
  } else {
    integ["z_end"] = c.integrate.z_end.to_string();
  }
  doc["integrate"] = integ;
  if (c.sweep) {
    json s = {{"parameter", std::string(to_string(c.sweep->parameter))},
              {"initial_site", c.sweep->initial_site + 1},
              {"refine", c.sweep->refine}};
    if (c.sweep->range) {
      s["grid"] = {{"start", c.sweep->range->start},
                   {"stop", c.sweep->range->stop},
                   {"count", c.sweep->range->count}};
    } else {
      s["grid"] = c.sweep->grid;
    }
    doc["sweep"] = s;
  }
  if (c.continuum) doc["continuum"] = to_json(*c.continuum);
  return doc;
}

SweepSpec make_sweep_spec(const RunConfig& config) {
  if (!config.lattice) throw ConfigError("a sweep needs a 'lattice' section");
  if (!config.sweep) throw ConfigError("a sweep needs a 'sweep' section");
  SweepSpec spec;
  spec.base = *config.lattice;
  spec.parameter = config.sweep->parameter;
  spec.grid = config.sweep->grid;
  spec.initial_site = config.sweep->initial_site;
  spec.refine = config.sweep->refine;
  spec.z_end = config.integrate.z_end;
  spec.stepping = config.integrate.stepping;
  spec.validate();
  return spec;
}

json floquet_to_json(const FloquetSolution& s) {
  json pops = json::array();
  for (Eigen::Index k = 0; k < s.avg_populations.rows(); ++k) {
    json row = json::array();
    for (Eigen::Index j = 0; j < s.avg_populations.cols(); ++j) row.push_back(s.avg_populations(k, j));
    pops.push_back(row);
  }
  json doc = {{"omega", s.omega},
              {"quasienergies", s.quasienergies},
              {"avg_populations", pops},
              {"dark_ambiguous", s.dark_ambiguous},
              {"unitarity_defect", s.unitarity_defect}};
  doc["dark_index"] = s.dark_index ? json(*s.dark_index) : json(nullptr);
  return doc;
}

json sweep_sidecar(const RunConfig& config, const SweepResult& result) {
  json failures = json::array();
  for (const auto& r : result.rows) {
    if (r.failed) failures.push_back({{"param", r.param}, {"error", r.error}});
  }
  return {{"config", to_json(config)},
          {"rows", result.size()},
          {"failures", failures},
          {"columns", "param,min_p1,eps_1..eps_N,dark_present,dark_p1..dark_pN"}};
}

}  // namespace wgf
