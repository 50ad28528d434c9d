#include "wgf/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <fmt/format.h>

#include "wgf/analysis.hpp"
#include "wgf/config.hpp"
#include "wgf/continuum.hpp"
#include "wgf/error.hpp"
#include "wgf/floquet.hpp"
#include "wgf/integrate.hpp"
#include "wgf/lattice.hpp"
#include "wgf/sweep.hpp"

namespace wgf {
namespace {

namespace fs = std::filesystem;

struct LatticeFlags {
  std::optional<int> n;
  std::optional<double> omega1, omega2, amplitude, omega;
  std::string config_path;
  std::string z_end;
  std::optional<int> steps_per_period, samples_per_period;

  void add_to(CLI::App& app, bool with_stepping) {
    app.add_option("--n", n, "number of sites N");
    app.add_option("--omega1", omega1, "interior coupling");
    app.add_option("--omega2", omega2, "coupling to the bottom site");
    app.add_option("--a", amplitude, "drive amplitude A");
    app.add_option("--omega", omega, "drive frequency");
    app.add_option("--config", config_path, "run config (JSON)");
    if (with_stepping) {
      app.add_option("--zend", z_end, "propagation length: 'default', a length, or '<k>T'");
      app.add_option("--steps-per-period", steps_per_period, "RK4 steps per drive period");
      app.add_option("--samples-per-period", samples_per_period, "stored samples per period");
    }
  }

  RunConfig resolve() const {
    RunConfig rc = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    LatticeConfig c = rc.lattice.value_or(LatticeConfig{});
    if (n) c.n_sites = *n;
    if (omega1) c.omega1 = *omega1;
    if (omega2) c.omega2 = *omega2;
    if (amplitude) c.amplitude = *amplitude;
    if (omega) c.omega = *omega;
    c.validate();
    rc.lattice = c;
    if (!z_end.empty()) rc.integrate.z_end = ZEndPolicy::parse(z_end);
    if (steps_per_period) rc.integrate.stepping.steps_per_period = *steps_per_period;
    if (samples_per_period) rc.integrate.stepping.samples_per_period = *samples_per_period;
    rc.integrate.stepping.validate();
    return rc;
  }
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string preset_dir;
  int workers = 0;

  fs::path preset_path(const std::string& name) const {
    fs::path p = fs::path(preset_dir) / (name + ".json");
    if (!fs::exists(p)) {
      throw ConfigError(fmt::format("unknown preset '{}' (looked in {})", name, preset_dir));
    }
    return p;
  }

  void echo(const json& resolved) const { err << "# config: " << resolved.dump() << '\n'; }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot write '{}'", path));
  return f;
}

fs::path sidecar_for(const std::string& csv) {
  fs::path p(csv);
  p.replace_extension(".meta.json");
  return p;
}

void write_json_file(const fs::path& path, const json& doc) {
  auto f = open_output(path.string());
  f << doc.dump(2) << '\n';
}

std::string default_preset_dir() {
  if (const char* env = std::getenv("WGF_PRESET_DIR")) return env;
#ifdef WGF_PRESET_DIR
  return WGF_PRESET_DIR;
#else
  return "presets";
#endif
}

int default_workers() {
  if (const char* env = std::getenv("WGF_WORKERS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("WGF_WORKERS='{}' is not an integer", env));
    }
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Driven waveguide-array simulator: coupled-mode dynamics, Floquet analysis, "
               "parameter sweeps and continuum beam propagation",
               "wgf"};
  app.require_subcommand(1);
  Context ctx{out, err, {}, 0};
  std::string preset_dir;
  std::optional<int> workers;
  app.add_option("--preset-dir", preset_dir, "directory holding preset files");
  app.add_option("--workers", workers, "worker threads (default: WGF_WORKERS or all cores)");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the undriven chain");
  LatticeFlags spectrum_flags;
  spectrum_flags.add_to(*spectrum, false);

  // propagate
  auto* propagate_cmd = app.add_subcommand("propagate", "coupled-mode trajectory as CSV");
  LatticeFlags prop_flags;
  prop_flags.add_to(*propagate_cmd, true);
  int prop_site = 1;
  std::string prop_start = "site";
  std::string prop_csv;
  propagate_cmd->add_option("--site", prop_site, "initially excited site (1-based)");
  propagate_cmd->add_option("--start", prop_start, "initial state: site | dark")
      ->check(CLI::IsMember({"site", "dark"}));
  propagate_cmd->add_option("--csv", prop_csv, "output file (default stdout)");

  // floquet
  auto* floquet_cmd = app.add_subcommand("floquet", "quasienergies and Floquet modes as JSON");
  LatticeFlags floq_flags;
  floq_flags.add_to(*floquet_cmd, true);
  std::string floq_json;
  floquet_cmd->add_option("--json", floq_json, "output file (default stdout)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter scan: Min(P1), quasienergies, dark state");
  std::string sweep_preset, sweep_config, sweep_csv, sweep_json;
  bool sweep_refine = false;
  auto* sweep_src = sweep_cmd->add_option_group("source");
  sweep_src->add_option("--preset", sweep_preset, "named preset (see `wgf presets`)");
  sweep_src->add_option("--config", sweep_config, "run config (JSON)");
  sweep_src->require_option(1);
  sweep_cmd->add_flag("--refine", sweep_refine, "re-sample around extrema at 10x density");
  sweep_cmd->add_option("--csv", sweep_csv, "output CSV (default stdout)");
  sweep_cmd->add_option("--json", sweep_json, "sidecar path (default: CSV path with .meta.json)");

  // continuum
  auto* cont = app.add_subcommand("continuum", "continuum beam-propagation model");
  cont->require_subcommand(1);
  auto* cont_prop = cont->add_subcommand("propagate", "per-guide power trace as CSV");
  std::string cont_preset, cont_config, cont_csv, snap_prefix = "snapshot";
  std::optional<double> cont_ws1, cont_ws2, cont_mu, cont_zmax;
  std::vector<double> snapshots;
  int record_every = 1;
  auto* cont_src = cont_prop->add_option_group("source");
  cont_src->add_option("--preset", cont_preset, "named preset");
  cont_src->add_option("--config", cont_config, "run config (JSON)");
  cont_src->require_option(0, 1);
  cont_prop->add_option("--ws1", cont_ws1, "spacing of the upper guides");
  cont_prop->add_option("--ws2", cont_ws2, "spacing of the bottom guide");
  cont_prop->add_option("--mu", cont_mu, "modulation depth");
  cont_prop->add_option("--zmax", cont_zmax, "propagation length");
  cont_prop->add_option("--record-every", record_every, "steps between trace rows");
  cont_prop->add_option("--snapshot", snapshots, "z at which to dump the field (repeatable)");
  cont_prop->add_option("--snapshot-prefix", snap_prefix, "file prefix for field dumps");
  cont_prop->add_option("--csv", cont_csv, "output CSV (default stdout)");

  auto* cont_cal = cont->add_subcommand("calibrate", "beat period of an unmodulated coupler");
  double cal_spacing = 3.2;
  ContinuumConfig cal_defaults;
  double cal_p = cal_defaults.p, cal_wx = cal_defaults.w_x;
  TransverseGrid cal_grid;
  cal_grid.z_max = 500.0;
  cont_cal->add_option("--spacing", cal_spacing, "guide separation")->required();
  cont_cal->add_option("--p", cal_p, "index contrast");
  cont_cal->add_option("--wx", cal_wx, "channel width");
  cont_cal->add_option("--zmax", cal_grid.z_max, "longest propagation");
  cont_cal->add_option("--nx", cal_grid.n_x, "transverse samples");
  cont_cal->add_option("--dz", cal_grid.dz, "longitudinal step");
  cont_cal->add_option("--half-width", cal_grid.half_width, "half width of the window");

  auto* cont_drive = cont->add_subcommand("drive", "match mu to the lattice amplitude A");
  std::string drive_preset, drive_config;
  auto* drive_src = cont_drive->add_option_group("source");
  drive_src->add_option("--preset", drive_preset, "named preset");
  drive_src->add_option("--config", drive_config, "run config (JSON)");
  drive_src->require_option(0, 1);

  // bessel / resonances / presets
  auto* bessel_cmd = app.add_subcommand("bessel", "zeros of J_n");
  int bessel_n = 0, bessel_count = 3;
  bessel_cmd->add_option("--n", bessel_n, "order")->required();
  bessel_cmd->add_option("--count", bessel_count, "number of zeros");

  auto* res_cmd = app.add_subcommand("resonances", "photon-resonance couplings omega2*");
  double res_omega1 = 1.0, res_omega = 3.0;
  int res_nmax = 3;
  res_cmd->add_option("--omega1", res_omega1, "interior coupling");
  res_cmd->add_option("--omega", res_omega, "drive frequency");
  res_cmd->add_option("--nmax", res_nmax, "highest photon order");

  auto* presets_cmd = app.add_subcommand("presets", "list shipped presets");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    ctx.preset_dir = preset_dir.empty() ? default_preset_dir() : preset_dir;
    ctx.workers = workers ? *workers : default_workers();

    if (*spectrum) {
      const auto rc = spectrum_flags.resolve();
      ctx.echo(to_json(*rc.lattice));
      out << "k,eigenvalue\n";
      const auto ev = unmodulated_spectrum(*rc.lattice);
      for (std::size_t k = 0; k < ev.size(); ++k) {
        out << fmt::format("{},{:.10f}\n", k + 1, std::abs(ev[k]) < 1e-12 ? 0.0 : ev[k]);
      }
    } else if (*propagate_cmd) {
      const auto rc = prop_flags.resolve();
      const auto& c = *rc.lattice;
      ctx.echo(to_json(rc));
      StateVector start = prop_start == "dark"
                              ? dark_state_unmodulated(c)
                              : site_excitation(c.n_sites, static_cast<std::size_t>(prop_site - 1));
      if (prop_site < 1) throw ConfigError("--site is 1-based");
      const auto traj = propagate(c, start, rc.integrate.z_end.resolve(c), rc.integrate.stepping);
      if (prop_csv.empty()) {
        write_trajectory_csv(out, traj);
      } else {
        auto f = open_output(prop_csv);
        write_trajectory_csv(f, traj);
      }
      err << fmt::format("# min P1 = {:.10g}, max norm drift = {:.3e}\n", min_population(traj, 0),
                         traj.max_norm_drift);
    } else if (*floquet_cmd) {
      const auto rc = floq_flags.resolve();
      ctx.echo(to_json(rc));
      auto doc = floquet_to_json(solve_floquet(*rc.lattice, rc.integrate.stepping));
      doc["config"] = to_json(*rc.lattice);
      if (floq_json.empty()) {
        out << doc.dump(2) << '\n';
      } else {
        write_json_file(floq_json, doc);
      }
    } else if (*sweep_cmd) {
      RunConfig rc = load_run_config(sweep_preset.empty() ? fs::path(sweep_config)
                                                          : ctx.preset_path(sweep_preset));
      if (sweep_refine && rc.sweep) rc.sweep->refine = true;
      const auto spec = make_sweep_spec(rc);
      ctx.echo(to_json(rc));
      const auto result = run_sweep(spec, ctx.workers);
      if (sweep_csv.empty()) {
        write_sweep_csv(out, result);
      } else {
        auto f = open_output(sweep_csv);
        write_sweep_csv(f, result);
      }
      const std::string sidecar =
          !sweep_json.empty() ? sweep_json
                              : (sweep_csv.empty() ? std::string{} : sidecar_for(sweep_csv).string());
      if (!sidecar.empty()) {
        if (!sweep_config.empty() && fs::exists(sidecar) &&
            fs::equivalent(fs::path(sidecar), fs::path(sweep_config))) {
          throw ConfigError(fmt::format("sidecar '{}' would overwrite the input config", sidecar));
        }
        write_json_file(sidecar, sweep_sidecar(rc, result));
      }
      if (result.failures() > 0) {
        for (const auto& r : result.rows) {
          if (r.failed) err << fmt::format("# point {} failed: {}\n", r.param, r.error);
        }
        return kExitNumerical;
      }
    } else if (*cont) {
      if (*cont_prop) {
        RunConfig rc;
        if (!cont_preset.empty()) rc = load_run_config(ctx.preset_path(cont_preset));
        if (!cont_config.empty()) rc = load_run_config(cont_config);
        ContinuumConfig c = rc.continuum.value_or(ContinuumConfig{});
        if (cont_ws1) c.ws1 = *cont_ws1;
        if (cont_ws2) c.ws2 = *cont_ws2;
        if (cont_mu) c.mu = *cont_mu;
        if (cont_zmax) c.grid.z_max = *cont_zmax;
        c.validate();
        rc.continuum = c;
        ctx.echo(to_json(rc));
        const auto mode = fundamental_mode(c.p, c.w_x, c.grid);
        BpmOptions opt;
        opt.record_every = record_every;
        opt.snapshot_z = snapshots;
        const auto result = bpm_propagate(c, launch_guide(c, mode, 0), opt);
        if (cont_csv.empty()) {
          write_power_csv(out, result);
        } else {
          auto f = open_output(cont_csv);
          write_power_csv(f, result);
          write_json_file(sidecar_for(cont_csv), {{"config", to_json(rc)},
                                                  {"beta", mode.beta},
                                                  {"max_power_drift", result.max_power_drift},
                                                  {"min_top_fraction", result.min_fraction(0)}});
        }
        for (const auto& snap : result.snapshots) {
          auto f = open_output(fmt::format("{}_z{:.4f}.txt", snap_prefix, snap.z));
          write_field_dump(f, snap.field, c.grid.half_width);
        }
        err << fmt::format("# min top-guide fraction = {:.6f}, max power drift = {:.3e}\n",
                           result.min_fraction(0), result.max_power_drift);
      } else if (*cont_cal) {
        ctx.echo({{"spacing", cal_spacing}, {"p", cal_p}, {"w_x", cal_wx},
                  {"half_width", cal_grid.half_width}, {"n_x", cal_grid.n_x},
                  {"dz", cal_grid.dz}, {"z_max", cal_grid.z_max}});
        const auto cal = calibrate_coupling(cal_spacing, cal_p, cal_wx, cal_grid);
        out << "spacing,beat_period,coupling\n";
        out << fmt::format("{:.6g},{:.6f},{:.8f}\n", cal.spacing, cal.beat_period, cal.coupling);
      } else if (*cont_drive) {
        RunConfig rc;
        if (!drive_preset.empty()) rc = load_run_config(ctx.preset_path(drive_preset));
        if (!drive_config.empty()) rc = load_run_config(drive_config);
        const ContinuumConfig c = rc.continuum.value_or(ContinuumConfig{});
        ctx.echo(to_json(c));
        const auto d = calibrate_drive(c, ctx.workers);
        out << "omega1,beat_period,lattice_a_star,mu_star,a_per_mu,overlap_estimate\n";
        out << fmt::format("{:.8f},{:.6f},{:.8f},{:.8f},{:.8f},{:.8f}\n", d.omega1,
                           d.beat_period, d.lattice_a_star, d.mu_star, d.a_per_mu,
                           d.overlap_estimate);
      }
    } else if (*bessel_cmd) {
      write_zeros_csv(out, bessel_n, bessel_zeros(bessel_n, bessel_count));
    } else if (*res_cmd) {
      write_resonance_csv(out, resonance_positions(res_omega1, res_omega, res_nmax));
    } else if (*presets_cmd) {
      std::vector<std::string> names;
      for (const auto& entry : fs::directory_iterator(ctx.preset_dir)) {
        if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
      }
      std::sort(names.begin(), names.end());
      for (const auto& n : names) out << n << '\n';
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace wgf
