#include "spiral/cli_runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "spiral/csv.hpp"

namespace spiral::cli {

namespace {

namespace fs = std::filesystem;
using config::json;

void write_echo(const std::string& out_dir, const json& echo) {
  std::ofstream out(out_dir + "/config_echo.json");
  if (!out) throw ConfigError("cannot write config echo in " + out_dir);
  out << echo.dump(2) << "\n";
}

std::string stability_code(continuation::Stability s) {
  switch (s) {
    case continuation::Stability::attracting: return "attracting";
    case continuation::Stability::repelling: return "repelling";
    default: return "saddle";
  }
}

std::string event_type(continuation::EventKind k) {
  switch (k) {
    case continuation::EventKind::fold: return "fold";
    case continuation::EventKind::infinity: return "infinity";
    default: return "stall";
  }
}

std::string angle_kind_name(continuation::AngleKind k) {
  switch (k) {
    case continuation::AngleKind::fold: return "fold";
    case continuation::AngleKind::infinity: return "infinity";
    case continuation::AngleKind::lower_bound: return "lower_bound";
    default: return "catastrophe_free";
  }
}

// --- planar configs ---------------------------------------------------------

struct PlanarRun {
  planar::MapSpec spec;
  planar::Window window;
  int resolution = 600;
  double rho = 0.01;
  bool use_general = false;
  std::optional<double> omega_star;
  std::optional<double> escape_radius;
  json echo;
};

PlanarRun load_planar(const RunOptions& opts) {
  const json j = config::load_json(opts.config_path);
  PlanarRun run;
  run.spec = config::parse_map_spec(j);
  run.window = config::parse_window(j, run.spec);
  run.resolution = j.value("resolution", 600);
  run.rho = j.value("rho", 0.01);
  run.use_general = j.value("use_general", false);
  if (j.contains("omega_star")) run.omega_star = j["omega_star"].get<double>();
  if (j.contains("escape_radius")) run.escape_radius = j["escape_radius"].get<double>();
  if (run.resolution < 8) throw ConfigError("resolution: too small");
  if (run.rho <= 0.0) throw ConfigError("rho: must be positive");
  if (run.use_general && !run.spec.has_general_parts()) {
    throw ConfigError("use_general requires map.general parts");
  }

  run.echo = config::map_spec_to_json(run.spec);
  run.echo["window"] = config::window_to_json(run.window);
  run.echo["resolution"] = run.resolution;
  run.echo["rho"] = run.rho;
  run.echo["use_general"] = run.use_general;
  if (run.omega_star) run.echo["omega_star"] = *run.omega_star;
  if (run.escape_radius) run.echo["escape_radius"] = *run.escape_radius;
  return run;
}

void write_curves(const std::string& path, const std::string& digest,
                  const std::vector<planar::LevelCurve>& curves) {
  io::CsvWriter csv(path, digest);
  csv.columns({"curve", "vertex", "x1", "x2"});
  for (size_t c = 0; c < curves.size(); ++c) {
    csv.comment("curve " + std::to_string(c) + ": label=" +
                (curves[c].label().empty() ? "-" : curves[c].label()) +
                " closed=" + (curves[c].closed ? "1" : "0") +
                " flagged=" + std::to_string(curves[c].flagged_vertices.size()));
    for (size_t v = 0; v < curves[c].points.size(); ++v) {
      csv.row({static_cast<double>(c), static_cast<double>(v), curves[c].points[v].x,
               curves[c].points[v].y});
    }
  }
}

// --- rd configs --------------------------------------------------------------

struct RdRun {
  rd::ModelSpec model;
  rd::GridConfig grid;
  rd::Scheme scheme = rd::Scheme::rk2;
  rd::CrossFieldInit init;
  bool has_v_kick = false;
  double v_kick = 0.0;
  std::optional<double> u_excited_override;
  rd::ExperimentConfig experiment;
  json sweep_section;
  json echo;
};

RdRun load_rd(const RunOptions& opts) {
  json j = config::load_json(opts.config_path);
  const std::string preset_key = "preset_" + opts.preset;
  if (opts.preset != "desk" && opts.preset != "paper") {
    throw ConfigError("preset: expected 'desk' or 'paper'");
  }
  if (j.contains(preset_key)) {
    json patch = j[preset_key];
    j.merge_patch(patch);
  }

  RdRun run;
  run.model = config::parse_rd_model(j);
  run.grid = config::parse_grid(j);
  run.scheme = config::parse_scheme(j.value("scheme", "rk2"));

  Vec2 core{0.0, 0.0};
  bool mirror = false;
  if (j.contains("init")) {
    const json& ji = j["init"];
    if (ji.contains("core")) {
      core = {ji["core"][0].get<double>(), ji["core"][1].get<double>()};
    }
    mirror = ji.value("mirror", false);
    if (ji.contains("v_kick")) {
      run.has_v_kick = true;
      run.v_kick = ji["v_kick"].get<double>();
    }
    if (ji.contains("u_excited")) run.u_excited_override = ji["u_excited"].get<double>();
  }
  run.init.core = core;
  run.init.mirror = mirror;

  rd::ExperimentConfig& exp = run.experiment;
  if (j.contains("run")) {
    const json& jr = j["run"];
    exp.duration = jr.value("duration", exp.duration);
    exp.tip_every = jr.value("tip_every", exp.tip_every);
    exp.transient_fraction = jr.value("transient_fraction", exp.transient_fraction);
    exp.auto_iso = jr.value("auto_iso", exp.auto_iso);
    exp.iso_u = jr.value("iso_u", exp.iso_u);
    exp.iso_v = jr.value("iso_v", exp.iso_v);
    exp.frame_every = jr.value("frame_every", exp.frame_every);
  }
  exp.scheme = run.scheme;
  if (j.contains("sweep")) run.sweep_section = j["sweep"];

  run.echo = config::rd_model_to_json(run.model);
  run.echo.merge_patch(config::grid_to_json(run.grid));
  run.echo["scheme"] = config::scheme_name(run.scheme);
  run.echo["init"] = {{"core", json::array({core.x, core.y})}, {"mirror", mirror}};
  if (run.has_v_kick) run.echo["init"]["v_kick"] = run.v_kick;
  if (run.u_excited_override) run.echo["init"]["u_excited"] = *run.u_excited_override;
  run.echo["run"] = {{"duration", exp.duration},
                     {"tip_every", exp.tip_every},
                     {"transient_fraction", exp.transient_fraction},
                     {"auto_iso", exp.auto_iso},
                     {"iso_u", exp.iso_u},
                     {"iso_v", exp.iso_v},
                     {"frame_every", exp.frame_every}};
  if (!run.sweep_section.is_null()) run.echo["sweep"] = run.sweep_section;
  return run;
}

rd::Simulator make_simulator(const RdRun& run, int workers) {
  rd::Simulator sim(run.model, run.grid, workers);
  rd::CrossFieldInit init = sim.default_cross_field(run.init.core);
  init.mirror = run.init.mirror;
  if (run.has_v_kick) init.v_elevated = init.v_rest + run.v_kick;
  if (run.u_excited_override) init.u_excited = *run.u_excited_override;
  sim.apply_cross_field(init);
  return sim;
}

void write_tips(const std::string& path, const std::string& digest,
                const std::vector<rd::TipSample>& tips) {
  io::CsvWriter csv(path, digest);
  csv.columns({"t", "x1", "x2"});
  for (const auto& tip : tips) csv.row({tip.t, tip.pos.x, tip.pos.y});
}

void write_anchoring_summary(const std::string& path, const std::string& digest,
                             const rd::AnchoringResult& res, const rd::ModelSpec& model) {
  io::CsvWriter csv(path, digest);
  csv.columns({"key", "value"});
  csv.row_mixed({"anchored", res.anchored ? "1" : "0"});
  csv.row_mixed({"center_x1", io::format_double(res.center.x)});
  csv.row_mixed({"center_x2", io::format_double(res.center.y)});
  csv.row_mixed({"period", io::format_double(res.period)});
  csv.row_mixed({"radius", io::format_double(res.radius)});
  csv.row_mixed({"drift_speed", io::format_double(res.drift_speed)});
  csv.row_mixed({"note", res.note.empty() ? "-" : res.note});
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& bell : model.bells) {
    dmin = std::min(dmin, (res.center - bell.center).norm());
  }
  if (std::isfinite(dmin)) {
    csv.row_mixed({"min_bell_distance", io::format_double(dmin)});
  }
}

}  // namespace

int run_levelset(const RunOptions& opts) {
  try {
    const PlanarRun run = load_planar(opts);
    fs::create_directories(opts.out_dir);
    const std::string digest = config::digest(run.echo);
    write_echo(opts.out_dir, run.echo);

    if (!run.window.contains(run.spec.xi)) {
      std::cerr << "warning: window excludes xi; the xi curve will be unlabeled\n";
    }
    planar::LevelsetOptions ls;
    ls.resolution = run.resolution;
    ls.workers = opts.workers;
    write_curves(opts.out_dir + "/kappa.csv", digest,
                 planar::extract_levelset(run.spec, planar::CurveKind::kappa, run.window, ls));
    write_curves(opts.out_dir + "/fold1.csv", digest,
                 planar::extract_levelset(run.spec, planar::CurveKind::fold1, run.window, ls));
    write_curves(opts.out_dir + "/fold2.csv", digest,
                 planar::extract_levelset(run.spec, planar::CurveKind::fold2, run.window, ls));

    planar::FoldCandidateOptions fc;
    fc.resolution = run.resolution;
    std::vector<planar::FoldCandidate> degenerate;
    const auto cands = planar::fold_candidates(run.spec, run.window, fc, &degenerate);
    io::CsvWriter csv(opts.out_dir + "/candidates.csv", digest);
    csv.columns({"x1", "x2", "row", "case", "kernel_angle", "degenerate"});
    for (const auto& c : cands) {
      csv.row({c.x.x, c.x.y, static_cast<double>(c.row + 1),
               static_cast<double>(c.case_tag), c.kernel_angle, 0.0});
    }
    for (const auto& c : degenerate) {
      csv.row({c.x.x, c.x.y, static_cast<double>(c.row + 1),
               static_cast<double>(c.case_tag), c.kernel_angle, 1.0});
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}

int run_continue(const RunOptions& opts) {
  try {
    const PlanarRun run = load_planar(opts);
    fs::create_directories(opts.out_dir);
    const std::string digest = config::digest(run.echo);
    write_echo(opts.out_dir, run.echo);

    if (run.omega_star && run.rho >= *run.omega_star) {
      std::cerr << "warning: rho >= omega_star (outside the guaranteed regime)\n";
    }

    auto copts = continuation::default_options(run.spec);
    if (run.escape_radius) copts.escape_radius = *run.escape_radius;

    std::unique_ptr<continuation::CircleMap> map;
    if (run.use_general) {
      map = std::make_unique<continuation::GeneralCircleMap>(run.spec, run.rho);
    } else {
      map = std::make_unique<continuation::TruncatedCircleMap>(run.spec, run.rho);
    }

    const auto b0 = continuation::continue_branch(*map, {0.0, 0.0}, 0.0, copts);
    continuation::WedgeReport wedges = continuation::wedge_angles(b0, b0, run.spec.xi);
    std::vector<std::pair<std::string, continuation::Branch>> branches;
    if (wedges.same_curve) {
      branches.emplace_back("C0=Cxi", b0);
    } else {
      const auto bxi = continuation::continue_branch(*map, run.spec.xi, kPi / 2.0, copts);
      wedges = continuation::wedge_angles(b0, bxi, run.spec.xi);
      branches.emplace_back("C0", b0);
      branches.emplace_back("Cxi", bxi);
    }

    bool stalled = false;
    for (size_t b = 0; b < branches.size(); ++b) {
      const auto& [label, branch] = branches[b];
      io::CsvWriter csv(opts.out_dir + "/branch_" + std::to_string(b) + ".csv", digest);
      csv.comment("label=" + label +
                  " classification=" + (branch.closed ? "loop" : branch.unbounded()
                                                                     ? "unbounded"
                                                                     : "truncated") +
                  " rho=" + io::format_double(branch.rho));
      csv.columns({"s", "norm_x", "x1", "x2", "stability"});
      for (const auto& p : branch.points) {
        csv.row_mixed({io::format_double(wrap_angle_2pi(p.s)), io::format_double(p.x.norm()),
                       io::format_double(p.x.x), io::format_double(p.x.y),
                       stability_code(p.stability)});
      }
      for (const auto& ev : branch.events) {
        stalled = stalled || ev.kind == continuation::EventKind::stall;
      }
    }

    // Event table in the reference-table shape.
    io::CsvWriter table(opts.out_dir + "/table.csv", digest);
    table.columns({"curve", "type", "x1", "x2", "s_star", "wedge_angle", "degenerate"});
    const double wedge_values[4] = {wedges.fore_origin.value, wedges.post_origin.value,
                                    wedges.fore_xi.value, wedges.post_xi.value};
    for (const auto& [label, branch] : branches) {
      for (const auto& ev : branch.events) {
        std::string wedge = "n.a.";
        if (!ev.degenerate && ev.kind != continuation::EventKind::stall) {
          // An event carries a wedge angle when its angle to a site axis
          // matches one of the four first-catastrophe angles.
          for (double site : {0.0, kPi / 2.0}) {
            const double angle = std::abs(wrap_angle(ev.s_star - site));
            const double angle_pi = std::abs(wrap_angle(ev.s_star - site - kPi));
            for (double w : wedge_values) {
              if (std::abs(angle - w) < 1e-9 || std::abs(angle_pi - w) < 1e-9) {
                wedge = io::format_double(w);
              }
            }
          }
        }
        table.row_mixed({label, event_type(ev.kind),
                         ev.x_star ? io::format_double(ev.x_star->x) : "n.a.",
                         ev.x_star ? io::format_double(ev.x_star->y) : "n.a.",
                         io::format_double(wrap_angle_2pi(ev.s_star)), wedge,
                         ev.degenerate ? "1" : "0"});
      }
    }

    io::CsvWriter wcsv(opts.out_dir + "/wedges.csv", digest);
    wcsv.columns({"key", "value", "kind"});
    wcsv.row_mixed({"same_curve", wedges.same_curve ? "1" : "0", "-"});
    wcsv.row_mixed({"fore_origin", io::format_double(wedges.fore_origin.value),
                    angle_kind_name(wedges.fore_origin.kind)});
    wcsv.row_mixed({"post_origin", io::format_double(wedges.post_origin.value),
                    angle_kind_name(wedges.post_origin.kind)});
    wcsv.row_mixed({"fore_xi", io::format_double(wedges.fore_xi.value),
                    angle_kind_name(wedges.fore_xi.kind)});
    wcsv.row_mixed({"post_xi", io::format_double(wedges.post_xi.value),
                    angle_kind_name(wedges.post_xi.kind)});
    wcsv.row_mixed({"nu1", io::format_double(wedges.nu1), "-"});
    wcsv.row_mixed({"nu2", io::format_double(wedges.nu2), "-"});
    wcsv.row_mixed({"overlap", wedges.overlap, "-"});

    return stalled ? kExitPartial : kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}

int run_simulate(const RunOptions& opts) {
  std::optional<RdRun> run;
  try {
    run = load_rd(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    fs::create_directories(opts.out_dir);
    const std::string digest = config::digest(run->echo);
    write_echo(opts.out_dir, run->echo);

    rd::Simulator sim = make_simulator(*run, opts.workers);
    const double cfl = sim.cfl_limit();
    if (run->grid.dt > cfl) {
      std::cerr << "warning: dt=" << run->grid.dt << " exceeds the diffusion CFL estimate "
                << cfl << "\n";
    }
    rd::ExperimentConfig exp = run->experiment;
    if (exp.frame_every > 0) exp.frame_prefix = opts.out_dir + "/frame_";

    try {
      const auto result = rd::run_experiment(sim, exp);
      write_tips(opts.out_dir + "/tip.csv", digest, result.tips);
      write_anchoring_summary(opts.out_dir + "/summary.csv", digest, result.anchoring,
                              sim.model());
      return kExitOk;
    } catch (const NumericalError& e) {
      std::cerr << "blow-up: " << e.what() << "\n";
      write_tips(opts.out_dir + "/tip.csv", digest, {});
      return kExitPartial;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int run_sweep(const RunOptions& opts) {
  std::optional<RdRun> run;
  try {
    run = load_rd(opts);
    if (run->sweep_section.is_null()) {
      throw ConfigError("sweep: missing 'sweep' section");
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    fs::create_directories(opts.out_dir);
    const std::string digest = config::digest(run->echo);
    write_echo(opts.out_dir, run->echo);

    const json& js = run->sweep_section;
    rd::SweepConfig cfg;
    cfg.rho = js.value("rho", 0.01);
    cfg.tau_begin = js.value("tau_begin", 0.0);
    cfg.tau_end = js.value("tau_end", kPi / 2.0);
    cfg.steps = js.value("steps", 10);
    cfg.settle_duration = js.value("settle_duration", 60.0);
    cfg.measure_duration = js.value("measure_duration", 60.0);
    const bool reverse = js.value("reverse", false);
    const double form_duration = js.value("form_duration", 60.0);
    const double jump_threshold = js.value("jump_threshold", 1.0);
    cfg.experiment = run->experiment;

    rd::Simulator sim = make_simulator(*run, opts.workers);
    sim.advance(run->scheme, run->grid.dt,
                static_cast<int>(std::llround(form_duration / run->grid.dt)));

    const auto forward = rd::run_sweep(sim, cfg);
    std::vector<rd::SweepRecord> backward;
    if (reverse) {
      std::swap(cfg.tau_begin, cfg.tau_end);
      backward = rd::run_sweep(sim, cfg);
    }

    io::CsvWriter csv(opts.out_dir + "/sweep.csv", digest);
    csv.columns({"tau", "center_x1", "center_x2", "anchored", "direction"});
    for (const auto& rec : forward) {
      csv.row({rec.tau, rec.result.center.x, rec.result.center.y,
               rec.result.anchored ? 1.0 : 0.0, 1.0});
    }
    for (const auto& rec : backward) {
      csv.row({rec.tau, rec.result.center.x, rec.result.center.y,
               rec.result.anchored ? 1.0 : 0.0, -1.0});
    }

    if (reverse) {
      const auto hyst = rd::analyze_hysteresis(forward, backward, jump_threshold);
      io::CsvWriter hcsv(opts.out_dir + "/hysteresis.csv", digest);
      hcsv.columns({"key", "value"});
      hcsv.row_mixed({"disagreement", hyst.disagreement ? "1" : "0"});
      hcsv.row_mixed({"tau_lo", io::format_double(hyst.tau_lo)});
      hcsv.row_mixed({"tau_hi", io::format_double(hyst.tau_hi)});
      hcsv.row_mixed({"forward_jumps", std::to_string(hyst.forward_jumps.size())});
      hcsv.row_mixed({"reverse_jumps", std::to_string(hyst.reverse_jumps.size())});
    }
    return kExitOk;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitPartial;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int run_centerbundle(const RunOptions& opts) {
  std::optional<bundle::CenterBundleSystem> sys;
  Complex guess{0.0, 0.0};
  bundle::WaveSearchOptions wopts;
  json echo;
  try {
    const json j = config::load_json(opts.config_path);
    sys = config::parse_bundle_system(j);
    if (j.contains("guess")) {
      guess = {j["guess"][0].get<double>(), j["guess"][1].get<double>()};
    }
    if (j.contains("integrator")) {
      wopts.integrator.dt = j["integrator"].value("dt", wopts.integrator.dt);
      wopts.integrator.escape_radius =
          j["integrator"].value("escape_radius", wopts.integrator.escape_radius);
    }
    echo = config::bundle_system_to_json(*sys);
    echo["guess"] = json::array({guess.real(), guess.imag()});
    echo["integrator"] = {{"dt", wopts.integrator.dt},
                          {"escape_radius", wopts.integrator.escape_radius}};
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    fs::create_directories(opts.out_dir);
    const std::string digest = config::digest(echo);
    write_echo(opts.out_dir, echo);

    const auto orbit = bundle::find_perturbed_wave(*sys, guess, wopts);

    io::CsvWriter csv(opts.out_dir + "/orbit.csv", digest);
    csv.columns({"t", "re_p", "im_p"});
    for (const auto& s : orbit.samples) csv.row({s.t, s.p.real(), s.p.imag()});

    io::CsvWriter sum(opts.out_dir + "/summary.csv", digest);
    sum.columns({"key", "value"});
    sum.row_mixed({"center_re", io::format_double(orbit.center.real())});
    sum.row_mixed({"center_im", io::format_double(orbit.center.imag())});
    for (int k = 0; k < 2; ++k) {
      sum.row_mixed({"multiplier_" + std::to_string(k + 1) + "_re",
                     io::format_double(orbit.multipliers[k].real())});
      sum.row_mixed({"multiplier_" + std::to_string(k + 1) + "_im",
                     io::format_double(orbit.multipliers[k].imag())});
      sum.row_mixed({"multiplier_" + std::to_string(k + 1) + "_modulus",
                     io::format_double(std::abs(orbit.multipliers[k]))});
    }
    for (int j = 0; j < sys->n(); ++j) {
      const Complex alpha = bundle::anchoring_coefficient(*sys, j);
      sum.row_mixed({"alpha_" + std::to_string(j + 1) + "_re",
                     io::format_double(alpha.real())});
      sum.row_mixed({"alpha_" + std::to_string(j + 1) + "_im",
                     io::format_double(alpha.imag())});
    }
    const char* cls = orbit.stability == bundle::WaveStability::anchoring
                          ? "anchoring"
                          : orbit.stability == bundle::WaveStability::repelling
                                ? "repelling"
                                : "non_hyperbolic";
    sum.row_mixed({"classification", cls});
    return kExitOk;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace spiral::cli
