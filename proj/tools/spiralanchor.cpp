#include <CLI11.hpp>

#include "spiral/cli_runner.hpp"
#include "spiral/common.hpp"

int main(int argc, char** argv) {
  CLI::App app{std::string(spiral::kToolName) +
               " - spiral anchoring analysis: fixed-point maps, branch "
               "continuation and reaction-diffusion experiments"};
  app.set_version_flag("--version", std::string(spiral::kToolVersion));
  app.require_subcommand(1);

  spiral::cli::RunOptions opts;
  int (*runner)(const spiral::cli::RunOptions&) = nullptr;

  auto add_common = [&opts](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "path to the JSON run configuration")
        ->required();
    cmd->add_option("--out", opts.out_dir, "output directory (created if missing)")
        ->required();
    cmd->add_option("--workers", opts.workers, "worker threads for grid scans")
        ->default_val(1);
  };

  auto* levelset = app.add_subcommand(
      "levelset", "extract det A and fold-function zero sets plus fold candidates");
  add_common(levelset);
  levelset->callback([&] { runner = spiral::cli::run_levelset; });

  auto* cont = app.add_subcommand(
      "continue", "pseudo-arclength branch continuation with catastrophe table");
  add_common(cont);
  cont->callback([&] { runner = spiral::cli::run_continue; });

  auto* simulate = app.add_subcommand(
      "simulate", "reaction-diffusion run with tip tracking and anchoring summary");
  add_common(simulate);
  simulate->add_option("--preset", opts.preset, "desk or paper scale")->default_val("paper");
  simulate->callback([&] { runner = spiral::cli::run_simulate; });

  auto* sweep = app.add_subcommand(
      "sweep", "warm-started amplitude-path sweep (homotopy/hysteresis)");
  add_common(sweep);
  sweep->add_option("--preset", opts.preset, "desk or paper scale")->default_val("paper");
  sweep->callback([&] { runner = spiral::cli::run_sweep; });

  auto* centerbundle = app.add_subcommand(
      "centerbundle", "perturbed rotating wave search in the center-bundle system");
  add_common(centerbundle);
  centerbundle->callback([&] { runner = spiral::cli::run_centerbundle; });

  CLI11_PARSE(app, argc, argv);
  return runner ? runner(opts) : spiral::cli::kExitConfigError;
}
