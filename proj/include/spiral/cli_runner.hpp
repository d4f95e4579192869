#pragma once

#include <string>

#include "spiral/config.hpp"

namespace spiral::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;
inline constexpr int kExitPartial = 4;

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  int workers = 1;
  std::string preset = "paper";  // simulate/sweep: "desk" applies preset_desk
};

// Each runner loads the config, executes the engine and writes the output
// files; exceptions are mapped to the exit codes above.
int run_levelset(const RunOptions& opts);
int run_continue(const RunOptions& opts);
int run_simulate(const RunOptions& opts);
int run_sweep(const RunOptions& opts);
int run_centerbundle(const RunOptions& opts);

}  // namespace spiral::cli
