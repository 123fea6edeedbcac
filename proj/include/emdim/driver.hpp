#pragma once

#include "emdim/cases.hpp"
#include "emdim/config.hpp"
#include "emdim/error.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace emdim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2 };

struct CommandOptions {
  std::string out_dir = ".";
  int threads = 0;  // 0 keeps the OpenMP default
  std::optional<std::uint64_t> seed;
};

/// Mesh, graph and data of the configured case at the given radius.
struct Instance {
  CaseSetup setup;
  std::optional<ManufacturedCase> exact;
  TetMesh mesh;
  GraphMesh gmesh;
};

Instance build_instance(const RunConfig& config, double radius);

/// Maps a library error to the CLI exit status (solver failures 2, the rest 1).
int exit_code_for(const Error& error);

int cmd_run(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_sweep(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_gen(const RunConfig& config, const CommandOptions& options, std::ostream& log);
int cmd_verify(const RunConfig& config, const CommandOptions& options, std::ostream& log);

/// Full command line: `emdim <run|sweep|gen|verify> [--config PATH] [--out DIR]
/// [--threads N] [--seed N]`.
int run_cli(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

}  // namespace emdim
