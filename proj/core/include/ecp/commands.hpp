#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecp/report.hpp"

namespace ecp::cli {

// Shared knob set for every command; each command reads the knobs that make
// sense for it and ignores the rest. All values are echoed into the report.
struct RunConfig {
  std::string command;
  int grid = 801;        // nodal sampling grid (per axis, bounding box)
  int mesh_level = 7;    // FEM refinement level (solves run at level-1 and level)
  double tol = 1e-4;     // relative tolerance for spectrum comparisons
  std::uint64_t seed = 0;
  std::string out_dir = "reports";
  std::vector<std::string> formats = {"json"};  // json | csv | svg
  int sweep_steps = 101;
  int sphere_d = 2;
  int sphere_k = 3;
};

struct CommandResult {
  int exit_code = 0;  // 0 ok, 1 verification failure
  ReportEnvelope envelope;
  ReportPaths paths;
};

const std::vector<std::string>& command_names();

// Runs one named verification, writes its reports/artifacts under
// cfg.out_dir, and returns the envelope. Invalid configs (unknown command,
// out-of-range knobs) raise DomainError before anything is written; errors
// during verification are folded into a failing report instead.
CommandResult run_command(const RunConfig& cfg);

}  // namespace ecp::cli
