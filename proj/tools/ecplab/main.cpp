#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ecp/commands.hpp"
#include "ecp/common.hpp"

namespace {

void apply_config_file(const std::string& path, ecp::cli::RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ecp::DomainError("cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    for (const auto& [key, value] : j.items()) {
      if (key == "grid") cfg.grid = value.get<int>();
      else if (key == "mesh_level") cfg.mesh_level = value.get<int>();
      else if (key == "tol") cfg.tol = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
      else if (key == "formats") cfg.formats = value.get<std::vector<std::string>>();
      else if (key == "sweep_steps") cfg.sweep_steps = value.get<int>();
      else if (key == "sphere_d") cfg.sphere_d = value.get<int>();
      else if (key == "sphere_k") cfg.sphere_k = value.get<int>();
      else if (key != "command")  // the command comes from the command line
        throw ecp::DomainError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ecp::DomainError("config file " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string names;
  for (const auto& n : ecp::cli::command_names()) names += (names.empty() ? "" : ", ") + n;

  CLI::App app{"Verification runs for nodal-domain bounds of eigenfunction combinations"};
  app.name("ecplab");

  std::string command, config_path;
  ecp::cli::RunConfig cfg;
  int grid = cfg.grid, mesh_level = cfg.mesh_level, steps = cfg.sweep_steps;
  int sphere_d = cfg.sphere_d, sphere_k = cfg.sphere_k;
  double tol = cfg.tol;
  std::uint64_t seed = cfg.seed;
  std::string out_dir = cfg.out_dir;
  std::vector<std::string> formats;

  app.add_option("command", command, "one of: " + names)->required();
  auto* o_grid = app.add_option("--grid", grid, "sampling grid points per axis [101, 4001]");
  auto* o_level = app.add_option("--mesh-level", mesh_level, "FEM refinement level [3, 9]");
  auto* o_tol = app.add_option("--tol", tol, "relative tolerance for spectrum comparisons");
  auto* o_seed = app.add_option("--seed", seed, "seed for randomized checks");
  auto* o_out = app.add_option("--out", out_dir, "report/artifact directory");
  auto* o_fmt = app.add_option("--format", formats, "output formats: json, csv, svg")
                    ->delimiter(',');
  auto* o_steps = app.add_option("--steps", steps, "sweep grid size [3, 2001]");
  auto* o_d = app.add_option("--d", sphere_d, "sphere dimension for sphere-bounds");
  auto* o_k = app.add_option("--k", sphere_k, "harmonic degree for sphere-bounds");
  app.add_option("--config", config_path, "JSON config file; flags override its values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    if (o_grid->count()) cfg.grid = grid;
    if (o_level->count()) cfg.mesh_level = mesh_level;
    if (o_tol->count()) cfg.tol = tol;
    if (o_seed->count()) cfg.seed = seed;
    if (o_out->count()) cfg.out_dir = out_dir;
    if (o_fmt->count()) cfg.formats = formats;
    if (o_steps->count()) cfg.sweep_steps = steps;
    if (o_d->count()) cfg.sphere_d = sphere_d;
    if (o_k->count()) cfg.sphere_k = sphere_k;
    cfg.command = command;

    ecp::cli::CommandResult res = ecp::cli::run_command(cfg);

    std::printf("%s\n", command.c_str());
    for (const auto& v : res.envelope.verdicts)
      std::printf("  %-28s %-20s %s\n", v.name.c_str(), v.verdict.c_str(), v.detail.c_str());
    std::printf("%s  report: %s\n", res.exit_code == 0 ? "OK" : "FAILED",
                res.paths.envelope.c_str());
    return res.exit_code;
  } catch (const ecp::DomainError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
