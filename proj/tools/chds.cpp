// chds: command line front end for the Cahn-Hilliard-Darcy-Stokes solver.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

#include "chds/commands.hpp"
#include "chds/config.hpp"
#include "chds/error.hpp"

namespace {

int thread_cap() {
  const char* env = std::getenv("CHDS_THREADS");
  if (env && *env) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "chds: ignoring invalid CHDS_THREADS='" << env << "'\n";
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite element solver for the Cahn-Hilliard-Darcy-Stokes system"};
  app.require_subcommand(1, 1);

  std::string config_path;
  chds::CommandOptions options;
  std::string out_dir;
  int snapshots = -1;
  int levels = -1;

  const char* commands[][2] = {{"run", "Run one trajectory and write per-step diagnostics"},
                               {"converge", "Cauchy convergence study over nested meshes"},
                               {"diagnose", "Initialize, take one step and check every invariant"},
                               {"mesh-info", "Print mesh statistics"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value configuration file (omit for defaults)");
    sub->add_option("--out", out_dir, "Output directory (overrides out_dir)");
    sub->add_option("--snapshots", snapshots, "VTK snapshot every N steps (overrides snapshot_every)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--levels", levels, "Number of mesh levels for converge")->check(CLI::PositiveNumber);
    sub->add_flag("--finest", options.finest, "Add one more refinement level to converge");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const chds::Config config = config_path.empty() ? chds::parse_config("") : chds::parse_config_file(config_path);
    if (!out_dir.empty()) options.out_dir = out_dir;
    if (snapshots >= 0) options.snapshots = snapshots;
    if (levels > 0) options.levels = levels;
    options.threads = thread_cap();
    return chds::dispatch(app.get_subcommands().front()->get_name(), config, options, std::cout);
  } catch (const chds::Error& e) {
    std::cerr << "chds: " << e.what() << '\n';
    return chds::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "chds: " << e.what() << '\n';
    return 1;
  }
}
