#pragma once

#include <filesystem>
#include <string>

#include "chds/mesh.hpp"
#include "chds/params.hpp"
#include "chds/scheme.hpp"

namespace chds {

struct InitialSpec {
  enum class Kind { Spinodal, Constant, Expression };
  Kind kind = Kind::Spinodal;
  double value = 0.0;      // Constant
  std::string expression;  // Expression
};

struct VelocitySpec {
  enum class Kind { Zero, Vortex };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
};

/// Everything a run or a convergence study needs. Defaults reproduce the spinodal
/// decomposition setup (n = 16, tau = 1.25e-4, T = 0.4).
struct Config {
  Params params;
  int n = 16;
  int levels = 4;               // convergence study: meshes n, 2n, ..., 2^(levels-1) n
  double path_constant = 2e-3;  // convergence study: tau = path_constant * h
  Rectangle domain;
  InitialSpec initial;
  InitMode init_mode = InitMode::Interpolate;
  VelocitySpec initial_velocity;
  std::string out_dir = "chds_out";
  int snapshot_every = 0;

  /// Throws chds::Error (Config) naming the key and the violated constraint.
  void validate() const;
};

/// Line-oriented `key = value` text; '#' starts a comment; unknown keys are rejected.
Config parse_config(const std::string& text);
Config parse_config_file(const std::filesystem::path& path);

/// Text that parse_config() maps back to the same Config.
std::string serialize(const Config& config);

InitialData make_initial_data(const Config& config);

}  // namespace chds
