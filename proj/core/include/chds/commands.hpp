#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "chds/config.hpp"

namespace chds {

struct CommandOptions {
  std::optional<std::string> out_dir;  // overrides the config
  std::optional<int> snapshots;        // overrides snapshot_every
  std::optional<int> levels;           // overrides levels
  bool finest = false;                 // one extra refinement level
  int threads = 1;
};

/// Runs one of run, converge, diagnose, mesh-info. Returns the process exit status: 0 on
/// success, 1 when diagnose finds a residual above its threshold. Errors propagate as
/// chds::Error.
int dispatch(const std::string& command, const Config& config, const CommandOptions& options, std::ostream& out);

}  // namespace chds
