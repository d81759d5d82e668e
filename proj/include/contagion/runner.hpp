#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace contagion {

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  int workers = 0;  // 0 = hardware concurrency
  std::optional<std::uint64_t> seed_override;
};

/// Executes one CLI command (simulate | phi | optimize | compare | check).
/// Writes artifacts into out_dir and a one-line summary per result to stdout.
/// Returns the process exit code: 0 success, 1 validation error, 2 numeric
/// failure.
int run_command(const std::string& command, const RunOptions& options);

}  // namespace contagion
