#pragma once

#include <string>
#include <vector>

#include "app/config.hpp"

namespace mocu::app {

struct CommandResult {
  int exit_code = 0;
  std::string report;               // human-readable summary
  std::vector<std::string> files;   // written outputs
};

std::vector<std::string> command_names();

/// Runs one subcommand: sim-quadratic, gene-network, surrogate or kg-demo.
/// Outputs go to [run] out_dir; each output directory also gets the resolved
/// config with the version string.
CommandResult run_command(const std::string& name, const Config& config);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

const char* version_string() noexcept;

}  // namespace mocu::app
