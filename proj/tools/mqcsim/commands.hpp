#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mqcsim::cli {

inline constexpr const char* kVersion = "0.1.0";

struct CommandOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // "section.key=value"
  bool quiet = false;                  // no progress on stderr
};

/// Runs lattice, grow, perturb, echo, equilibrium or sweep. Throws Error on
/// failure; the caller maps the kind onto an exit code.
void run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Oracle equivalence suite. Prints one report per check and returns true
/// when all pass.
bool selftest(std::ostream& out);

/// Exit code for an Error kind: config and bad arguments 2, resource cap 3,
/// invariant violations 4.
int exit_code_for(const std::exception& e);

}  // namespace mqcsim::cli
