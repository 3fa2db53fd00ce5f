#pragma once

// Subcommands behind the dwlab front end. Each returns a process exit code.

#include <cstdint>
#include <ostream>
#include <string>

#include "dwlab/config.hpp"

namespace dwlab::app {

enum ExitCode : int { kOk = 0, kUsage = 1, kMismatch = 2, kInconclusive = 3 };

struct CommandOptions {
  /// Empty: $DWLAB_OUT/<command>-<config hash>, or ./dwlab_out/... without it.
  std::string out_dir;
  int workers = 1;
  std::uint64_t seed = 0;
};

int cmd_classify(const Config& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_linear(const Config& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_run(const Config& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_sweep(const Config& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_certificate(const Config& cfg, const CommandOptions& opt, std::ostream& log);

/// Runs `command`, turning configuration and validation errors into kUsage.
int dispatch(const std::string& command, const Config& cfg, const CommandOptions& opt,
             std::ostream& log, std::ostream& err);

/// Output directory for a command under the rules of CommandOptions::out_dir.
std::string resolve_out_dir(const std::string& command, const Config& cfg,
                            const CommandOptions& opt);

}  // namespace dwlab::app
