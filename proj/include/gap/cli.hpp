// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gap::cli {

/// Process exit codes. Listed in `gap --help`.
enum ExitCode : int {
  kOk = 0,
  kProcessingError = 1,  // one or more videos failed; nothing written
  kUsageError = 2,       // unknown flag or bad flag value
  kFileError = 3,        // input missing/unreadable or output not writable
  kValidationError = 4,  // input document violates its schema
  kUnitConflict = 5,     // units disagree within or across inputs
  kConfigError = 6,      // bad scenario or config file
};

/// Environment variable naming a JSON file with default refinement settings.
inline constexpr const char* kConfigEnv = "GAP_CONFIG";

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gap::cli
