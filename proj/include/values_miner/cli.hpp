#pragma once

#include <ostream>
#include <span>
#include <string>

namespace values_miner {

/// Runs one CLI invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on a runtime failure (one line on `err`:
/// "error: <kind>: <message>"), 2 on a usage error (usage text on `err`).
int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace values_miner
