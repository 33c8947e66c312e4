#pragma once

/// @file cli.hpp
/// Subcommands: verify-symbols, green-bands, simulate, decay-report, energy-audit.
///
/// Exit status: 0 every verdict passed, 1 some verdict failed, 2 bad config or
/// arguments, 3 the run became unstable.

#include <iosfwd>

namespace dissipwave {

enum ExitStatus : int { kPass = 0, kVerdictFailed = 1, kConfigError = 2, kUnstable = 3 };

/// Results go to <root>/<preset name>/<UTC timestamp>/, where root is --out,
/// else $DISSIPWAVE_OUT, else ./runs.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dissipwave
