#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace circpc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. `args` excludes the program name. Tabular output is
/// CSV on `out`, scalar output JSON on `out`, diagnostics on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses `start:stop:count` into `count` evenly spaced values including
/// both ends. Throws std::invalid_argument on malformed input.
std::vector<double> parse_grid(const std::string& text);

} // namespace circpc::cli
