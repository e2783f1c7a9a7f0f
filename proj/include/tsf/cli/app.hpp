#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsf::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numeric = 3;

/// Command-line entry point. Subcommands: generate, train, evaluate, plot,
/// run. Returns 0 on success, 2 for usage, config or data errors and 3 for
/// numeric failures.
int run(int argc, const char* const* argv);

/// Same, with arguments excluding the program name and explicit streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tsf::cli
