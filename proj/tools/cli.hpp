#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dualprop::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. args excludes the program name. Human-readable
/// output goes to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a flat key=value file ('#' comments, blank lines ignored) and
/// appends "--key=value" to args for every key the command line does not
/// already set. Throws IoError on a missing file or a line without '='.
std::vector<std::string> merge_config_file(std::vector<std::string> args, const std::string& path);

}  // namespace dualprop::cli
