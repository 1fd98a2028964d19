#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one subcommand (`simulate`, `estimate`, `mc-table`, `kde-check`).
/// `args` excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands `--config <file>`: every `key = value` line of the file becomes `--key=value`
/// unless the command line already sets `--key`. Blank lines and `#` comments are skipped.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace smatch::cli
