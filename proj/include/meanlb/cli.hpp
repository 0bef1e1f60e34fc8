#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace meanlb {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitIo = 4,
};

/// Runs `meanlb` with argv-style arguments (args[0] is the program name).
/// Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Whitespace- or comma-separated numbers; '#' starts a comment and a
/// leading non-numeric header line is skipped. Throws ConfigError with the
/// line and column of a malformed token and IoError if the file is unreadable.
std::vector<double> read_sample_file(const std::string& path);
std::vector<double> parse_sample_text(const std::string& text);

}  // namespace meanlb
