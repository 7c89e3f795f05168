#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rcpd::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

/// Runs one command. `args` excludes the program name, e.g.
/// {"simulate", "--p", "10", "-o", "s.txt"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads `key = value` lines ('#' starts a comment) into `--key=value` tokens.
std::vector<std::string> config_tokens(const std::string& path);

}  // namespace rcpd::cli
