#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace calogero::cli {

enum ExitCode { kOk = 0, kValidationFailed = 1, kBadInput = 2, kNumericalFailure = 3 };

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat "key = value" lines, '#' comments, optional double quotes around values.
std::map<std::string, std::string> parse_config_file(const std::string& text);

}  // namespace calogero::cli
