#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace alpha::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kConfigError = 2, kDataError = 3 };

/// Entry point of the `alpha` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Turns `key = value` lines into `--key value` arguments (`key = true` for flags).
std::vector<std::string> config_file_arguments(const std::string& path);

}  // namespace alpha::cli
