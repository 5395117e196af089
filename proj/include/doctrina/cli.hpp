#pragma once

#include <optional>
#include <string>
#include <vector>

namespace doctrina {

struct CommandResult {
    /// 0 pass, 1 verified failure, 2 unverifiable or missing structure,
    /// 3 usage or input error.
    int exit_code = 0;
    std::string out;
    std::string err;
};

/// Runs one command line (without the program name). `env_cap` stands in for
/// the DOCTRINA_CAP environment variable; an explicit --cap wins over it.
CommandResult run_cli(const std::vector<std::string>& args, const std::optional<std::string>& env_cap = std::nullopt);

/// Drops the timing line of a text report or the timing field of a JSON one,
/// leaving the part that must be identical across runs.
std::string without_timing(const std::string& report);

}  // namespace doctrina
