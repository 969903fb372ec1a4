#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kaclab/experiments.hpp"

namespace kaclab {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_assertion_failed = 2,
    exit_numeric_failure = 3,
    exit_usage = 64,
    exit_invalid_input = 65,
};

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

/// Flat `key = value` text; blank lines and lines starting with '#' are
/// skipped. Throws ParameterError naming the line of any malformed entry.
std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source = "config");
std::vector<ConfigEntry> read_config_file(const std::string& path);

/// Parses a config file into an ExperimentConfig, filling unspecified fields
/// with defaults. Keys: degree (or n), dist, eps0, samples, seed, interval,
/// region, eps, threads; other keys are left to the subcommands.
ExperimentConfig load_config(const std::string& path);

/// `a,b` with a <= b.
std::pair<double, double> parse_interval(const std::string& text);

/// Runs one subcommand. CSV goes to --out (or `out`), the JSON summary to
/// --report (or `err`); diagnostics go to `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kaclab
