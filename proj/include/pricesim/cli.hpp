#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace pricesim {

// Command-line flags that override the corresponding config values.
struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
};

// Exit codes shared by all subcommands: 0 success, 1 configuration or
// validation failure, 2 I/O failure.

// Runs the configured Monte Carlo experiment, prints a summary table, and
// writes the results CSV.
int cmd_run(const std::string& config_path, const CliOverrides& overrides = {});

// Prints the pull-cap constants (a, m, M, C, caps) per true model and
// competitor for the configured scenario.
int cmd_bounds(const std::string& config_path, const CliOverrides& overrides = {});

// Prints the exploration price for one model pair, the divergence attained
// there, and the harmonic-metric price for comparison.
int cmd_chernoff(const std::string& config_path, int i, int h,
                 const CliOverrides& overrides = {});

// Prints the scenario validation report; exits 0 iff the scenario is valid.
int cmd_validate(const std::string& config_path, const CliOverrides& overrides = {});

}  // namespace pricesim
