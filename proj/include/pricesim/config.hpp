#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pricesim/demand.hpp"
#include "pricesim/policies.hpp"

namespace pricesim {

// Malformed or inconsistent configuration; the message names the offending
// key (and value where there is one).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem-level failure (unreadable config, unwritable output); mapped to
// a distinct exit code by the CLI.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    // scenario
    std::vector<DemandModel> models;
    Interval interval;
    std::optional<int> true_model;  // nullopt = every model takes a turn
    // policies
    std::vector<PolicySpec> policies;
    std::vector<std::string> policy_labels;  // kind names, deduplicated
    // run
    int horizon = 1000;
    int replications = 500;
    std::uint64_t base_seed = 1;
    std::vector<int> checkpoints;  // empty = default thinning
    int workers = 1;
    int grid_points = 4001;
    // output
    std::string csv_path;
    std::string bounds_path;
};

// Parses and validates a JSON config. Unknown keys are hard errors, as are
// out-of-range values; both throw ConfigError naming the key.
ExperimentConfig parse_config(const std::string& json_text);

// Reads the file and parses it. Unreadable file throws IoError.
ExperimentConfig load_config(const std::string& path);

}  // namespace pricesim
