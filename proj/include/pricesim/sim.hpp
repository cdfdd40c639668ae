#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pricesim/demand.hpp"
#include "pricesim/policies.hpp"

namespace pricesim {

struct EpisodeResult {
    std::vector<double> prices;
    std::vector<std::uint8_t> outcomes;
    std::vector<double> pseudo_regret;  // cumulative expected revenue gap
    double realized_revenue = 0.0;
    long nonoptimal_pulls = 0;  // steps priced off the true model's optimum
    std::uint64_t seed = 0;
};

// One seeded episode of the engine's policy against the scenario's true
// model. Environment outcomes and policy tie-breaks come from two
// independent substreams of `seed`, so policy randomization never perturbs
// the outcome sequence.
EpisodeResult run_episode(const Scenario& scenario, const PolicyEngine& engine,
                          int horizon, std::uint64_t seed);

// Convenience overload that builds the engine from the spec, giving it
// matrix-only knowledge where that suffices and full curves otherwise.
EpisodeResult run_episode(const Scenario& scenario, const PolicySpec& spec,
                          int horizon, std::uint64_t seed);

// The episode's cumulative pseudo-regret sampled at the given steps.
std::vector<std::pair<int, double>> regret_trajectory(const EpisodeResult& episode,
                                                      const std::vector<int>& checkpoints);

// Default thinning: every step through 100, then ~50 log-spaced steps up to
// the horizon (always including it).
std::vector<int> default_checkpoints(int horizon);

struct ExperimentCell {
    std::string policy;
    int true_model = 0;
    int replications = 0;
    // Per checkpoint, across replications.
    std::vector<double> mean_regret, std_regret, ci_lo, ci_hi;
    std::vector<double> mean_nonoptimal_pulls_at;
    // At the horizon.
    double mean_nonoptimal_pulls = 0.0;
    double std_nonoptimal_pulls = 0.0;
    double mean_realized_revenue = 0.0;
};

struct ExperimentResult {
    std::vector<int> checkpoints;
    std::vector<ExperimentCell> cells;  // policy-major, true-model-minor
};

// Runs R episodes per (policy, true model) cell. When the scenario carries a
// true model index only that model is simulated; otherwise every model takes
// a turn as the truth. Episode (p, m, r) is seeded derive_seed(base_seed, p,
// m, r) and aggregation runs in replication order, so results are identical
// for any worker count. CIs are mean +/- 1.96 std / sqrt(R) with the
// sample (R-1) standard deviation.
ExperimentResult run_monte_carlo(const Scenario& scenario,
                                 const std::vector<PolicySpec>& specs, int horizon,
                                 int replications, std::uint64_t base_seed,
                                 int workers = 1, std::vector<int> checkpoints = {},
                                 const std::vector<std::string>* labels = nullptr);

// One row per (policy, true_model, checkpoint); locale-independent shortest
// round-trip number formatting, so equal results serialize byte-identically.
void write_csv(const ExperimentResult& result, std::ostream& out);

}  // namespace pricesim
