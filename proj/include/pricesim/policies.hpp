#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pricesim/demand.hpp"
#include "pricesim/info.hpp"
#include "pricesim/rng.hpp"

namespace pricesim {

enum class PolicyKind { lrt, xlrt, elrt, exlrt, mbp, cmbp, oracle };

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

// Tunables for one policy instance. Kinds ignore fields they do not use:
// kappa/eta only matter to the thresholded kinds, delta to cmbp, q0 to the
// Bayesian kinds, metric to the exploration-price kinds.
struct PolicySpec {
    PolicyKind kind = PolicyKind::lrt;
    double kappa = 0.5;                // threshold fraction of the KL bound
    std::optional<double> eta0;        // explicit xlrt thresholds; both or neither
    std::optional<double> eta1;
    double delta = 0.05;               // cmbp discrimination margin
    double q0 = 0.5;                   // initial belief for Bayesian kinds
    ExplorationMetric metric = ExplorationMetric::chernoff;
};

enum class KnowledgeMode { matrix_only, full_curves };

// What a policy instance is allowed to see. matrix_only carries just the arm
// prices and the probability matrix rho_i(p_k*) — enough for lrt, elrt and
// oracle, which never price off the arm set. full_curves carries the whole
// demand curves plus the interval, required by any policy that does
// (exploration prices, myopic grid maximization).
struct PolicyKnowledge {
    KnowledgeMode mode = KnowledgeMode::matrix_only;
    std::vector<double> optimal_prices;
    std::vector<std::vector<double>> prob_matrix;  // [model][arm]
    std::vector<DemandModel> models;               // full_curves only
    Interval interval;                             // full_curves only
    GridConfig grid;

    static PolicyKnowledge matrix_only(const Scenario& scenario);
    static PolicyKnowledge full_curves(const Scenario& scenario);
};

struct Thresholds {
    double eta0 = 0.0;
    double eta1 = 0.0;
    std::vector<std::vector<double>> eta_pair;  // [d1][d2], zero diagonal
};

// kappa times the smallest KL term of each threshold condition. For ordered
// pair (d1, d2) the condition's terms are the divergences of d1 from d2 at
// p_{d1}*, at the pair's exploration price, and at p_{d2}*. For two models,
// eta1 is the (1,0) entry and eta0 the (0,1) entry.
Thresholds default_thresholds(const Scenario& scenario, double kappa = 0.5,
                              ExplorationMetric metric = ExplorationMetric::chernoff);

struct PolicyState;

// Immutable precomputation shared by every episode of one policy instance:
// per-price log-likelihood tables, pairwise exploration prices, validated
// thresholds, and the Bayesian price grid. Construction performs all
// validation (knowledge sufficiency, threshold bounds, delta feasibility);
// choose/observe never fail at runtime on a well-formed harness.
class PolicyEngine {
  public:
    // `thresholds` overrides both the spec's explicit eta fields and the
    // kappa defaults; `oracle_model` is required by (and only used for) the
    // oracle kind.
    PolicyEngine(PolicySpec spec, PolicyKnowledge knowledge,
                 std::optional<Thresholds> thresholds = std::nullopt,
                 std::optional<int> oracle_model = std::nullopt);

    const PolicySpec& spec() const { return spec_; }
    int n_models() const { return n_; }
    const std::vector<double>& arm_prices() const { return arm_prices_; }
    const Thresholds& thresholds() const { return thresholds_; }

    // Precomputed exploration price for an (unordered) model pair.
    double exploration_price_for(int i, int h) const;

  private:
    friend double choose_price(PolicyState& state, int t);
    friend void observe(PolicyState& state, double price, int outcome);

    void build_likelihood_tables();
    void build_bayesian_grid();
    void resolve_thresholds(const std::optional<Thresholds>& explicit_thresholds);
    double pair_threshold_bound(int d1, int d2) const;  // min of the 3 KL terms

    PolicySpec spec_;
    KnowledgeMode mode_ = KnowledgeMode::matrix_only;
    int n_ = 0;
    std::vector<DemandModel> models_;  // full_curves only
    Interval interval_;
    GridConfig grid_;
    std::vector<double> arm_prices_;
    std::vector<std::vector<double>> prob_matrix_;  // [model][arm]

    // Every price the policy can emit, with log f_model(outcome) per entry.
    std::vector<double> known_prices_;
    std::vector<std::vector<std::array<double, 2>>> loglik_;  // [price][model][outcome]

    std::vector<std::vector<double>> px_;       // [i][h] exploration prices
    Thresholds thresholds_;

    // Bayesian kinds: revenue and probability tables over the price grid.
    std::vector<double> grid_prices_, grid_r0_, grid_r1_;
    std::vector<int> allowed_;  // cmbp: grid indices with |rho0 - rho1| > delta

    int oracle_index_ = -1;
};

// Per-episode mutable state. policy_init performs no draws; the first
// choose_price of a likelihood-family policy makes the uniform first-arm
// draw from the episode's policy stream.
struct PolicyState {
    const PolicyEngine* engine = nullptr;
    Rng* rng = nullptr;              // policy randomization substream
    std::vector<double> cum_loglik;  // Lambda_i, unnormalized sums of log f_i
    int t_obs = 0;                   // observations folded in
    double q = 0.5;                  // belief that model 1 is true (Bayesian)
};

PolicyState policy_init(const PolicyEngine& engine, Rng& rng);

// Price to offer at step t (1-based). Draws from state.rng only to break
// ties (and for the uniform first step).
double choose_price(PolicyState& state, int t);

// Folds in the outcome (1 = accepted) of having offered `price`.
void observe(PolicyState& state, double price, int outcome);

// Indices attaining the maximum (exact double comparison). Used by the
// tie-breaking policies; exposed for property tests.
std::vector<int> argmax_set(const std::vector<double>& values);

}  // namespace pricesim
