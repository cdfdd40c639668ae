#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pricesim/grid_search.hpp"

namespace pricesim {

// Probabilities are clamped into [kProbEps, 1 - kProbEps] before any log, so
// likelihood ratios stay finite even for curves that touch 0 or 1.
inline constexpr double kProbEps = 1e-12;

// Two hypothesis curves must differ by more than this at every arm price;
// observations at a price where they coincide carry no information.
inline constexpr double kInformativenessTol = 1e-6;

enum class DemandKind { linear, logistic, tabulated };

// A price -> acceptance-probability curve.
//   linear:    c0 + c1 * p
//   logistic:  1 / (1 + exp(c0 + c1 * p))
//   tabulated: linear interpolation between sorted knots, clamped to the end
//              knots outside their range
struct DemandModel {
    DemandKind kind = DemandKind::linear;
    double c0 = 0.0;
    double c1 = 0.0;
    std::vector<std::pair<double, double>> knots;

    static DemandModel linear(double intercept, double slope);
    static DemandModel logistic(double c0, double c1);
    static DemandModel tabulated(std::vector<std::pair<double, double>> knots);
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

// Curve value before clamping; validation uses it to report clamped entries.
double eval_raw(const DemandModel& model, double p);

// Acceptance probability at price p, clamped into [kProbEps, 1 - kProbEps].
double eval(const DemandModel& model, double p);

// Expected per-step revenue p * rho(p).
double revenue(const DemandModel& model, double p);

// Maximizer of expected revenue over the interval: dense grid scan plus
// golden-section refinement on the bracketing cells; exact ties resolve to
// the lowest price. Returns {p*, r(p*)}.
std::pair<double, double> optimal_price(const DemandModel& model, Interval interval,
                                        const GridConfig& grid = {});

// Hypothesis set with its derived quantities: per-model optimal prices
// ("arms"), revenues at those prices, and prob_matrix[i][k] = rho_i(p_k*).
struct Scenario {
    std::vector<DemandModel> models;
    Interval interval;
    GridConfig grid;
    std::vector<double> optimal_prices;
    std::vector<double> revenue_at_optimal;
    std::vector<std::vector<double>> prob_matrix;
    std::optional<int> true_model_index;

    int n_models() const { return static_cast<int>(models.size()); }
};

Scenario make_scenario(std::vector<DemandModel> models, Interval interval,
                       GridConfig grid = {},
                       std::optional<int> true_model = std::nullopt);

struct ValidationReport {
    struct Violation {  // |rho_i(p_k*) - rho_j(p_k*)| <= tolerance
        int k = 0;
        int i = 0;
        int j = 0;
        double gap = 0.0;
    };
    struct ClampNote {  // prob_matrix entry moved off its raw curve value
        int model = 0;
        int arm = 0;
        double raw = 0.0;
    };
    bool valid = true;
    std::vector<Violation> violations;
    std::vector<int> boundary_arms;  // p_k* sitting on an interval endpoint
    std::vector<ClampNote> clamped;
};

// Informativeness check over all ordered model pairs at every arm price,
// plus boundary and clamping notes. Violations fail the report; boundary and
// clamping are warnings only.
ValidationReport validate_scenario(const Scenario& scenario);

}  // namespace pricesim
