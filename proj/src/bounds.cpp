#include "pricesim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pricesim/info.hpp"

namespace pricesim {

namespace {

void require_valid(const Scenario& scenario, int true_index) {
    if (true_index < 0 || true_index >= scenario.n_models())
        throw std::invalid_argument("true model index out of range");
    if (!validate_scenario(scenario).valid)
        throw std::invalid_argument(
            "scenario failed informativeness validation; bound constants are "
            "undefined for it");
}

// Shared core: constants per competitor over the policy's price set, with a
// per-competitor threshold subtracted from the KL margin.
BoundReport make_report(const Scenario& scenario, int true_index,
                        std::vector<double> prices,
                        const std::vector<double>& eta_of_h) {
    const int n = scenario.n_models();
    const DemandModel& truth = scenario.models[true_index];

    BoundReport rep;
    rep.true_index = true_index;
    rep.price_set = std::move(prices);

    double max_c = 0.0, sum_c = 0.0;
    for (int h = 0; h < n; ++h) {
        if (h == true_index) continue;
        BoundReport::Competitor comp;
        comp.h = h;
        comp.a = std::numeric_limits<double>::infinity();
        comp.m = std::numeric_limits<double>::infinity();
        comp.M = -std::numeric_limits<double>::infinity();
        for (const double p : rep.price_set) {
            const double ai = eval(truth, p);
            const double bh = eval(scenario.models[h], p);
            const double kl = kl_bernoulli(ai, bh);
            if (kl < comp.a) {
                comp.a = kl;
                comp.worst_price = p;
            }
            const double z1 = std::log(ai / bh);
            const double z0 = std::log((1.0 - ai) / (1.0 - bh));
            comp.m = std::min({comp.m, z0, z1});
            comp.M = std::max({comp.M, z0, z1});
        }
        comp.a -= eta_of_h[h];
        if (!(comp.a > 0.0))
            throw std::invalid_argument(
                "threshold eats the whole KL margin against competitor " +
                std::to_string(h) + " (a = " + std::to_string(comp.a) + " <= 0)");
        comp.C = (comp.M - comp.m) * (comp.M - comp.m) / (2.0 * comp.a * comp.a);
        max_c = std::max(max_c, comp.C);
        sum_c += comp.C;
        rep.per_h.push_back(comp);
    }

    rep.total_pull_cap = n == 2 ? max_c : (n - 1) * max_c;
    rep.sum_pull_cap = sum_c;

    // Worst per-step revenue loss across the non-optimal prices.
    const double r_star = scenario.revenue_at_optimal[true_index];
    const double p_star = scenario.optimal_prices[true_index];
    double worst_gap = 0.0;
    for (const double p : rep.price_set)
        if (p != p_star) worst_gap = std::max(worst_gap, r_star - revenue(truth, p));
    rep.regret_cap = rep.total_pull_cap * worst_gap;
    return rep;
}

}  // namespace

BoundReport lrt_bound(const Scenario& scenario, int true_index) {
    require_valid(scenario, true_index);
    if (scenario.n_models() != 2)
        throw std::invalid_argument("lrt bound is defined for exactly 2 models");
    return make_report(scenario, true_index, scenario.optimal_prices,
                       std::vector<double>(2, 0.0));
}

BoundReport xlrt_bound(const Scenario& scenario, int true_index,
                       const Thresholds& thresholds, ExplorationMetric metric) {
    require_valid(scenario, true_index);
    if (scenario.n_models() != 2)
        throw std::invalid_argument("xlrt bound is defined for exactly 2 models");
    const double px = exploration_price(scenario.models[0], scenario.models[1],
                                        scenario.interval, scenario.grid, metric);
    const double eta = true_index == 1 ? thresholds.eta1 : thresholds.eta0;
    std::vector<double> etas(2, 0.0);
    etas[1 - true_index] = eta;
    return make_report(scenario, true_index,
                       {scenario.optimal_prices[0], px, scenario.optimal_prices[1]},
                       etas);
}

BoundReport elrt_bound(const Scenario& scenario, int true_index) {
    require_valid(scenario, true_index);
    return make_report(scenario, true_index, scenario.optimal_prices,
                       std::vector<double>(scenario.n_models(), 0.0));
}

}  // namespace pricesim
