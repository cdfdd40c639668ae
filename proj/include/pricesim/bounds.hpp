#pragma once

#include "pricesim/demand.hpp"
#include "pricesim/policies.hpp"

namespace pricesim {

// Constants of the Hoeffding argument that caps expected non-optimal pulls.
// For the true model i and a competitor h: a_h is the smallest KL divergence
// from i to h over the prices the policy can emit, minus the decision
// threshold; [m_h, M_h] spans the per-outcome log-likelihood ratios
// log(f_i / f_h) over those prices; and C_h = (M_h - m_h)^2 / (2 a_h^2)
// bounds the expected number of pulls spent before h is ruled out, via
// Pr{(1/t) sum Z_j < eta} <= exp(-t / C_h) summed over t.
struct BoundReport {
    struct Competitor {
        int h = 0;
        double a = 0.0;
        double m = 0.0;
        double M = 0.0;
        double C = 0.0;
        double worst_price = 0.0;  // price attaining the minimum KL
    };
    int true_index = 0;
    std::vector<double> price_set;  // prices the policy can emit
    std::vector<Competitor> per_h;
    double total_pull_cap = 0.0;  // C for two models, else (N-1) * max_h C_h
    double sum_pull_cap = 0.0;    // sum_h C_h, the tighter intermediate form
    double regret_cap = 0.0;      // total_pull_cap * worst per-step revenue gap
};

// Two models, price set {p_0*, p_1*}, threshold 0.
BoundReport lrt_bound(const Scenario& scenario, int true_index);

// Two models, price set {p_0*, p_x, p_1*}; a is reduced by eta1 when the
// true model is 1 and by eta0 when it is 0. Throws when the threshold eats
// the whole KL margin (a <= 0).
BoundReport xlrt_bound(const Scenario& scenario, int true_index,
                       const Thresholds& thresholds,
                       ExplorationMetric metric = ExplorationMetric::chernoff);

// N models, price set = all arm prices, threshold 0 per competitor. With two
// models this reduces exactly to lrt_bound.
BoundReport elrt_bound(const Scenario& scenario, int true_index);

}  // namespace pricesim
