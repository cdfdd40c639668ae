#include "pricesim/demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pricesim {

DemandModel DemandModel::linear(double intercept, double slope) {
    DemandModel m;
    m.kind = DemandKind::linear;
    m.c0 = intercept;
    m.c1 = slope;
    return m;
}

DemandModel DemandModel::logistic(double c0, double c1) {
    DemandModel m;
    m.kind = DemandKind::logistic;
    m.c0 = c0;
    m.c1 = c1;
    return m;
}

DemandModel DemandModel::tabulated(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2)
        throw std::invalid_argument("tabulated model needs at least 2 knots");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (i > 0 && !(knots[i].first > knots[i - 1].first))
            throw std::invalid_argument(
                "tabulated knots must be strictly increasing in price");
        if (!(knots[i].second >= 0.0 && knots[i].second <= 1.0))
            throw std::invalid_argument(
                "tabulated knot probabilities must lie in [0, 1]");
    }
    DemandModel m;
    m.kind = DemandKind::tabulated;
    m.knots = std::move(knots);
    return m;
}

double eval_raw(const DemandModel& model, double p) {
    switch (model.kind) {
        case DemandKind::linear:
            return model.c0 + model.c1 * p;
        case DemandKind::logistic:
            return 1.0 / (1.0 + std::exp(model.c0 + model.c1 * p));
        case DemandKind::tabulated: {
            const auto& ks = model.knots;
            if (p <= ks.front().first) return ks.front().second;
            if (p >= ks.back().first) return ks.back().second;
            const auto it = std::upper_bound(
                ks.begin(), ks.end(), p,
                [](double v, const std::pair<double, double>& k) { return v < k.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = (p - lo.first) / (hi.first - lo.first);
            return lo.second + w * (hi.second - lo.second);
        }
    }
    return 0.0;  // unreachable
}

double eval(const DemandModel& model, double p) {
    return std::clamp(eval_raw(model, p), kProbEps, 1.0 - kProbEps);
}

double revenue(const DemandModel& model, double p) { return p * eval(model, p); }

std::pair<double, double> optimal_price(const DemandModel& model, Interval interval,
                                        const GridConfig& grid) {
    if (!(interval.lo < interval.hi))
        throw std::invalid_argument("price interval must satisfy lo < hi");
    if (grid.points < 3)
        throw std::invalid_argument("grid needs at least 3 points");
    return maximize_scalar([&](double p) { return revenue(model, p); }, interval.lo,
                           interval.hi, grid);
}

Scenario make_scenario(std::vector<DemandModel> models, Interval interval,
                       GridConfig grid, std::optional<int> true_model) {
    if (models.size() < 2)
        throw std::invalid_argument("scenario needs at least 2 demand models");
    if (!(interval.lo < interval.hi))
        throw std::invalid_argument("price interval must satisfy lo < hi");
    if (grid.points < 3)
        throw std::invalid_argument("grid needs at least 3 points");
    if (true_model && (*true_model < 0 || *true_model >= static_cast<int>(models.size())))
        throw std::invalid_argument("true model index out of range");

    Scenario s;
    s.models = std::move(models);
    s.interval = interval;
    s.grid = grid;
    s.true_model_index = true_model;
    const int n = s.n_models();
    s.optimal_prices.reserve(n);
    s.revenue_at_optimal.reserve(n);
    for (const DemandModel& m : s.models) {
        const auto [p, r] = optimal_price(m, interval, grid);
        s.optimal_prices.push_back(p);
        s.revenue_at_optimal.push_back(r);
    }
    s.prob_matrix.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            s.prob_matrix[i][k] = eval(s.models[i], s.optimal_prices[k]);
    return s;
}

ValidationReport validate_scenario(const Scenario& scenario) {
    ValidationReport rep;
    const int n = scenario.n_models();
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double gap =
                    std::abs(scenario.prob_matrix[i][k] - scenario.prob_matrix[j][k]);
                if (!(gap > kInformativenessTol)) rep.violations.push_back({k, i, j, gap});
            }
    for (int k = 0; k < n; ++k)
        if (scenario.optimal_prices[k] == scenario.interval.lo ||
            scenario.optimal_prices[k] == scenario.interval.hi)
            rep.boundary_arms.push_back(k);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double raw = eval_raw(scenario.models[i], scenario.optimal_prices[k]);
            if (raw != scenario.prob_matrix[i][k]) rep.clamped.push_back({i, k, raw});
        }
    rep.valid = rep.violations.empty();
    return rep;
}

}  // namespace pricesim
