#include "pricesim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pricesim {

namespace {

bool is_likelihood_kind(PolicyKind k) {
    return k == PolicyKind::lrt || k == PolicyKind::xlrt || k == PolicyKind::elrt ||
           k == PolicyKind::exlrt;
}

bool is_bayesian_kind(PolicyKind k) {
    return k == PolicyKind::mbp || k == PolicyKind::cmbp;
}

bool needs_full_curves(PolicyKind k) {
    return k == PolicyKind::xlrt || k == PolicyKind::exlrt || is_bayesian_kind(k);
}

bool is_two_model_kind(PolicyKind k) {
    return k == PolicyKind::lrt || k == PolicyKind::xlrt || is_bayesian_kind(k);
}

}  // namespace

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::lrt: return "lrt";
        case PolicyKind::xlrt: return "xlrt";
        case PolicyKind::elrt: return "elrt";
        case PolicyKind::exlrt: return "exlrt";
        case PolicyKind::mbp: return "mbp";
        case PolicyKind::cmbp: return "cmbp";
        case PolicyKind::oracle: return "oracle";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "lrt") return PolicyKind::lrt;
    if (name == "xlrt") return PolicyKind::xlrt;
    if (name == "elrt") return PolicyKind::elrt;
    if (name == "exlrt") return PolicyKind::exlrt;
    if (name == "mbp") return PolicyKind::mbp;
    if (name == "cmbp") return PolicyKind::cmbp;
    if (name == "oracle") return PolicyKind::oracle;
    throw std::invalid_argument("unknown policy kind '" + name + "'");
}

PolicyKnowledge PolicyKnowledge::matrix_only(const Scenario& scenario) {
    PolicyKnowledge k;
    k.mode = KnowledgeMode::matrix_only;
    k.optimal_prices = scenario.optimal_prices;
    k.prob_matrix = scenario.prob_matrix;
    k.grid = scenario.grid;
    return k;
}

PolicyKnowledge PolicyKnowledge::full_curves(const Scenario& scenario) {
    PolicyKnowledge k;
    k.mode = KnowledgeMode::full_curves;
    k.models = scenario.models;
    k.interval = scenario.interval;
    k.grid = scenario.grid;
    return k;
}

std::vector<int> argmax_set(const std::vector<double>& values) {
    std::vector<int> out;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > best) {
            best = values[i];
            out.clear();
            out.push_back(i);
        } else if (values[i] == best) {
            out.push_back(i);
        }
    }
    return out;
}

namespace {

// min of the three KL terms in the threshold condition for the ordered pair
// (d1, d2): divergence of d1's observations from d2's at p_{d1}*, at the
// pair's exploration price, and at p_{d2}*.
double threshold_bound_for_pair(const std::vector<DemandModel>& models,
                                const std::vector<double>& arm_prices, int d1, int d2,
                                double px) {
    const auto term = [&](double p) {
        return kl_bernoulli(eval(models[d1], p), eval(models[d2], p));
    };
    return std::min({term(arm_prices[d1]), term(px), term(arm_prices[d2])});
}

}  // namespace

Thresholds default_thresholds(const Scenario& scenario, double kappa,
                              ExplorationMetric metric) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("kappa must lie in (0, 1)");
    const int n = scenario.n_models();
    Thresholds th;
    th.eta_pair.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int h = i + 1; h < n; ++h) {
            const double px = exploration_price(scenario.models[i], scenario.models[h],
                                                scenario.interval, scenario.grid, metric);
            th.eta_pair[i][h] = kappa * threshold_bound_for_pair(
                                            scenario.models, scenario.optimal_prices, i, h, px);
            th.eta_pair[h][i] = kappa * threshold_bound_for_pair(
                                            scenario.models, scenario.optimal_prices, h, i, px);
        }
    if (n == 2) {
        th.eta1 = th.eta_pair[1][0];
        th.eta0 = th.eta_pair[0][1];
    }
    return th;
}

PolicyEngine::PolicyEngine(PolicySpec spec, PolicyKnowledge knowledge,
                           std::optional<Thresholds> thresholds,
                           std::optional<int> oracle_model)
    : spec_(spec), mode_(knowledge.mode), grid_(knowledge.grid) {
    if (needs_full_curves(spec_.kind) && mode_ != KnowledgeMode::full_curves)
        throw std::invalid_argument(std::string(to_string(spec_.kind)) +
                                    ": full curves required");

    if (mode_ == KnowledgeMode::full_curves) {
        models_ = std::move(knowledge.models);
        interval_ = knowledge.interval;
        n_ = static_cast<int>(models_.size());
        if (n_ < 2) throw std::invalid_argument("policy needs at least 2 models");
        arm_prices_.reserve(n_);
        for (const DemandModel& m : models_)
            arm_prices_.push_back(optimal_price(m, interval_, grid_).first);
        prob_matrix_.assign(n_, std::vector<double>(n_, 0.0));
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k)
                prob_matrix_[i][k] = eval(models_[i], arm_prices_[k]);
    } else {
        arm_prices_ = std::move(knowledge.optimal_prices);
        prob_matrix_ = std::move(knowledge.prob_matrix);
        n_ = static_cast<int>(prob_matrix_.size());
        if (n_ < 2 || arm_prices_.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("matrix knowledge needs N >= 2 arm prices and "
                                        "an N x N probability matrix");
        for (const auto& row : prob_matrix_)
            if (row.size() != static_cast<std::size_t>(n_))
                throw std::invalid_argument("probability matrix must be square");
    }

    if (is_two_model_kind(spec_.kind) && n_ != 2)
        throw std::invalid_argument(std::string(to_string(spec_.kind)) +
                                    " handles exactly 2 models");

    if (spec_.kind == PolicyKind::oracle) {
        if (!oracle_model)
            throw std::invalid_argument("oracle policy needs the true model index");
        if (*oracle_model < 0 || *oracle_model >= n_)
            throw std::invalid_argument("oracle model index out of range");
        oracle_index_ = *oracle_model;
    }

    // Exploration prices for the kinds that can leave the arm set.
    if (spec_.kind == PolicyKind::xlrt || spec_.kind == PolicyKind::exlrt) {
        px_.assign(n_, std::vector<double>(n_, 0.0));
        for (int i = 0; i < n_; ++i)
            for (int h = i + 1; h < n_; ++h) {
                const double p = exploration_price(models_[i], models_[h], interval_,
                                                   grid_, spec_.metric);
                px_[i][h] = p;
                px_[h][i] = p;
            }
        resolve_thresholds(thresholds);
    }

    if (is_likelihood_kind(spec_.kind)) build_likelihood_tables();
    if (is_bayesian_kind(spec_.kind)) build_bayesian_grid();
}

double PolicyEngine::exploration_price_for(int i, int h) const {
    if (px_.empty()) throw std::logic_error("no exploration prices for this policy kind");
    if (i < 0 || h < 0 || i >= n_ || h >= n_ || i == h)
        throw std::invalid_argument("bad model pair");
    return px_[i][h];
}

double PolicyEngine::pair_threshold_bound(int d1, int d2) const {
    return threshold_bound_for_pair(models_, arm_prices_, d1, d2, px_[d1][d2]);
}

void PolicyEngine::resolve_thresholds(const std::optional<Thresholds>& explicit_thresholds) {
    if (explicit_thresholds) {
        thresholds_ = *explicit_thresholds;
        if (thresholds_.eta_pair.empty() && n_ == 2) {
            thresholds_.eta_pair.assign(2, std::vector<double>(2, 0.0));
            thresholds_.eta_pair[1][0] = thresholds_.eta1;
            thresholds_.eta_pair[0][1] = thresholds_.eta0;
        }
    } else if (spec_.eta0.has_value() || spec_.eta1.has_value()) {
        if (!(spec_.eta0.has_value() && spec_.eta1.has_value()))
            throw std::invalid_argument("explicit thresholds need both eta0 and eta1");
        thresholds_.eta0 = *spec_.eta0;
        thresholds_.eta1 = *spec_.eta1;
        thresholds_.eta_pair.assign(2, std::vector<double>(2, 0.0));
        thresholds_.eta_pair[1][0] = thresholds_.eta1;
        thresholds_.eta_pair[0][1] = thresholds_.eta0;
    } else {
        thresholds_.eta_pair.assign(n_, std::vector<double>(n_, 0.0));
        for (int i = 0; i < n_; ++i)
            for (int h = 0; h < n_; ++h)
                if (i != h)
                    thresholds_.eta_pair[i][h] = spec_.kappa * pair_threshold_bound(i, h);
        if (n_ == 2) {
            thresholds_.eta1 = thresholds_.eta_pair[1][0];
            thresholds_.eta0 = thresholds_.eta_pair[0][1];
        }
        return;  // kappa in (0,1) keeps defaults strictly below their bounds
    }

    if (static_cast<int>(thresholds_.eta_pair.size()) != n_)
        throw std::invalid_argument("threshold pair matrix must be N x N");
    for (int i = 0; i < n_; ++i)
        for (int h = 0; h < n_; ++h) {
            if (i == h) continue;
            const double eta = thresholds_.eta_pair[i][h];
            const double bound = pair_threshold_bound(i, h);
            if (eta < 0.0)
                throw std::invalid_argument("threshold for pair (" + std::to_string(i) +
                                            "," + std::to_string(h) + ") is negative");
            if (!(eta < bound))
                throw std::invalid_argument(
                    "threshold " + std::to_string(eta) + " for pair (" + std::to_string(i) +
                    "," + std::to_string(h) + ") violates the bound: must be < " +
                    std::to_string(bound) + " (minimum KL term of its condition)");
        }
}

void PolicyEngine::build_likelihood_tables() {
    known_prices_ = arm_prices_;
    if (spec_.kind == PolicyKind::xlrt || spec_.kind == PolicyKind::exlrt)
        for (int i = 0; i < n_; ++i)
            for (int h = i + 1; h < n_; ++h) {
                const double p = px_[i][h];
                if (std::find(known_prices_.begin(), known_prices_.end(), p) ==
                    known_prices_.end())
                    known_prices_.push_back(p);
            }

    loglik_.assign(known_prices_.size(), std::vector<std::array<double, 2>>(n_));
    for (std::size_t j = 0; j < known_prices_.size(); ++j)
        for (int i = 0; i < n_; ++i) {
            // At arm prices the matrix is the source of truth so matrix-only
            // and full-curve knowledge produce identical likelihoods.
            double rho;
            if (j < static_cast<std::size_t>(n_)) rho = prob_matrix_[i][j];
            else rho = eval(models_[i], known_prices_[j]);
            loglik_[j][i][0] = std::log(1.0 - rho);
            loglik_[j][i][1] = std::log(rho);
        }
}

void PolicyEngine::build_bayesian_grid() {
    const int n = grid_.points;
    const double span = interval_.hi - interval_.lo;
    grid_prices_.resize(n);
    grid_r0_.resize(n);
    grid_r1_.resize(n);
    allowed_.clear();
    for (int j = 0; j < n; ++j) {
        const double p =
            (j == n - 1) ? interval_.hi : interval_.lo + span * j / (n - 1);
        const double rho0 = eval(models_[0], p);
        const double rho1 = eval(models_[1], p);
        grid_prices_[j] = p;
        grid_r0_[j] = p * rho0;
        grid_r1_[j] = p * rho1;
        if (std::abs(rho0 - rho1) > spec_.delta) allowed_.push_back(j);
    }
    if (spec_.kind == PolicyKind::cmbp && allowed_.empty())
        throw std::invalid_argument(
            "cmbp: no grid price separates the models by more than delta = " +
            std::to_string(spec_.delta));
}

PolicyState policy_init(const PolicyEngine& engine, Rng& rng) {
    PolicyState st;
    st.engine = &engine;
    st.rng = &rng;
    st.cum_loglik.assign(engine.n_models(), 0.0);
    st.q = engine.spec().q0;
    return st;
}

namespace {

// d1 = argmax Lambda (ties uniform), d2 = argmax of the rest (ties uniform).
std::pair<int, int> top_two(const std::vector<double>& lam, Rng& rng) {
    const std::vector<int> first = argmax_set(lam);
    const int d1 = first.size() == 1
                       ? first[0]
                       : first[static_cast<int>(rng.uniform_index(first.size()))];
    std::vector<int> rest;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(lam.size()); ++i) {
        if (i == d1) continue;
        if (lam[i] > best) {
            best = lam[i];
            rest.clear();
            rest.push_back(i);
        } else if (lam[i] == best) {
            rest.push_back(i);
        }
    }
    const int d2 = rest.size() == 1
                       ? rest[0]
                       : rest[static_cast<int>(rng.uniform_index(rest.size()))];
    return {d1, d2};
}

}  // namespace

double choose_price(PolicyState& state, int t) {
    const PolicyEngine& e = *state.engine;
    if (t < 1) throw std::invalid_argument("steps are 1-based");

    switch (e.spec_.kind) {
        case PolicyKind::oracle:
            return e.arm_prices_[e.oracle_index_];

        case PolicyKind::mbp:
        case PolicyKind::cmbp: {
            // Myopic Bayes: maximize q r_1(p) + (1-q) r_0(p) on the grid,
            // cmbp restricted to the delta-discriminative prices. Strict >
            // keeps the lowest maximizer.
            const double q = state.q;
            double best_v = -std::numeric_limits<double>::infinity();
            int best_j = 0;
            if (e.spec_.kind == PolicyKind::mbp) {
                for (int j = 0; j < static_cast<int>(e.grid_prices_.size()); ++j) {
                    const double v = q * e.grid_r1_[j] + (1.0 - q) * e.grid_r0_[j];
                    if (v > best_v) {
                        best_v = v;
                        best_j = j;
                    }
                }
            } else {
                best_j = e.allowed_.front();
                for (const int j : e.allowed_) {
                    const double v = q * e.grid_r1_[j] + (1.0 - q) * e.grid_r0_[j];
                    if (v > best_v) {
                        best_v = v;
                        best_j = j;
                    }
                }
            }
            return e.grid_prices_[best_j];
        }

        default:
            break;  // likelihood kinds below
    }

    // First step: uniform draw among the arm prices.
    if (state.t_obs == 0)
        return e.arm_prices_[state.rng->uniform_index(e.arm_prices_.size())];

    switch (e.spec_.kind) {
        case PolicyKind::lrt: {
            const double diff = state.cum_loglik[1] - state.cum_loglik[0];
            if (diff > 0.0) return e.arm_prices_[1];
            if (diff < 0.0) return e.arm_prices_[0];
            return e.arm_prices_[state.rng->bernoulli(0.5) ? 1 : 0];  // exact tie
        }
        case PolicyKind::xlrt: {
            const double lbar =
                (state.cum_loglik[1] - state.cum_loglik[0]) / state.t_obs;
            if (lbar < -e.thresholds_.eta0) return e.arm_prices_[0];
            if (lbar <= e.thresholds_.eta1) return e.px_[0][1];
            return e.arm_prices_[1];
        }
        case PolicyKind::elrt: {
            const std::vector<int> best = argmax_set(state.cum_loglik);
            const int k = best.size() == 1
                              ? best[0]
                              : best[static_cast<int>(state.rng->uniform_index(best.size()))];
            return e.arm_prices_[k];
        }
        case PolicyKind::exlrt: {
            const auto [d1, d2] = top_two(state.cum_loglik, *state.rng);
            const double lbar =
                (state.cum_loglik[d1] - state.cum_loglik[d2]) / state.t_obs;
            if (lbar > e.thresholds_.eta_pair[d1][d2]) return e.arm_prices_[d1];
            return e.px_[d1][d2];
        }
        default:
            throw std::logic_error("unhandled policy kind");
    }
}

void observe(PolicyState& state, double price, int outcome) {
    const PolicyEngine& e = *state.engine;
    if (outcome != 0 && outcome != 1)
        throw std::invalid_argument("outcome must be 0 or 1");

    if (is_likelihood_kind(e.spec_.kind)) {
        const auto it = std::find(e.known_prices_.begin(), e.known_prices_.end(), price);
        if (it == e.known_prices_.end())
            throw std::invalid_argument("unknown price " + std::to_string(price) +
                                        ": not in this policy's likelihood table");
        const auto& table = e.loglik_[it - e.known_prices_.begin()];
        for (int i = 0; i < e.n_; ++i) state.cum_loglik[i] += table[i][outcome];
    } else if (is_bayesian_kind(e.spec_.kind)) {
        const double rho0 = eval(e.models_[0], price);
        const double rho1 = eval(e.models_[1], price);
        // At an uninformative price the posterior equals the prior; skipping
        // the division keeps that identity exact in floating point.
        if (rho0 != rho1) {
            const double f1 = outcome ? rho1 : 1.0 - rho1;
            const double f0 = outcome ? rho0 : 1.0 - rho0;
            const double num = state.q * f1;
            state.q = num / (num + (1.0 - state.q) * f0);
        }
    }
    ++state.t_obs;
}

}  // namespace pricesim
