#include "pricesim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace pricesim {

namespace {

bool needs_full_curves(PolicyKind k) {
    return k == PolicyKind::xlrt || k == PolicyKind::exlrt || k == PolicyKind::mbp ||
           k == PolicyKind::cmbp;
}

bool is_likelihood_kind(PolicyKind k) {
    return k == PolicyKind::lrt || k == PolicyKind::xlrt || k == PolicyKind::elrt ||
           k == PolicyKind::exlrt;
}

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, const PolicyEngine& engine,
                          int horizon, std::uint64_t seed) {
    if (!scenario.true_model_index)
        throw std::invalid_argument("scenario has no true model to simulate");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");

    const int truth = *scenario.true_model_index;
    const DemandModel& true_model = scenario.models[truth];
    const double p_star = scenario.optimal_prices[truth];
    const double r_star = scenario.revenue_at_optimal[truth];

    Rng env(derive_seed(seed, 1));
    Rng pol(derive_seed(seed, 2));
    PolicyState state = policy_init(engine, pol);

    EpisodeResult res;
    res.seed = seed;
    res.prices.reserve(horizon);
    res.outcomes.reserve(horizon);
    res.pseudo_regret.reserve(horizon);
    double cum = 0.0;
    for (int t = 1; t <= horizon; ++t) {
        const double p = choose_price(state, t);
        const double rho = eval(true_model, p);
        const int o = env.bernoulli(rho) ? 1 : 0;
        observe(state, p, o);

        cum += r_star - p * rho;
        res.prices.push_back(p);
        res.outcomes.push_back(static_cast<std::uint8_t>(o));
        res.pseudo_regret.push_back(cum);
        if (o) res.realized_revenue += p;
        if (p != p_star) ++res.nonoptimal_pulls;
    }
    return res;
}

EpisodeResult run_episode(const Scenario& scenario, const PolicySpec& spec,
                          int horizon, std::uint64_t seed) {
    const PolicyKnowledge knowledge = needs_full_curves(spec.kind)
                                          ? PolicyKnowledge::full_curves(scenario)
                                          : PolicyKnowledge::matrix_only(scenario);
    const std::optional<int> oracle = spec.kind == PolicyKind::oracle
                                          ? scenario.true_model_index
                                          : std::nullopt;
    const PolicyEngine engine(spec, knowledge, std::nullopt, oracle);
    return run_episode(scenario, engine, horizon, seed);
}

std::vector<std::pair<int, double>> regret_trajectory(const EpisodeResult& episode,
                                                      const std::vector<int>& checkpoints) {
    std::vector<std::pair<int, double>> out;
    out.reserve(checkpoints.size());
    for (const int t : checkpoints) {
        if (t < 1 || t > static_cast<int>(episode.pseudo_regret.size()))
            throw std::invalid_argument("checkpoint outside the episode horizon");
        out.emplace_back(t, episode.pseudo_regret[t - 1]);
    }
    return out;
}

std::vector<int> default_checkpoints(int horizon) {
    std::vector<int> cps;
    for (int t = 1; t <= std::min(horizon, 100); ++t) cps.push_back(t);
    if (horizon > 100) {
        const int kLogPoints = 50;
        for (int k = 1; k <= kLogPoints; ++k) {
            const double x =
                100.0 * std::pow(horizon / 100.0, static_cast<double>(k) / kLogPoints);
            cps.push_back(static_cast<int>(std::llround(x)));
        }
        cps.push_back(horizon);
        std::sort(cps.begin(), cps.end());
        cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
        while (!cps.empty() && cps.back() > horizon) cps.pop_back();
    }
    return cps;
}

ExperimentResult run_monte_carlo(const Scenario& scenario,
                                 const std::vector<PolicySpec>& specs, int horizon,
                                 int replications, std::uint64_t base_seed, int workers,
                                 std::vector<int> checkpoints,
                                 const std::vector<std::string>* labels) {
    if (specs.empty()) throw std::invalid_argument("no policies to run");
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (labels && labels->size() != specs.size())
        throw std::invalid_argument("one label per policy required");

    if (checkpoints.empty()) checkpoints = default_checkpoints(horizon);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                      checkpoints.end());
    for (const int t : checkpoints)
        if (t < 1 || t > horizon)
            throw std::invalid_argument("checkpoint " + std::to_string(t) +
                                        " outside [1, horizon]");

    const ValidationReport report = validate_scenario(scenario);
    if (!report.valid)
        for (const PolicySpec& s : specs)
            if (is_likelihood_kind(s.kind))
                throw std::invalid_argument(
                    "scenario failed informativeness validation; refusing to run "
                    "likelihood-ratio policies on it");

    std::vector<int> true_models;
    if (scenario.true_model_index) true_models.push_back(*scenario.true_model_index);
    else
        for (int m = 0; m < scenario.n_models(); ++m) true_models.push_back(m);

    // One engine per cell, built up front and shared read-only by the
    // workers. Engines differ across true models only for the oracle, but
    // per-cell construction is cheap next to the episode loop.
    struct Cell {
        int policy_index;
        int true_model;
        std::unique_ptr<PolicyEngine> engine;
        Scenario scenario;
        // Per-replication reductions, indexed [r * C + c] for C checkpoints.
        std::vector<double> regret_at;
        std::vector<long> pulls_at;
        std::vector<long> pulls_final;
        std::vector<double> realized;
    };
    const int n_cp = static_cast<int>(checkpoints.size());
    std::vector<Cell> cells;
    cells.reserve(specs.size() * true_models.size());
    for (int p = 0; p < static_cast<int>(specs.size()); ++p)
        for (const int m : true_models) {
            Cell cell;
            cell.policy_index = p;
            cell.true_model = m;
            cell.scenario = scenario;
            cell.scenario.true_model_index = m;
            const PolicyKnowledge knowledge =
                needs_full_curves(specs[p].kind) ? PolicyKnowledge::full_curves(scenario)
                                                 : PolicyKnowledge::matrix_only(scenario);
            const std::optional<int> oracle =
                specs[p].kind == PolicyKind::oracle ? std::optional<int>(m) : std::nullopt;
            cell.engine = std::make_unique<PolicyEngine>(specs[p], knowledge,
                                                         std::nullopt, oracle);
            cell.regret_at.assign(static_cast<std::size_t>(replications) * n_cp, 0.0);
            cell.pulls_at.assign(static_cast<std::size_t>(replications) * n_cp, 0);
            cell.pulls_final.assign(replications, 0);
            cell.realized.assign(replications, 0.0);
            cells.push_back(std::move(cell));
        }

    // Work unit = one episode, identified by (cell, replication). Workers
    // race for units but write into disjoint index-addressed slots, so the
    // final reduction is order-independent.
    const auto run_unit = [&](Cell& cell, int r) {
        const std::uint64_t seed =
            derive_seed(base_seed, static_cast<std::uint64_t>(cell.policy_index),
                        static_cast<std::uint64_t>(cell.true_model),
                        static_cast<std::uint64_t>(r));
        const EpisodeResult ep = run_episode(cell.scenario, *cell.engine, horizon, seed);
        const double p_star = scenario.optimal_prices[cell.true_model];
        long pulls = 0;
        int c = 0;
        for (int t = 1; t <= horizon && c < n_cp; ++t) {
            if (ep.prices[t - 1] != p_star) ++pulls;
            while (c < n_cp && checkpoints[c] == t) {
                cell.regret_at[static_cast<std::size_t>(r) * n_cp + c] =
                    ep.pseudo_regret[t - 1];
                cell.pulls_at[static_cast<std::size_t>(r) * n_cp + c] = pulls;
                ++c;
            }
        }
        cell.pulls_final[r] = ep.nonoptimal_pulls;
        cell.realized[r] = ep.realized_revenue;
    };

    const long total_units = static_cast<long>(cells.size()) * replications;
    if (workers <= 1) {
        for (long u = 0; u < total_units; ++u)
            run_unit(cells[u / replications], static_cast<int>(u % replications));
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        const int n_threads = std::min<long>(workers, total_units);
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const long u = next.fetch_add(1, std::memory_order_relaxed);
                    if (u >= total_units) return;
                    run_unit(cells[u / replications], static_cast<int>(u % replications));
                }
            });
        for (std::thread& th : pool) th.join();
    }

    ExperimentResult result;
    result.checkpoints = checkpoints;
    result.cells.reserve(cells.size());
    const double z = 1.96;
    for (const Cell& cell : cells) {
        ExperimentCell out;
        out.policy = labels ? (*labels)[cell.policy_index]
                            : to_string(specs[cell.policy_index].kind);
        out.true_model = cell.true_model;
        out.replications = replications;
        out.mean_regret.resize(n_cp);
        out.std_regret.resize(n_cp);
        out.ci_lo.resize(n_cp);
        out.ci_hi.resize(n_cp);
        out.mean_nonoptimal_pulls_at.resize(n_cp);
        for (int c = 0; c < n_cp; ++c) {
            double mean = 0.0, pulls_mean = 0.0;
            for (int r = 0; r < replications; ++r) {
                mean += cell.regret_at[static_cast<std::size_t>(r) * n_cp + c];
                pulls_mean +=
                    static_cast<double>(cell.pulls_at[static_cast<std::size_t>(r) * n_cp + c]);
            }
            mean /= replications;
            pulls_mean /= replications;
            double ss = 0.0;
            for (int r = 0; r < replications; ++r) {
                const double d =
                    cell.regret_at[static_cast<std::size_t>(r) * n_cp + c] - mean;
                ss += d * d;
            }
            const double sd = replications > 1 ? std::sqrt(ss / (replications - 1)) : 0.0;
            const double half = z * sd / std::sqrt(static_cast<double>(replications));
            out.mean_regret[c] = mean;
            out.std_regret[c] = sd;
            out.ci_lo[c] = mean - half;
            out.ci_hi[c] = mean + half;
            out.mean_nonoptimal_pulls_at[c] = pulls_mean;
        }
        double pm = 0.0, rm = 0.0;
        for (int r = 0; r < replications; ++r) {
            pm += static_cast<double>(cell.pulls_final[r]);
            rm += cell.realized[r];
        }
        pm /= replications;
        rm /= replications;
        double pss = 0.0;
        for (int r = 0; r < replications; ++r) {
            const double d = static_cast<double>(cell.pulls_final[r]) - pm;
            pss += d * d;
        }
        out.mean_nonoptimal_pulls = pm;
        out.std_nonoptimal_pulls =
            replications > 1 ? std::sqrt(pss / (replications - 1)) : 0.0;
        out.mean_realized_revenue = rm;
        result.cells.push_back(std::move(out));
    }
    return result;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_csv(const ExperimentResult& result, std::ostream& out) {
    out << "policy,true_model,t,mean_regret,std_regret,ci_lo,ci_hi,"
           "mean_nonoptimal_pulls,replications\n";
    for (const ExperimentCell& cell : result.cells)
        for (std::size_t c = 0; c < result.checkpoints.size(); ++c)
            out << cell.policy << ',' << cell.true_model << ','
                << result.checkpoints[c] << ',' << fmt_double(cell.mean_regret[c]) << ','
                << fmt_double(cell.std_regret[c]) << ',' << fmt_double(cell.ci_lo[c])
                << ',' << fmt_double(cell.ci_hi[c]) << ','
                << fmt_double(cell.mean_nonoptimal_pulls_at[c]) << ','
                << cell.replications << '\n';
}

}  // namespace pricesim
