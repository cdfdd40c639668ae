#include "pricesim/cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "pricesim/bounds.hpp"
#include "pricesim/config.hpp"
#include "pricesim/info.hpp"
#include "pricesim/sim.hpp"

namespace pricesim {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

ExperimentConfig load_with_overrides(const std::string& path,
                                     const CliOverrides& overrides) {
    ExperimentConfig cfg = load_config(path);
    if (overrides.seed) cfg.base_seed = *overrides.seed;
    if (overrides.workers) {
        if (*overrides.workers < 1) throw ConfigError("--workers: must be >= 1");
        cfg.workers = *overrides.workers;
    }
    return cfg;
}

Scenario scenario_from(const ExperimentConfig& cfg) {
    GridConfig grid;
    grid.points = cfg.grid_points;
    return make_scenario(cfg.models, cfg.interval, grid, cfg.true_model);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Writes to the given path, or to stdout when the path is empty.
int emit_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return kExitIo;
    }
    out << text;
    out.flush();
    if (!out) {
        std::cerr << "error: failed while writing '" << path << "'\n";
        return kExitIo;
    }
    return kExitOk;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfig;
    }
}

void append_bound_rows(std::ostringstream& out, const char* kind,
                       const BoundReport& rep) {
    for (const auto& comp : rep.per_h)
        out << kind << '\t' << rep.true_index << '\t' << comp.h << '\t' << fmt(comp.a)
            << '\t' << fmt(comp.m) << '\t' << fmt(comp.M) << '\t' << fmt(comp.C) << '\t'
            << fmt(rep.total_pull_cap) << '\t' << fmt(rep.sum_pull_cap) << '\t'
            << fmt(rep.regret_cap) << '\n';
}

}  // namespace

int cmd_run(const std::string& config_path, const CliOverrides& overrides) {
    return run_guarded([&]() -> int {
        const ExperimentConfig cfg = load_with_overrides(config_path, overrides);
        const Scenario scenario = scenario_from(cfg);
        const ExperimentResult result =
            run_monte_carlo(scenario, cfg.policies, cfg.horizon, cfg.replications,
                            cfg.base_seed, cfg.workers, cfg.checkpoints,
                            &cfg.policy_labels);

        std::cout << "policy      true_model  final_mean_regret  mean_nonoptimal_pulls\n";
        for (const ExperimentCell& cell : result.cells) {
            char line[160];
            std::snprintf(line, sizeof(line), "%-10s  %10d  %17s  %21s\n",
                          cell.policy.c_str(), cell.true_model,
                          fmt(cell.mean_regret.back()).c_str(),
                          fmt(cell.mean_nonoptimal_pulls).c_str());
            std::cout << line;
        }

        const std::string out_path = overrides.out.value_or(cfg.csv_path);
        if (out_path.empty())
            throw ConfigError("output.csv: no CSV path configured (or pass --out)");
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot write '" + out_path + "'");
        write_csv(result, out);
        out.flush();
        if (!out) throw IoError("failed while writing '" + out_path + "'");
        std::cout << "wrote " << out_path << "\n";
        return kExitOk;
    });
}

int cmd_bounds(const std::string& config_path, const CliOverrides& overrides) {
    return run_guarded([&]() -> int {
        const ExperimentConfig cfg = load_with_overrides(config_path, overrides);
        const Scenario scenario = scenario_from(cfg);

        std::vector<int> true_models;
        if (cfg.true_model) true_models.push_back(*cfg.true_model);
        else
            for (int m = 0; m < scenario.n_models(); ++m) true_models.push_back(m);

        std::ostringstream table;
        table << "bound\ttrue_model\tcompetitor\ta\tm\tM\tC\ttotal_pull_cap\t"
                 "sum_pull_cap\tregret_cap\n";
        const char* base_kind = scenario.n_models() == 2 ? "lrt" : "elrt";
        for (const int i : true_models)
            append_bound_rows(table, base_kind, elrt_bound(scenario, i));
        for (const PolicySpec& spec : cfg.policies) {
            if (spec.kind != PolicyKind::xlrt) continue;
            Thresholds th;
            if (spec.eta0 && spec.eta1) {
                th.eta0 = *spec.eta0;
                th.eta1 = *spec.eta1;
            } else {
                th = default_thresholds(scenario, spec.kappa, spec.metric);
            }
            for (const int i : true_models)
                append_bound_rows(table, "xlrt", xlrt_bound(scenario, i, th, spec.metric));
            break;  // one xlrt row set is enough
        }

        const std::string out_path = overrides.out.value_or(cfg.bounds_path);
        return emit_text(table.str(), out_path);
    });
}

int cmd_chernoff(const std::string& config_path, int i, int h,
                 const CliOverrides& overrides) {
    return run_guarded([&]() -> int {
        const ExperimentConfig cfg = load_with_overrides(config_path, overrides);
        const int n = static_cast<int>(cfg.models.size());
        if (i < 0 || i >= n || h < 0 || h >= n || i == h)
            throw ConfigError("--pair: indices must be distinct and inside [0, " +
                              std::to_string(n - 1) + "]");
        GridConfig grid;
        grid.points = cfg.grid_points;

        const double px = exploration_price(cfg.models[i], cfg.models[h], cfg.interval,
                                            grid, ExplorationMetric::chernoff);
        const ChernoffResult ch =
            chernoff_bernoulli(eval(cfg.models[i], px), eval(cfg.models[h], px));
        const double px_h = exploration_price(cfg.models[i], cfg.models[h], cfg.interval,
                                              grid, ExplorationMetric::harmonic);
        const double hv =
            chernoff_harmonic_approx(eval(cfg.models[i], px_h), eval(cfg.models[h], px_h));

        std::ostringstream out;
        out << "pair (" << i << ", " << h << ")\n"
            << "exploration price (chernoff): " << fmt(px) << "\n"
            << "chernoff distance: " << fmt(ch.distance) << "  t*: " << fmt(ch.t_star)
            << "\n"
            << "exploration price (harmonic): " << fmt(px_h) << "\n"
            << "harmonic divergence: " << fmt(hv) << "\n";
        return emit_text(out.str(), overrides.out.value_or(""));
    });
}

int cmd_validate(const std::string& config_path, const CliOverrides& overrides) {
    return run_guarded([&]() -> int {
        const ExperimentConfig cfg = load_with_overrides(config_path, overrides);
        const Scenario scenario = scenario_from(cfg);
        const ValidationReport rep = validate_scenario(scenario);

        std::ostringstream out;
        out << (rep.valid ? "valid" : "invalid") << "\n";
        out << "arms:";
        for (int k = 0; k < scenario.n_models(); ++k)
            out << " p" << k << "*=" << fmt(scenario.optimal_prices[k]);
        out << "\n";
        for (const auto& v : rep.violations)
            out << "violation: models " << v.i << " and " << v.j
                << " indistinguishable at arm " << v.k << " (gap " << fmt(v.gap)
                << ")\n";
        for (const int k : rep.boundary_arms)
            out << "warning: arm " << k << " sits on the interval boundary\n";
        for (const auto& c : rep.clamped)
            out << "note: model " << c.model << " at arm " << c.arm
                << " clamped (raw value " << fmt(c.raw) << ")\n";

        const int status = emit_text(out.str(), overrides.out.value_or(""));
        if (status != kExitOk) return status;
        return rep.valid ? kExitOk : kExitConfig;
    });
}

}  // namespace pricesim
