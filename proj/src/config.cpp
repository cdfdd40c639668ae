#include "pricesim/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

namespace pricesim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& prefix,
                         const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + prefix + key + "'");
    }
}

const json& require(const json& obj, const std::string& prefix, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(prefix + key, "missing required key");
    return *it;
}

double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "expected a number, got " + v.dump());
    return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) fail(key, "expected an integer, got " + v.dump());
    return v.get<int>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) fail(key, "expected a string, got " + v.dump());
    return v.get<std::string>();
}

DemandModel parse_model(const json& m, const std::string& prefix) {
    if (!m.is_object()) fail(prefix, "expected an object, got " + m.dump());
    reject_unknown_keys(m, prefix + ".", {"kind", "params"});
    const std::string kind = as_string(require(m, prefix + ".", "kind"), prefix + ".kind");
    const json& params = require(m, prefix + ".", "params");
    const std::string pkey = prefix + ".params";
    if (!params.is_array()) fail(pkey, "expected an array, got " + params.dump());

    if (kind == "linear" || kind == "logistic") {
        if (params.size() != 2) fail(pkey, "expected exactly 2 parameters");
        const double a = as_number(params[0], pkey + "[0]");
        const double b = as_number(params[1], pkey + "[1]");
        return kind == "linear" ? DemandModel::linear(a, b) : DemandModel::logistic(a, b);
    }
    if (kind == "tabulated") {
        std::vector<std::pair<double, double>> knots;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const std::string kkey = pkey + "[" + std::to_string(i) + "]";
            if (!params[i].is_array() || params[i].size() != 2)
                fail(kkey, "expected a [price, probability] pair");
            knots.emplace_back(as_number(params[i][0], kkey + "[0]"),
                               as_number(params[i][1], kkey + "[1]"));
        }
        try {
            return DemandModel::tabulated(std::move(knots));
        } catch (const std::invalid_argument& err) {
            fail(pkey, err.what());
        }
    }
    fail(prefix + ".kind", "expected linear, logistic or tabulated, got '" + kind + "'");
}

PolicySpec parse_policy(const json& p, const std::string& prefix) {
    if (!p.is_object()) fail(prefix, "expected an object, got " + p.dump());
    reject_unknown_keys(p, prefix + ".",
                        {"kind", "kappa", "eta0", "eta1", "delta", "q0", "metric"});
    PolicySpec spec;
    const std::string kind =
        as_string(require(p, prefix + ".", "kind"), prefix + ".kind");
    try {
        spec.kind = policy_kind_from_string(kind);
    } catch (const std::invalid_argument& err) {
        fail(prefix + ".kind", err.what());
    }
    if (p.contains("kappa")) {
        spec.kappa = as_number(p["kappa"], prefix + ".kappa");
        if (!(spec.kappa > 0.0 && spec.kappa < 1.0))
            fail(prefix + ".kappa", "must lie in (0, 1)");
    }
    if (p.contains("eta0")) spec.eta0 = as_number(p["eta0"], prefix + ".eta0");
    if (p.contains("eta1")) spec.eta1 = as_number(p["eta1"], prefix + ".eta1");
    if (spec.eta0.has_value() != spec.eta1.has_value())
        fail(prefix, "eta0 and eta1 must be given together");
    if (p.contains("delta")) {
        spec.delta = as_number(p["delta"], prefix + ".delta");
        if (!(spec.delta > 0.0)) fail(prefix + ".delta", "must be > 0");
    }
    if (p.contains("q0")) {
        spec.q0 = as_number(p["q0"], prefix + ".q0");
        if (!(spec.q0 >= 0.0 && spec.q0 <= 1.0)) fail(prefix + ".q0", "must lie in [0, 1]");
    }
    if (p.contains("metric")) {
        const std::string m = as_string(p["metric"], prefix + ".metric");
        if (m == "chernoff") spec.metric = ExplorationMetric::chernoff;
        else if (m == "harmonic") spec.metric = ExplorationMetric::harmonic;
        else fail(prefix + ".metric", "expected chernoff or harmonic, got '" + m + "'");
    }
    return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(root, "", {"scenario", "policies", "run", "output"});

    ExperimentConfig cfg;

    // scenario
    const json& sc = require(root, "", "scenario");
    if (!sc.is_object()) fail("scenario", "expected an object");
    reject_unknown_keys(sc, "scenario.", {"models", "interval", "true_model"});
    const json& models = require(sc, "scenario.", "models");
    if (!models.is_array() || models.size() < 2)
        fail("scenario.models", "expected an array of at least 2 models");
    for (std::size_t i = 0; i < models.size(); ++i)
        cfg.models.push_back(
            parse_model(models[i], "scenario.models[" + std::to_string(i) + "]"));
    const json& iv = require(sc, "scenario.", "interval");
    if (!iv.is_object()) fail("scenario.interval", "expected an object");
    reject_unknown_keys(iv, "scenario.interval.", {"l", "u"});
    cfg.interval.lo = as_number(require(iv, "scenario.interval.", "l"), "scenario.interval.l");
    cfg.interval.hi = as_number(require(iv, "scenario.interval.", "u"), "scenario.interval.u");
    if (!(cfg.interval.lo < cfg.interval.hi))
        fail("scenario.interval", "l must be strictly below u");
    if (sc.contains("true_model")) {
        const json& tm = sc["true_model"];
        if (tm.is_string()) {
            if (tm.get<std::string>() != "all")
                fail("scenario.true_model", "expected a model index or \"all\"");
        } else {
            const int idx = as_int(tm, "scenario.true_model");
            if (idx < 0 || idx >= static_cast<int>(cfg.models.size()))
                fail("scenario.true_model", "index " + std::to_string(idx) +
                                                " out of range for " +
                                                std::to_string(cfg.models.size()) + " models");
            cfg.true_model = idx;
        }
    }

    // policies
    const json& pols = require(root, "", "policies");
    if (!pols.is_array() || pols.empty())
        fail("policies", "expected a non-empty array");
    for (std::size_t i = 0; i < pols.size(); ++i)
        cfg.policies.push_back(
            parse_policy(pols[i], "policies[" + std::to_string(i) + "]"));
    for (const PolicySpec& spec : cfg.policies) {
        std::string label = to_string(spec.kind);
        int dup = 1;
        for (const std::string& seen : cfg.policy_labels)
            if (seen == label || seen.rfind(label + "#", 0) == 0) ++dup;
        if (dup > 1) label += "#" + std::to_string(dup);
        cfg.policy_labels.push_back(label);
    }

    // run
    if (root.contains("run")) {
        const json& run = root["run"];
        if (!run.is_object()) fail("run", "expected an object");
        reject_unknown_keys(run, "run.",
                            {"horizon", "replications", "base_seed", "checkpoints",
                             "workers", "grid_points"});
        if (run.contains("horizon")) {
            cfg.horizon = as_int(run["horizon"], "run.horizon");
            if (cfg.horizon < 1) fail("run.horizon", "must be >= 1");
        }
        if (run.contains("replications")) {
            cfg.replications = as_int(run["replications"], "run.replications");
            if (cfg.replications < 1) fail("run.replications", "must be >= 1");
        }
        if (run.contains("base_seed")) {
            const json& s = run["base_seed"];
            if (s.is_number_unsigned())
                cfg.base_seed = s.get<std::uint64_t>();
            else if (s.is_number_integer() && s.get<long long>() >= 0)
                cfg.base_seed = static_cast<std::uint64_t>(s.get<long long>());
            else
                fail("run.base_seed", "expected a nonnegative integer, got " + s.dump());
        }
        if (run.contains("checkpoints")) {
            const json& cps = run["checkpoints"];
            if (!cps.is_array()) fail("run.checkpoints", "expected an array of steps");
            for (std::size_t i = 0; i < cps.size(); ++i) {
                const int t =
                    as_int(cps[i], "run.checkpoints[" + std::to_string(i) + "]");
                if (t < 1 || t > cfg.horizon)
                    fail("run.checkpoints",
                         "step " + std::to_string(t) + " outside [1, horizon]");
                cfg.checkpoints.push_back(t);
            }
            std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());
            cfg.checkpoints.erase(
                std::unique(cfg.checkpoints.begin(), cfg.checkpoints.end()),
                cfg.checkpoints.end());
        }
        if (run.contains("workers")) {
            cfg.workers = as_int(run["workers"], "run.workers");
            if (cfg.workers < 1) fail("run.workers", "must be >= 1");
        }
        if (run.contains("grid_points")) {
            cfg.grid_points = as_int(run["grid_points"], "run.grid_points");
            if (cfg.grid_points < 3) fail("run.grid_points", "must be >= 3");
        }
    }

    // output
    if (root.contains("output")) {
        const json& out = root["output"];
        if (!out.is_object()) fail("output", "expected an object");
        reject_unknown_keys(out, "output.", {"csv", "bounds"});
        if (out.contains("csv")) cfg.csv_path = as_string(out["csv"], "output.csv");
        if (out.contains("bounds"))
            cfg.bounds_path = as_string(out["bounds"], "output.bounds");
    }

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading config file '" + path + "'");
    return parse_config(buf.str());
}

}  // namespace pricesim
