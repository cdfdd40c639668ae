#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pricesim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-pricing policy simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out_path;
    std::vector<int> pair{0, 1};

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config (JSON)")
            ->required();
        cmd->add_option("--seed", seed, "override run.base_seed");
        cmd->add_option("--workers", workers, "override run.workers");
        cmd->add_option("--out", out_path, "override the output path");
    };

    CLI::App* run = app.add_subcommand("run", "run the Monte Carlo experiment");
    add_common(run);
    CLI::App* bounds = app.add_subcommand("bounds", "print pull-cap constants");
    add_common(bounds);
    CLI::App* chernoff =
        app.add_subcommand("chernoff", "exploration price for one model pair");
    add_common(chernoff);
    chernoff->add_option("--pair", pair, "model pair (two indices)")
        ->expected(2);
    CLI::App* validate = app.add_subcommand("validate", "check the scenario");
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    pricesim::CliOverrides overrides;
    const CLI::App* active = app.get_subcommands().front();
    if (active->count("--seed")) overrides.seed = seed;
    if (active->count("--workers")) overrides.workers = workers;
    if (active->count("--out")) overrides.out = out_path;

    if (run->parsed()) return pricesim::cmd_run(config_path, overrides);
    if (bounds->parsed()) return pricesim::cmd_bounds(config_path, overrides);
    if (chernoff->parsed())
        return pricesim::cmd_chernoff(config_path, pair[0], pair[1], overrides);
    if (validate->parsed()) return pricesim::cmd_validate(config_path, overrides);
    return 1;
}
