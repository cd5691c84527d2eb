#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "levsim/errors.hpp"
#include "levsim/report.hpp"
#include "levsim/scenario.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int realizations = 0;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    // Existence is checked by the config loader so that a missing file exits
    // with the config-error code.
    cmd->add_option("-c,--config", opt.config_path, "scenario file (JSON)")->required();
    cmd->add_option("--seed", opt.seed, "override the sampler seed")
        ->each([&opt](const std::string&) { opt.seed_set = true; });
    cmd->add_option("--realizations", opt.realizations, "override the realization count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", opt.out_dir, "override the output directory");
}

levsim::ScenarioConfig load(const CommonOptions& opt) {
    levsim::ScenarioConfig config = levsim::parse_config(opt.config_path);
    if (opt.seed_set) config.sampler.seed = opt.seed;
    if (opt.realizations > 0) config.sampler.realizations = opt.realizations;
    if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"levsim - stock/bond portfolio simulator with leverage, margin and taxes"};
    app.require_subcommand(1);

    CommonOptions opt;
    CLI::App* backtest = app.add_subcommand("backtest", "replay a scenario over the loaded history");
    CLI::App* mc = app.add_subcommand("mc", "Monte-Carlo resampling of the history");
    CLI::App* frontier = app.add_subcommand("frontier", "stock/bond sweep across leverage variants");
    add_common(backtest, opt);
    add_common(mc, opt);
    add_common(frontier, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        const levsim::ScenarioConfig config = load(opt);
        if (backtest->parsed()) return levsim::cmd_backtest(config);
        if (mc->parsed()) return levsim::cmd_mc(config);
        return levsim::cmd_frontier(config);
    } catch (const levsim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return levsim::kExitConfigError;
    } catch (const levsim::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return levsim::kExitDataError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return levsim::kExitDataError;
    }
}
