#include <CLI11.hpp>
#include <clocale>
#include <iostream>

#include "nijhydro/cli.hpp"

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");

    CLI::App app{"nijhydro — symmetry/conservation-law calculus of gl-regular Nijenhuis "
                 "operators and quadrature integration of the associated hydrodynamic systems"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = -1;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "JSON configuration file");
        if (needs_config) opt->required();
        cmd->add_option("--seed", seed, "override the probe-point RNG seed");
        cmd->add_option("--out", out_dir, "output directory (default: config output.dir)");
    };

    CLI::App* verify = app.add_subcommand("verify", "residual tables with pass/fail expectations");
    CLI::App* solve = app.add_subcommand("solve", "integrate the hydrodynamic system in quadratures");
    CLI::App* hierarchy = app.add_subcommand("hierarchy", "build and check a conservation-law hierarchy");
    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in corpus");
    add_common(verify, true);
    add_common(solve, true);
    add_common(hierarchy, true);
    add_common(selftest, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        // usage problems exit 2 per the CLI contract
        return code == 0 ? 0 : 2;
    }

    try {
        if (selftest->parsed()) return nijhydro::run_selftest_cmd(std::cout);
        nijhydro::RunConfig cfg = nijhydro::load_config(config_path);
        if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
        const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
        if (verify->parsed()) return nijhydro::run_verify(cfg, std::cout);
        if (hierarchy->parsed()) return nijhydro::run_hierarchy(cfg, dir, std::cout);
        return nijhydro::run_solve(cfg, dir, std::cout);
    } catch (const nijhydro::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nijhydro::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
