// gec_run: runs one experiment described by an INI config.
//
// exit codes: 0 ok, 1 other error, 2 bad config, 3 capacity exceeded, 4 budget exhausted

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gec/cli/commands.hpp"
#include "gec/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Run a GEC experiment from a config file"};
    app.set_version_flag("--version", gec::kVersion);
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> out;
    std::optional<double> budget;
    bool quiet = false;
    app.add_option("-c,--config", config, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "override [experiment] seed");
    app.add_option("-j,--workers", workers, "override [experiment] workers")->check(CLI::PositiveNumber);
    app.add_option("-o,--out", out, "override [experiment] out");
    app.add_option("--budget", budget, "override [experiment] budget (seconds)")->check(CLI::PositiveNumber);
    app.add_flag("-q,--quiet", quiet, "no summary on stdout");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        auto x = gec::cli::load_experiment(config);
        if (seed) x.seed = *seed;
        if (workers) x.workers = *workers;
        if (out) x.out = *out;
        if (budget) x.budget = *budget;
        const auto m = gec::cli::run_experiment(x);
        if (!quiet) {
            std::cout << m.experiment << ": wrote";
            for (const auto& f : m.outputs) std::cout << ' ' << f;
            std::cout << " to " << x.out << '\n';
        }
        return 0;
    } catch (const gec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const gec::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 3;
    } catch (const gec::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
