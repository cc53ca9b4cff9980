/// Command-line front end of the barrier laboratory.
///
/// One subcommand per experiment plus `report`, which consolidates the JSON
/// reports found in an output directory. Exit codes: 0 when the experiment
/// ran and every check passed, 2 when it ran but a verification verdict
/// failed, 1 for configuration or runtime errors.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "barrierlab/errors.hpp"
#include "barrierlab/experiments.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;
    double grid_h = 0.0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path,
                    "JSON configuration file (defaults apply when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out_dir, "output directory override");
    cmd->add_option("--seed", flags.seed, "seed override (nonnegative)");
    cmd->add_option("--grid-h", flags.grid_h, "grid spacing override");
}

int run_subcommand(const std::string& name, const CommonFlags& flags) {
    barrierlab::ExperimentConfig cfg =
        flags.config_path.empty()
            ? barrierlab::ExperimentConfig::from_text("{}", "<defaults>")
            : barrierlab::ExperimentConfig::from_file(flags.config_path);
    if (cfg.experiment().empty()) {
        cfg.set_experiment(name);
    } else if (cfg.experiment() != name) {
        throw barrierlab::ConfigError("configuration names experiment \"" +
                                          cfg.experiment() +
                                          "\" but the subcommand is \"" + name + "\"",
                                      "/experiment");
    }
    if (!flags.out_dir.empty()) cfg.set_output_dir(flags.out_dir);
    if (flags.seed >= 0) cfg.set_seed(static_cast<std::uint64_t>(flags.seed));
    if (flags.grid_h > 0.0) cfg.set_grid_h(flags.grid_h);

    barrierlab::RunResult res = barrierlab::run_experiment(cfg);
    std::cout << res.summary_line << "\n";
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for barrier constructions, growth "
                 "conditions, and boundary behavior of degenerate elliptic "
                 "problems"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {
        "analyze-phi",    "build-barrier", "counterexample",    "solve",
        "verify-boundary", "verify-smap",   "reproduce-figure1",
    };
    const std::vector<std::string> descriptions = {
        "decide the integral growth conditions for a nonlinearity",
        "construct a radial barrier and certify its strictness margins",
        "build an explicit counterexample function and check its ODE residual",
        "solve the variable-exponent model problem on a grid domain",
        "run the boundary-behavior checks on a solved field",
        "run the strong-maximum-principle check on a solved field",
        "regenerate the four overview panels as CSV files",
    };

    std::vector<CommonFlags> flags(experiments.size());
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(experiments[i], descriptions[i]);
        add_common_flags(cmd, flags[i]);
    }

    std::string report_dir = "out";
    CLI::App* report = app.add_subcommand(
        "report", "consolidate all run reports in a directory into a summary");
    report->add_option("--out", report_dir, "directory holding *-report.json files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            int code = barrierlab::consolidate_reports(report_dir);
            std::cout << "report: summary written to " << report_dir << "\n";
            return code;
        }
        for (std::size_t i = 0; i < experiments.size(); ++i)
            if (app.get_subcommand(experiments[i])->parsed())
                return run_subcommand(experiments[i], flags[i]);
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const barrierlab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const barrierlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
