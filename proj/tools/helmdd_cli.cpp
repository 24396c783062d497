// Command-line runner: solve, analyze and frequency-ramp experiments.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "helmdd/experiment.hpp"

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

void print_summary(const helmdd::RunResult& r) {
    std::cout << (r.state.converged ? "converged" : "not converged") << " after "
              << r.state.iterations << " iterations, relative residual "
              << r.state.final_true_residual << ", coarse dimension " << r.coarse_dimension
              << '\n'
              << "t_setup = " << r.timings.setup() << " s, t_solve = " << r.timings.solve
              << " s\n";
    if (r.report) {
        const auto& rep = *r.report;
        std::cout << "k0 = " << rep.k0 << ", k1 = " << rep.k1 << ", xi = " << rep.xi
                  << ", sigma = " << rep.sigma << ", tau_eff = " << rep.tau_eff
                  << ", rho = " << rep.rho << '\n';
        for (const auto& d : rep.diagnostics) {
            std::cout << "  " << d << '\n';
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level ORAS solver for the heterogeneous Helmholtz equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "experiment config (INI)")->required();
        sub->add_option("--output-dir", output_dir, "overrides [output] directory");
        sub->add_option("--seed", seed, "overrides [solver] seed");
    };
    auto* solve = app.add_subcommand("solve", "single solve");
    auto* analyze = app.add_subcommand("analyze", "convergence constants and contraction check");
    auto* ramp = app.add_subcommand("ramp", "frequency ramp, one- vs two-level");
    add_common(solve);
    add_common(analyze);
    add_common(ramp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // help prints and exits 0; any usage error is a configuration error
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        helmdd::ExperimentConfig cfg = helmdd::load_config(config_path);
        if (output_dir) cfg.output.directory = *output_dir;
        if (seed) cfg.solver.seed = *seed;

        if (solve->parsed() || analyze->parsed()) {
            const helmdd::RunResult r = solve->parsed()
                                            ? helmdd::run_solve(cfg, cfg.output.directory)
                                            : helmdd::run_analysis(cfg, cfg.output.directory);
            print_warnings(r.warnings);
            print_summary(r);
            return r.exit_code;
        }

        const auto rows = helmdd::run_ramp(cfg);
        std::filesystem::create_directories(cfg.output.directory);
        const auto path = cfg.output.directory / "ramp.csv";
        std::ofstream out(path);
        helmdd::write_ramp_csv(out, rows);
        helmdd::write_ramp_csv(std::cout, rows);
        bool all_converged = true;
        for (const auto& row : rows) {
            all_converged = all_converged && row.converged;
        }
        return all_converged ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
