#include "helmdd/experiment.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "helmdd/io.hpp"
#include "helmdd/parallel.hpp"

namespace helmdd {

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
public:
    Stopwatch() : start_(Clock::now()) {}
    double lap() {
        const auto now = Clock::now();
        const double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return s;
    }

private:
    Clock::time_point start_;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    out << text;
}

} // namespace

Mesh make_mesh(const ProblemConfig& problem) {
    return build_grid(problem.nx, problem.ny, problem.bounds);
}

MediumField make_medium(const ProblemConfig& problem, const Mesh& mesh) {
    MediumField medium = problem.medium == "file"
                             ? load_medium(problem.medium_file, mesh)
                             : builtin_medium(problem.medium, mesh, problem.medium_params);
    const Bounds& b = problem.bounds;
    medium.source.center = problem.source_center.value_or(
        Point{0.5 * (b.xmin + b.xmax), b.ymax - 0.1 * b.height()});
    medium.source.width = problem.source_width > 0.0
                              ? problem.source_width
                              : 2.0 * std::max(b.width() / problem.nx, b.height() / problem.ny);
    medium.source.amplitude = problem.source_amplitude;
    std::fill(medium.g.begin(), medium.g.end(), problem.boundary_g);
    medium.validate(mesh);
    return medium;
}

std::unique_ptr<Setup> build_setup(const ProblemConfig& problem, const DecompositionConfig& dd,
                                   bool with_spectra, int threads) {
    Stopwatch sw;
    Mesh mesh = make_mesh(problem);
    MediumField medium = make_medium(problem, mesh);
    auto setup = std::make_unique<Setup>(std::move(mesh), std::move(medium), problem.omega);
    setup->system = assemble_global(setup->mesh, setup->medium, setup->omega);
    setup->partition = partition(setup->mesh, dd.jx, dd.jy, dd.overlap, dd.oversample);
    setup->warnings = setup->partition.warnings;
    if (with_spectra) {
        for (const Subdomain& sub : setup->partition.subdomains) {
            setup->energies.push_back(
                assemble_subdomain_energy(setup->mesh, setup->medium, setup->omega, sub));
        }
    }
    setup->timings.assembly = sw.lap();

    setup->solvers = factorize_all(setup->mesh, setup->medium, setup->omega, setup->partition,
                                   threads);
    setup->timings.factorization = sw.lap();

    if (with_spectra) {
        setup->bundles.resize(setup->solvers.size());
        parallel_for(static_cast<int>(setup->solvers.size()), threads, [&](int j) {
            const auto k = static_cast<std::size_t>(j);
            setup->bundles[k] =
                solve_gevp(setup->solvers[k], setup->energies[k].inner, setup->energies[k].ext);
        });
    }
    setup->timings.eigensolve = sw.lap();
    return setup;
}

void apply_coarse(Setup& setup, const std::optional<FilterStrategy>& strategy) {
    Stopwatch sw;
    if (!strategy) {
        setup.coarse = CoarseSpace(CMatrix(setup.system.n, 0));
        setup.timings.coarse = 0.0;
        return;
    }
    if (setup.bundles.size() != setup.partition.subdomains.size()) {
        throw ConfigError("coarse space requested without local spectra");
    }
    for (std::size_t j = 0; j < setup.bundles.size(); ++j) {
        setup.bundles[j].warnings.clear();
        filter(setup.bundles[j], *strategy,
               static_cast<int>(setup.partition.subdomains[j].interface_dofs.size()));
    }
    setup.coarse =
        build_coarse_space(setup.bundles, setup.solvers, setup.partition, setup.system.A);
    setup.warnings.insert(setup.warnings.end(), setup.coarse.warnings.begin(),
                          setup.coarse.warnings.end());
    setup.timings.coarse = sw.lap();
}

CVector initial_guess(const SolverConfig& solver, Index n) {
    if (solver.initial == "zero") {
        return CVector::Zero(n);
    }
    std::mt19937_64 rng(solver.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CVector u(n);
    for (Index k = 0; k < n; ++k) {
        const double re = dist(rng);
        const double im = dist(rng);
        u[k] = Complex(re, im);
    }
    return u;
}

namespace {

SolverState iterate(const Setup& setup, const SolverConfig& solver, const CVector& u0,
                    const ErrorReference* ref) {
    const TwoLevelOras pc(setup.system, setup.partition, setup.solvers, &setup.coarse,
                          solver.threads);
    if (solver.mode == "gmres") {
        const CSparse& A = setup.system.A;
        GmresOptions opts{solver.tol, solver.maxit, solver.restart};
        return gmres([&](const CVector& x) -> CVector { return A * x; }, setup.system.b,
                     [&](const CVector& r) { return pc.apply(r); }, opts, &u0, ref);
    }
    Stopwatch sw;
    SolverState st = start_state(setup.system, u0, ref);
    while (st.residuals.back() > solver.tol && st.iterations < solver.maxit) {
        two_level_iterate(st, pc, ref);
        st.times.push_back(sw.lap() + st.times.back());
    }
    st.converged = st.residuals.back() <= solver.tol;
    st.solve_time = st.times.back();
    return st;
}

std::string timing_text(const Timings& t) {
    std::ostringstream out;
    out << std::setprecision(6) << "t_setup = " << t.setup() << '\n'
        << "t_solve = " << t.solve << '\n'
        << "t_assembly = " << t.assembly << '\n'
        << "t_factorization = " << t.factorization << '\n'
        << "t_eigensolve = " << t.eigensolve << '\n'
        << "t_coarse = " << t.coarse << '\n'
        << "t_oracle = " << t.oracle << '\n'
        << "t_wall = " << t.wall << '\n';
    return out.str();
}

} // namespace

RunResult run_solve(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    const long nodes = static_cast<long>(cfg.problem.nx + 1) * (cfg.problem.ny + 1);
    if (cfg.analysis.enabled && nodes > kAnalysisMaxDofs) {
        throw ConfigError("analysis is limited to " + std::to_string(kAnalysisMaxDofs) +
                          " dofs (problem has " + std::to_string(nodes) + ")");
    }
    Stopwatch wall;
    const auto strategy = cfg.coarse.filter();
    auto setup = build_setup(cfg.problem, cfg.decomposition,
                             strategy.has_value() || cfg.analysis.enabled, cfg.solver.threads);
    apply_coarse(*setup, strategy);

    double oracle_time = 0.0;
    std::optional<ErrorReference> ref;
    const bool want_ref = cfg.solver.reference || cfg.analysis.enabled;
    if (want_ref) {
        Stopwatch sw;
        ref = ErrorReference{direct_solve(setup->system.A, setup->system.b),
                             assemble_energy(setup->mesh, setup->medium, setup->omega,
                                             all_elements(setup->mesh))
                                 .C};
        oracle_time = sw.lap();
    }

    RunResult result;
    const CVector u0 = initial_guess(cfg.solver, setup->system.n);
    result.state = iterate(*setup, cfg.solver, u0, ref ? &*ref : nullptr);
    setup->timings.solve = result.state.solve_time;
    result.exit_code = result.state.converged ? 0 : 2;
    result.coarse_dimension = setup->coarse.dimension();
    result.warnings = setup->warnings;

    if (cfg.analysis.enabled) {
        Stopwatch sw;
        const EnergyMatrix global{ref->C, DofMap::identity(setup->system.n)};
        ContractionInputs in{&setup->system, &setup->partition, setup->solvers,
                             setup->energies, setup->bundles, &setup->coarse, &global};
        result.report = contraction_report(in, u0, cfg.analysis.iterations, cfg.solver.threads);
        oracle_time += sw.lap();
    }
    setup->timings.oracle = oracle_time;
    setup->timings.wall = wall.lap();
    result.timings = setup->timings;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ostringstream csv;
        write_convergence_csv(csv, result.state, cfg.output.record_times);
        write_file(out_dir / "convergence.csv", csv.str());
        write_file(out_dir / "timing.txt", timing_text(result.timings));
        std::ostringstream coarse;
        write_coarse_summary(coarse, setup->coarse);
        write_file(out_dir / "coarse.txt", coarse.str());
        if (result.report) {
            std::ostringstream rep;
            write_report(rep, *result.report);
            write_file(out_dir / "report.txt", rep.str());
            std::ostringstream ratios;
            write_ratio_csv(ratios, *result.report);
            write_file(out_dir / "contraction.csv", ratios.str());
        }
        if (cfg.output.dump_matrices) {
            std::ostringstream a;
            write_matrix_coordinates(a, setup->system.A);
            write_file(out_dir / "A.coo", a.str());
            std::ostringstream p;
            write_partition(p, setup->partition);
            write_file(out_dir / "partition.txt", p.str());
            for (const EigenBundle& eb : setup->bundles) {
                std::ostringstream s;
                write_spectrum(s, eb);
                write_file(out_dir / ("spectrum_" + std::to_string(eb.subdomain) + ".txt"), s.str());
            }
        }
    }
    return result;
}

RunResult run_analysis(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    ExperimentConfig with = cfg;
    with.analysis.enabled = true;
    RunResult r = run_solve(with, out_dir);
    r.exit_code = (r.report && r.report->two_level_within_bound && r.report->one_level_within_bound)
                      ? 0
                      : 2;
    return r;
}

std::vector<RampRow> run_ramp(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.ramp.points.empty()) {
        throw ConfigError("ramp needs at least one point");
    }
    std::vector<RampRow> rows;
    for (const RampPoint& point : cfg.ramp.points) {
        ProblemConfig problem = cfg.problem;
        problem.omega = point.omega;
        problem.nx = point.nx;
        problem.ny = point.ny;
        DecompositionConfig dd = cfg.decomposition;
        dd.jx = point.jx;
        dd.jy = point.jy;

        auto make_row = [&](std::string variant) {
            RampRow row;
            row.omega = point.omega;
            row.J = point.jx * point.jy;
            row.N = (point.nx + 1) * (point.ny + 1);
            row.variant = std::move(variant);
            return row;
        };

        std::unique_ptr<Setup> setup;
        try {
            setup = build_setup(problem, dd, !cfg.ramp.coarse_percents.empty(),
                                cfg.solver.threads);
        } catch (const std::exception& e) {
            std::cerr << "ramp point omega=" << point.omega << " failed: " << e.what() << '\n';
            rows.push_back(make_row("one-level"));
            rows.back().iterations = -1;
            for (double pc : cfg.ramp.coarse_percents) {
                std::ostringstream v;
                v << "two-level-" << pc << '%';
                rows.push_back(make_row(v.str()));
                rows.back().iterations = -1;
            }
            continue;
        }
        const CVector u0 = initial_guess(cfg.solver, setup->system.n);

        auto run_variant = [&](const std::optional<FilterStrategy>& strategy, std::string name) {
            RampRow row = make_row(std::move(name));
            try {
                apply_coarse(*setup, strategy);
                const SolverState st = iterate(*setup, cfg.solver, u0, nullptr);
                row.coarse_size = setup->coarse.dimension();
                row.iterations = st.iterations;
                row.converged = st.converged;
                row.t_setup = setup->timings.assembly + setup->timings.factorization +
                              (strategy ? setup->timings.eigensolve + setup->timings.coarse : 0.0);
                row.t_solve = st.solve_time;
            } catch (const std::exception& e) {
                std::cerr << "ramp variant " << row.variant << " at omega=" << point.omega
                          << " failed: " << e.what() << '\n';
                row.iterations = -1;
            }
            rows.push_back(row);
        };

        run_variant(std::nullopt, "one-level");
        for (double pc : cfg.ramp.coarse_percents) {
            std::ostringstream v;
            v << "two-level-" << pc << '%';
            run_variant(FilterStrategy::percent(pc), v.str());
        }
    }
    return rows;
}

void write_ramp_csv(std::ostream& out, const std::vector<RampRow>& rows) {
    out << "omega,J,N,variant,CS,iters,t_setup,t_solve\n";
    for (const RampRow& r : rows) {
        out << std::setprecision(10) << r.omega << ',' << r.J << ',' << r.N << ',' << r.variant
            << ',' << r.coarse_size << ',' << r.iterations << ',' << std::setprecision(6)
            << r.t_setup << ',' << r.t_solve << '\n';
    }
}

} // namespace helmdd
