#pragma once

#include <filesystem>
#include <memory>
#include <ostream>
#include <optional>
#include <string>
#include <vector>

#include "helmdd/analysis.hpp"
#include "helmdd/coarse.hpp"
#include "helmdd/config.hpp"
#include "helmdd/gevp.hpp"
#include "helmdd/local_ops.hpp"
#include "helmdd/solver.hpp"

namespace helmdd {

/// Wall-clock split of one experiment. Every timed phase lands in exactly one
/// of the setup or solve buckets.
struct Timings {
    double assembly = 0.0;
    double factorization = 0.0;
    double eigensolve = 0.0;
    double coarse = 0.0;
    double solve = 0.0;
    /// Direct reference solve and dense analysis; neither setup nor solve.
    double oracle = 0.0;
    double wall = 0.0;

    double setup() const { return assembly + factorization + eigensolve + coarse; }
};

/// Everything built before the iteration starts. Not movable: local solvers
/// point into `partition`.
struct Setup {
    Setup(Mesh m, MediumField med, double w) : mesh(std::move(m)), medium(std::move(med)), omega(w) {}
    Setup(const Setup&) = delete;
    Setup& operator=(const Setup&) = delete;

    Mesh mesh;
    MediumField medium;
    double omega;
    GlobalSystem system;
    Partition partition;
    std::vector<LocalSolver> solvers;
    std::vector<SubdomainEnergy> energies;
    std::vector<EigenBundle> bundles; ///< empty unless eigenproblems were solved
    CoarseSpace coarse;
    Timings timings;
    std::vector<std::string> warnings;
};

Mesh make_mesh(const ProblemConfig& problem);
MediumField make_medium(const ProblemConfig& problem, const Mesh& mesh);

/// Assembles, partitions and factorizes; solves the eigenproblems when
/// `with_spectra` is set (needed by any coarse space or analysis).
std::unique_ptr<Setup> build_setup(const ProblemConfig& problem, const DecompositionConfig& dd,
                                   bool with_spectra, int threads);

/// Filters every bundle with `strategy` and assembles the coarse space
/// (or clears it when strategy is empty).
void apply_coarse(Setup& setup, const std::optional<FilterStrategy>& strategy);

CVector initial_guess(const SolverConfig& solver, Index n);

struct RunResult {
    SolverState state;
    int exit_code = 0; ///< 0 converged, 2 iteration limit reached
    Timings timings;
    Index coarse_dimension = 0;
    std::optional<EstimateReport> report;
    std::vector<std::string> warnings;
};

/// Runs the configured solve and writes convergence.csv, timing.txt,
/// coarse.txt (and report.txt / contraction.csv when analysis is enabled)
/// into `out_dir` unless it is empty.
RunResult run_solve(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Builds the configured setup and writes report.txt / contraction.csv.
RunResult run_analysis(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct RampRow {
    double omega = 0.0;
    int J = 0;
    int N = 0;
    std::string variant; ///< "one-level" or "two-level-<p>%"
    Index coarse_size = 0;
    int iterations = 0;
    bool converged = false;
    double t_setup = 0.0;
    double t_solve = 0.0;
};

/// One-level plus one two-level variant per coarse percent, per ramp point.
/// Problem and decomposition settings other than the point's own fields come
/// from `cfg`. Failed points are recorded and the ramp continues.
std::vector<RampRow> run_ramp(const ExperimentConfig& cfg);

/// "omega,J,N,variant,CS,iters,t_setup,t_solve"
void write_ramp_csv(std::ostream& out, const std::vector<RampRow>& rows);

} // namespace helmdd
