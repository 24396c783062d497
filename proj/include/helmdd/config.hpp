#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "helmdd/gevp.hpp"
#include "helmdd/mesh.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

struct ProblemConfig {
    int nx = 16;
    int ny = 8;
    Bounds bounds{0.0, 2.0, 0.0, 1.0};
    double omega = 4.0 * 3.14159265358979323846;
    std::string medium = "constant"; ///< constant | layers | wedge | file
    std::string medium_file;
    BuiltinParams medium_params;
    /// Source center; defaults to mid-width, 10% below the top edge.
    std::optional<Point> source_center;
    /// Gaussian width; 0 means two mesh cells.
    double source_width = 0.0;
    Complex source_amplitude{1.0, 0.0};
    Complex boundary_g{0.0, 0.0};
};

struct DecompositionConfig {
    int jx = 2;
    int jy = 1;
    int overlap = 1;
    int oversample = 1;
};

struct CoarseConfig {
    std::string strategy = "none"; ///< none | tau | count | percent
    double value = 0.0;

    std::optional<FilterStrategy> filter() const;
};

struct SolverConfig {
    std::string mode = "gmres"; ///< gmres | stationary
    double tol = 1e-8;
    int maxit = 1000;
    int restart = 200;
    std::uint64_t seed = 0;
    std::string initial = "zero"; ///< zero | random
    int threads = 1;
    /// Compute the direct solution and record energy errors.
    bool reference = false;
};

struct AnalysisConfig {
    bool enabled = false;
    int iterations = 10;
};

struct OutputConfig {
    std::filesystem::path directory = "out";
    /// Wall-clock column in the convergence CSV (breaks byte-reproducibility).
    bool record_times = false;
    bool dump_matrices = false;
};

struct RampPoint {
    double omega = 0.0;
    int nx = 0;
    int ny = 0;
    int jx = 1;
    int jy = 1;
};

struct RampConfig {
    std::vector<RampPoint> points;
    std::vector<double> coarse_percents;
};

struct ExperimentConfig {
    ProblemConfig problem;
    DecompositionConfig decomposition;
    CoarseConfig coarse;
    SolverConfig solver;
    AnalysisConfig analysis;
    OutputConfig output;
    RampConfig ramp;

    /// Throws ConfigError on any violated precondition.
    void validate() const;
};

/// Accepts plain numbers and multiples of pi: "12.5", "4pi", "4*pi", "pi".
double parse_angular(const std::string& text);

/// INI text: [problem], [decomposition], [coarse], [solver], [analysis],
/// [output], [ramp]. Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace helmdd
