#pragma once

#include <memory>
#include <string>

#include "helmdd/experiment.hpp"

namespace fixture {

/// Layered 2x1 medium on [0,2]x[0,1], omega = 4 pi, split into vertical strips.
inline std::unique_ptr<helmdd::Setup> desk_case(bool with_spectra, int nx = 16, int ny = 8,
                                                int jx = 2, int jy = 1, int threads = 1) {
    helmdd::ProblemConfig problem;
    problem.nx = nx;
    problem.ny = ny;
    problem.medium = "layers";
    helmdd::DecompositionConfig dd;
    dd.jx = jx;
    dd.jy = jy;
    return helmdd::build_setup(problem, dd, with_spectra, threads);
}

} // namespace fixture
