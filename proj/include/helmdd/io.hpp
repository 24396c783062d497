#pragma once

#include <ostream>

#include "helmdd/coarse.hpp"
#include "helmdd/decomposition.hpp"
#include "helmdd/gevp.hpp"
#include "helmdd/gmres.hpp"

namespace helmdd {

/// "row col re im" per nonzero, 1-based, sorted row-major.
void write_matrix_coordinates(std::ostream& out, const CSparse& A);

/// Per subdomain: sorted dofs with their chi weights.
void write_partition(std::ostream& out, const Partition& part);

/// "k lambda" per line, k 1-based.
void write_spectrum(std::ostream& out, const EigenBundle& eb);

/// Coarse dimension, per-subdomain retained counts and tau_eff.
void write_coarse_summary(std::ostream& out, const CoarseSpace& cs);

/// "iter,residual_rel,energy_error_rel,time_s". Energy and time columns are
/// left empty when not recorded.
void write_convergence_csv(std::ostream& out, const SolverState& state, bool with_times);

} // namespace helmdd
