#pragma once

#include <functional>
#include <vector>

#include "helmdd/types.hpp"

namespace helmdd {

using LinearOperator = std::function<CVector(const CVector&)>;

/// Iteration record shared by the stationary and Krylov drivers.
struct SolverState {
    CVector u;
    int iterations = 0;
    bool converged = false;
    /// Relative residual ||b - A u|| / ||b|| per iteration (entry 0 is the start).
    std::vector<double> residuals;
    /// Relative energy error ||u* - u||_C / ||u*||_C, filled when a reference is given.
    std::vector<double> energy_errors;
    /// Seconds since the start of the solve phase, per recorded iteration.
    std::vector<double> times;
    double final_true_residual = 0.0;
    double setup_time = 0.0;
    double solve_time = 0.0;
};

/// Exact solution and energy matrix for error monitoring.
struct ErrorReference {
    CVector exact;
    CSparse C;

    double energy_norm(const CVector& v) const;
    double relative_error(const CVector& u) const;
};

struct GmresOptions {
    double tol = 1e-8;
    int maxit = 1000;
    int restart = 200;
};

/// Right-preconditioned restarted GMRES. Convergence is accepted only once
/// the true residual ||b - A u|| / ||b|| is below tol; hitting maxit returns
/// a non-converged state with the full history.
SolverState gmres(const LinearOperator& A, const CVector& b, const LinearOperator& M,
                  const GmresOptions& options, const CVector* x0 = nullptr,
                  const ErrorReference* reference = nullptr);

} // namespace helmdd
