#pragma once

#include <span>

#include "helmdd/assembly.hpp"
#include "helmdd/coarse.hpp"
#include "helmdd/decomposition.hpp"
#include "helmdd/gmres.hpp"
#include "helmdd/local_ops.hpp"

namespace helmdd {

/// One-level ORAS sweep plus an optional multiplicative coarse correction.
/// All references must outlive the object.
class TwoLevelOras {
public:
    TwoLevelOras(const GlobalSystem& system, const Partition& part,
                 std::span<const LocalSolver> solvers, const CoarseSpace* coarse = nullptr,
                 int threads = 1);

    /// sum_j E_j (chi_j .* B_j^{-1} r|Omega_j), summed in ascending j.
    CVector subdomain_sweep(const CVector& r) const;
    /// w + Z A0^{-1} Z^H (r - A w) with w = subdomain_sweep(r).
    CVector apply(const CVector& r) const;
    /// One-level part only (ignores the coarse space).
    CVector apply_one_level(const CVector& r) const { return subdomain_sweep(r); }

    bool has_coarse() const { return coarse_ && coarse_->assembled(); }
    const GlobalSystem& system() const { return *system_; }

private:
    const GlobalSystem* system_;
    const Partition* part_;
    std::span<const LocalSolver> solvers_;
    const CoarseSpace* coarse_;
    int threads_;
};

/// u <- u + sum_j E_j chi_j B_j^{-1} (b - A u)|Omega_j
void oras_iterate(SolverState& state, const TwoLevelOras& pc,
                  const ErrorReference* reference = nullptr);
/// Subdomain sweep followed by the coarse correction on the updated residual.
void two_level_iterate(SolverState& state, const TwoLevelOras& pc,
                       const ErrorReference* reference = nullptr);

/// Starts a state at u0 and records its residual (and error).
SolverState start_state(const GlobalSystem& system, const CVector& u0,
                        const ErrorReference* reference = nullptr);

/// Sparse LU solve. Throws NumericalError if A is singular.
CVector direct_solve(const CSparse& A, const CVector& b);

/// e_next = sum_j E_j chi_j R_j (e|extension_j), the one-level error propagator.
CVector one_level_error_map(const Partition& part, std::span<const LocalSolver> solvers,
                            const CVector& e, int threads = 1);

} // namespace helmdd
