#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseLU>

#include "helmdd/assembly.hpp"
#include "helmdd/decomposition.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

/// Factorized impedance problem B_j plus the extension matrix A-tilde_j.
/// Holds a reference to its Subdomain; the Partition must outlive it.
class LocalSolver {
public:
    /// Throws NumericalError when B is numerically singular.
    LocalSolver(const Subdomain& sub, CSparse impedance, CSparse extension, double omega);

    const Subdomain& subdomain() const { return *sub_; }
    int id() const { return sub_->id; }
    const CSparse& impedance_matrix() const { return impedance_; }
    const CSparse& extension_matrix() const { return extension_; }

    /// B_j^{-1} r
    CVector solve(const CVector& r) const;
    /// B_j^{-H} r, via B_j = B_j^T.
    CVector solve_adjoint(const CVector& r) const;

    /// R_j: solve B_j w = B_j (v_ext|Omega_j) - (A-tilde_j v_ext)|Omega_j.
    CVector apply_R(const CVector& v_ext) const;
    /// K_j = chi_j .* R_j
    CVector apply_K(const CVector& v_ext) const;

    /// Local correction from a global residual: B_j^{-1} (r|Omega_j).
    CVector oras_correction(const CVector& r_global) const;
    /// Same correction from extension-local data only:
    /// B_j^{-1} (b_ext - A-tilde_j u_ext)|Omega_j.
    CVector oras_correction_local(const CVector& b_ext, const CVector& u_ext) const;

private:
    const Subdomain* sub_;
    CSparse impedance_;
    CSparse extension_;
    std::unique_ptr<Eigen::SparseLU<CSparse>> lu_;
};

LocalSolver factorize_local(const Mesh& mesh, const MediumField& medium, double omega,
                            const Subdomain& sub);

/// One factorization per subdomain, possibly on `threads` workers.
std::vector<LocalSolver> factorize_all(const Mesh& mesh, const MediumField& medium,
                                       double omega, const Partition& part, int threads = 1);

} // namespace helmdd
