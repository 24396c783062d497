#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "helmdd/decomposition.hpp"
#include "helmdd/gevp.hpp"
#include "helmdd/local_ops.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

/// Columns Z of the coarse space, the Galerkin matrix A0 = Z^H A Z and its LU.
class CoarseSpace {
public:
    CoarseSpace() = default;
    explicit CoarseSpace(CMatrix basis) : Z_(std::move(basis)) {}

    const CMatrix& basis() const { return Z_; }
    const CMatrix& galerkin_matrix() const { return A0_; }
    Index dimension() const { return Z_.cols(); }
    Index global_size() const { return Z_.rows(); }
    bool assembled() const { return assembled_; }

    /// Column range [first, second) contributed by each subdomain.
    std::vector<std::pair<Index, Index>> column_ranges;
    std::vector<int> retained_counts;
    std::vector<double> tau_eff;
    std::vector<std::string> warnings;

    /// A0 = Z^H A Z, LU-factorized. Throws NumericalError if A0 is
    /// numerically singular (smallest singular value <= 1e-12 ||A0||).
    void assemble(const CSparse& A);

    /// w0 = Z A0^{-1} Z^H r; zero when the space is empty.
    CVector coarse_correct(const CVector& r) const;
    /// P0 u = Z A0^{-1} Z^H A u
    CVector apply_P0(const CVector& u) const;

    double smallest_singular_ratio() const { return singular_ratio_; }

private:
    CMatrix Z_;
    CMatrix A0_;
    CSparse A_;
    Eigen::PartialPivLU<CMatrix> lu_;
    bool assembled_ = false;
    double singular_ratio_ = 0.0;
};

/// Columns E_j (chi_j .* R_j u_{j,k}) for the retained eigenvectors, ordered
/// by subdomain then eigenvalue rank. Columns with norm below 1e-14 are dropped.
CoarseSpace build_coarse_basis(std::span<const EigenBundle> bundles,
                               std::span<const LocalSolver> solvers, const Partition& part);

/// Convenience: basis plus Galerkin assembly. Empty spaces stay unassembled.
CoarseSpace build_coarse_space(std::span<const EigenBundle> bundles,
                               std::span<const LocalSolver> solvers, const Partition& part,
                               const CSparse& A);

/// Coarse space with an arbitrary basis (e.g. the identity for exactness checks).
CoarseSpace coarse_from_basis(CMatrix Z, const CSparse& A);

} // namespace helmdd
