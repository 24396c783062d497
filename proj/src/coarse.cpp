#include "helmdd/coarse.hpp"

#include <Eigen/SVD>

#include <sstream>

namespace helmdd {

void CoarseSpace::assemble(const CSparse& A) {
    if (A.rows() != Z_.rows()) {
        throw ConfigError("coarse basis does not match the global system");
    }
    A_ = A;
    if (Z_.cols() == 0) {
        A0_.resize(0, 0);
        assembled_ = false;
        return;
    }
    A0_ = Z_.adjoint() * (A * Z_);
    Eigen::BDCSVD<CMatrix> svd(A0_);
    const RVector& s = svd.singularValues();
    singular_ratio_ = s[0] > 0.0 ? s[s.size() - 1] / s[0] : 0.0;
    if (!(singular_ratio_ > 1e-12)) {
        std::ostringstream msg;
        msg << "coarse matrix is numerically singular (sigma_min/sigma_max = " << singular_ratio_
            << "); enlarge the coarse space (smaller tau or larger percent)";
        throw NumericalError(msg.str());
    }
    lu_.compute(A0_);
    assembled_ = true;
}

CVector CoarseSpace::coarse_correct(const CVector& r) const {
    if (!assembled_) {
        return CVector::Zero(r.size());
    }
    const CVector y = lu_.solve(Z_.adjoint() * r);
    return Z_ * y;
}

CVector CoarseSpace::apply_P0(const CVector& u) const {
    if (!assembled_) {
        return CVector::Zero(u.size());
    }
    return coarse_correct(A_ * u);
}

CoarseSpace build_coarse_basis(std::span<const EigenBundle> bundles,
                               std::span<const LocalSolver> solvers, const Partition& part) {
    if (bundles.size() != part.subdomains.size() || solvers.size() != part.subdomains.size()) {
        throw ConfigError("one eigen bundle and one local solver per subdomain expected");
    }
    std::vector<CVector> columns;
    std::vector<std::pair<Index, Index>> ranges;
    std::vector<int> counts;
    std::vector<double> taus;
    std::vector<std::string> warnings;
    for (std::size_t j = 0; j < bundles.size(); ++j) {
        const EigenBundle& eb = bundles[j];
        const LocalSolver& ls = solvers[j];
        const auto first = static_cast<Index>(columns.size());
        for (int k = 0; k < eb.retained; ++k) {
            CVector col = extend_by_zero(ls.apply_K(eb.eigenvectors.col(k)), ls.subdomain().dofs);
            if (col.norm() < 1e-14) {
                warnings.push_back("subdomain " + std::to_string(j) + ": dropped coarse vector " +
                                   std::to_string(k) + " (negligible norm)");
                continue;
            }
            columns.push_back(std::move(col));
        }
        ranges.emplace_back(first, static_cast<Index>(columns.size()));
        counts.push_back(eb.retained);
        taus.push_back(eb.tau_eff);
        warnings.insert(warnings.end(), eb.warnings.begin(), eb.warnings.end());
    }
    CMatrix Z(part.num_nodes, static_cast<Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        Z.col(static_cast<Index>(c)) = columns[c];
    }
    CoarseSpace cs(std::move(Z));
    cs.column_ranges = std::move(ranges);
    cs.retained_counts = std::move(counts);
    cs.tau_eff = std::move(taus);
    cs.warnings = std::move(warnings);
    return cs;
}

CoarseSpace build_coarse_space(std::span<const EigenBundle> bundles,
                               std::span<const LocalSolver> solvers, const Partition& part,
                               const CSparse& A) {
    CoarseSpace cs = build_coarse_basis(bundles, solvers, part);
    cs.assemble(A);
    return cs;
}

CoarseSpace coarse_from_basis(CMatrix Z, const CSparse& A) {
    CoarseSpace cs(std::move(Z));
    cs.column_ranges.emplace_back(0, cs.dimension());
    cs.assemble(A);
    return cs;
}

} // namespace helmdd
