#include "helmdd/gevp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace helmdd {

SubdomainEnergy assemble_subdomain_energy(const Mesh& mesh, const MediumField& medium,
                                          double omega, const Subdomain& sub) {
    return {assemble_energy(mesh, medium, omega, sub.elems, sub.dofs),
            assemble_energy(mesh, medium, omega, sub.elems_ext, sub.dofs_ext)};
}

int percent_count(double percent, int interface_size) {
    const double raw = percent * interface_size / 100.0;
    return static_cast<int>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

CMatrix local_operator_matrix(const LocalSolver& ls) {
    const Subdomain& sub = ls.subdomain();
    const Index n_ext = sub.dofs_ext.size();
    CMatrix K(sub.dofs.size(), n_ext);
    CVector unit = CVector::Zero(n_ext);
    for (Index c = 0; c < n_ext; ++c) {
        unit[c] = 1.0;
        K.col(c) = ls.apply_K(unit);
        unit[c] = 0.0;
    }
    return K;
}

EigenBundle solve_gevp(const LocalSolver& ls, const EnergyMatrix& inner,
                       const EnergyMatrix& ext) {
    const Subdomain& sub = ls.subdomain();
    if (inner.C.rows() != sub.dofs.size() || ext.C.rows() != sub.dofs_ext.size()) {
        throw ConfigError("energy matrices do not match the subdomain");
    }

    const CMatrix K = local_operator_matrix(ls);
    CMatrix left = K.adjoint() * (inner.C * K);
    left = 0.5 * (left + left.adjoint()).eval();

    const CMatrix right = CMatrix(ext.C);
    Eigen::LLT<CMatrix> llt(right);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "extension energy matrix of subdomain " << sub.id << " is not HPD";
        throw NumericalError(msg.str());
    }

    // L^{-1} left L^{-H}
    const auto L = llt.matrixL();
    CMatrix half = L.solve(left);
    CMatrix reduced = L.solve(half.adjoint());
    reduced = 0.5 * (reduced + reduced.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(reduced);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("dense Hermitian eigensolver failed");
    }
    const RVector& values = eig.eigenvalues();
    const CMatrix vectors = llt.matrixU().solve(eig.eigenvectors());

    EigenBundle eb;
    eb.subdomain = sub.id;
    eb.min_raw_eigenvalue = values.size() ? values.minCoeff() : 0.0;
    if (eb.min_raw_eigenvalue < -1e-8) {
        std::ostringstream msg;
        msg << "pencil of subdomain " << sub.id << " has eigenvalue " << eb.min_raw_eigenvalue
            << " < -1e-8; left matrix is not PSD";
        throw NumericalError(msg.str());
    }

    std::vector<Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return values[a] > values[b]; });

    eb.eigenvalues.resize(values.size());
    eb.eigenvectors.resize(vectors.rows(), vectors.cols());
    for (std::size_t k = 0; k < order.size(); ++k) {
        double lambda = values[order[k]];
        if (lambda < 0.0 && lambda >= -1e-12) {
            lambda = 0.0;
        }
        eb.eigenvalues[static_cast<Index>(k)] = lambda;
        eb.eigenvectors.col(static_cast<Index>(k)) = vectors.col(order[k]);
    }
    eb.retained = 0;
    eb.tau_eff = eb.xi();
    return eb;
}

void filter(EigenBundle& eb, const FilterStrategy& strategy, int interface_size) {
    const auto total = static_cast<int>(eb.size());
    int keep = 0;
    switch (strategy.kind) {
    case FilterStrategy::Kind::Tau:
        if (!(strategy.value > 0.0)) {
            throw ConfigError("tau must be positive");
        }
        while (keep < total && eb.eigenvalues[keep] > strategy.value) {
            ++keep;
        }
        break;
    case FilterStrategy::Kind::Count:
        if (strategy.value < 0.0) {
            throw ConfigError("eigenpair count must be nonnegative");
        }
        keep = static_cast<int>(strategy.value);
        break;
    case FilterStrategy::Kind::Percent:
        if (!(strategy.value > 0.0) || strategy.value > 100.0) {
            throw ConfigError("percent must lie in (0, 100]");
        }
        keep = percent_count(strategy.value, interface_size);
        break;
    }
    if (keep > total) {
        eb.warnings.push_back("subdomain " + std::to_string(eb.subdomain) + ": requested " +
                              std::to_string(keep) + " eigenpairs, only " +
                              std::to_string(total) + " available; keeping all");
        keep = total;
    }
    eb.retained = keep;
    eb.tau_eff = keep < total ? eb.eigenvalues[keep] : 0.0;
}

namespace {

double rel(const CVector& residual, double scale) {
    return scale > 0.0 ? residual.norm() / scale : residual.norm();
}

} // namespace

SaddlePointResidual verify_saddlepoint(const LocalSolver& ls, const SubdomainEnergy& energy,
                                       const CVector& u_ext, double lambda, double lambda_scale) {
    if (u_ext.size() != ls.subdomain().dofs_ext.size()) {
        throw ConfigError("eigenvector does not match the extension");
    }
    if (u_ext.norm() == 0.0) {
        throw ConfigError("saddle-point check needs a nonzero eigenvector");
    }
    const Subdomain& sub = ls.subdomain();
    const CSparse& B = ls.impedance_matrix();
    const CVector chi = sub.chi.cast<Complex>();

    const CVector v = ls.apply_R(u_ext);
    const CVector weighted = chi.cwiseProduct(energy.inner.C * chi.cwiseProduct(v));
    const CVector sigma = ls.solve_adjoint(weighted);

    SaddlePointResidual res;

    // D C D v - B^H sigma = 0
    const CVector bh_sigma = B.adjoint() * sigma;
    res.block1 = rel(weighted - bh_sigma, weighted.norm() + bh_sigma.norm());

    // -B v + B (u|Omega_j) - (A-tilde u)|Omega_j = 0
    const CVector bv = B * v;
    const CVector bu = B * restrict_ext_to_inner(sub, u_ext);
    const CVector au = restrict_ext_to_inner(sub, ls.extension_matrix() * u_ext);
    res.block2 = rel(bu - au - bv, bv.norm() + bu.norm() + au.norm());

    // (B I - E^T A-tilde)^H sigma = lambda C-tilde u
    const CVector lhs = extend_inner_to_ext(sub, bh_sigma) -
                        ls.extension_matrix().adjoint() * extend_inner_to_ext(sub, sigma);
    const CVector rhs = lambda * (energy.ext.C * u_ext);
    const double scale3 = std::max(std::abs(lambda), lambda_scale) * (energy.ext.C * u_ext).norm();
    res.block3 = rel(lhs - rhs, scale3);
    return res;
}

SaddlePointResidual verify_saddlepoint(const LocalSolver& ls, const SubdomainEnergy& energy,
                                       const EigenBundle& eb, Index k) {
    if (k < 0 || k >= eb.size()) {
        throw std::out_of_range("eigenpair index out of range");
    }
    return verify_saddlepoint(ls, energy, eb.eigenvectors.col(k), eb.eigenvalues[k], eb.xi());
}

} // namespace helmdd
