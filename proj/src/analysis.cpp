#include "helmdd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace helmdd {

double largest_pencil_eigenvalue(const CMatrix& left, const CMatrix& right) {
    Eigen::LLT<CMatrix> llt(right);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("right pencil matrix is not HPD");
    }
    const auto L = llt.matrixL();
    CMatrix half = L.solve(left);
    CMatrix reduced = L.solve(half.adjoint());
    reduced = 0.5 * (reduced + reduced.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(reduced, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("dense Hermitian eigensolver failed");
    }
    return eig.eigenvalues().maxCoeff();
}

namespace {

void guard_size(int n) {
    if (n > kAnalysisMaxDofs) {
        throw ConfigError("dense analysis is limited to " + std::to_string(kAnalysisMaxDofs) +
                          " dofs (got " + std::to_string(n) + ")");
    }
}

/// Positions (in dofs) of the interface-free dofs of a subdomain.
std::vector<int> free_positions(const Subdomain& sub) {
    std::vector<int> pos;
    for (int k = 0; k < sub.dofs.size(); ++k) {
        if (!sub.is_interface(sub.dofs.global[static_cast<std::size_t>(k)])) {
            pos.push_back(k);
        }
    }
    return pos;
}

} // namespace

CMatrix stacked_extension(const Partition& part) {
    Index total = 0;
    for (const Subdomain& sub : part.subdomains) {
        total += static_cast<Index>(free_positions(sub).size());
    }
    CMatrix G = CMatrix::Zero(part.num_nodes, total);
    Index col = 0;
    for (const Subdomain& sub : part.subdomains) {
        for (int k : free_positions(sub)) {
            G(sub.dofs.global[static_cast<std::size_t>(k)], col++) = 1.0;
        }
    }
    return G;
}

double estimate_k0(const Partition& part, const EnergyMatrix& global,
                   std::span<const SubdomainEnergy> local) {
    guard_size(part.num_nodes);
    const CMatrix G = stacked_extension(part);
    const CMatrix left = G.adjoint() * (global.C * G);
    CMatrix right = CMatrix::Zero(G.cols(), G.cols());
    Index offset = 0;
    for (std::size_t j = 0; j < part.subdomains.size(); ++j) {
        const std::vector<int> pos = free_positions(part.subdomains[j]);
        const CMatrix Cj = CMatrix(local[j].inner.C);
        for (std::size_t a = 0; a < pos.size(); ++a) {
            for (std::size_t b = 0; b < pos.size(); ++b) {
                right(offset + static_cast<Index>(a), offset + static_cast<Index>(b)) =
                    Cj(pos[a], pos[b]);
            }
        }
        offset += static_cast<Index>(pos.size());
    }
    return largest_pencil_eigenvalue(left, right);
}

double estimate_k1(const Partition& part, const EnergyMatrix& global,
                   std::span<const SubdomainEnergy> local) {
    guard_size(part.num_nodes);
    CMatrix left = CMatrix::Zero(part.num_nodes, part.num_nodes);
    for (std::size_t j = 0; j < part.subdomains.size(); ++j) {
        const Subdomain& sub = part.subdomains[j];
        const CSparse& Ct = local[j].ext.C;
        for (int outer = 0; outer < Ct.outerSize(); ++outer) {
            for (CSparse::InnerIterator it(Ct, outer); it; ++it) {
                left(sub.dofs_ext.global[static_cast<std::size_t>(it.row())],
                     sub.dofs_ext.global[static_cast<std::size_t>(it.col())]) += it.value();
            }
        }
    }
    return largest_pencil_eigenvalue(left, CMatrix(global.C));
}

double estimate_sigma(const CoarseSpace& coarse, const EnergyMatrix& global) {
    const auto n = static_cast<int>(global.C.rows());
    guard_size(n);
    if (!coarse.assembled()) {
        return 1.0;
    }
    CMatrix Q(n, n);
    CVector unit = CVector::Zero(n);
    for (int c = 0; c < n; ++c) {
        unit[c] = 1.0;
        Q.col(c) = unit - coarse.apply_P0(unit);
        unit[c] = 0.0;
    }
    const CMatrix left = Q.adjoint() * (global.C * Q);
    const double top = largest_pencil_eigenvalue(left, CMatrix(global.C));
    return std::sqrt(std::max(0.0, top));
}

double EstimateReport::recomputed_rho() const { return sigma * std::sqrt(k0 * k1 * tau_eff); }

namespace {

double energy_sq(const CSparse& C, const CVector& v) { return std::max(0.0, v.dot(C * v).real()); }

} // namespace

EstimateReport contraction_report(const ContractionInputs& in, const CVector& u0, int n_iters,
                                  int threads) {
    if (!in.system || !in.partition || !in.coarse || !in.global_energy) {
        throw ConfigError("contraction report is missing inputs");
    }
    const GlobalSystem& sys = *in.system;
    const Partition& part = *in.partition;
    guard_size(sys.n);

    EstimateReport rep;
    rep.k0 = estimate_k0(part, *in.global_energy, in.energies);
    rep.k1 = estimate_k1(part, *in.global_energy, in.energies);
    rep.sigma = estimate_sigma(*in.coarse, *in.global_energy);
    rep.max_element_multiplicity = *std::max_element(part.element_multiplicity_ext.begin(),
                                                     part.element_multiplicity_ext.end());
    rep.coarse_dimension = static_cast<int>(in.coarse->dimension());
    for (const EigenBundle& eb : in.bundles) {
        rep.xi_per_subdomain.push_back(eb.xi());
        rep.xi = std::max(rep.xi, eb.xi());
        rep.tau_eff = std::max(rep.tau_eff, eb.tau_eff);
    }
    rep.rho = rep.recomputed_rho();
    rep.one_level_bound = rep.k0 * rep.k1 * rep.xi;

    ErrorReference ref{direct_solve(sys.A, sys.b), in.global_energy->C};
    const CSparse& C = in.global_energy->C;
    const TwoLevelOras pc(sys, part, in.solvers, in.coarse, threads);

    // Two-level sequence with the operator checks behind the contraction chain.
    SolverState two = start_state(sys, u0);
    for (int it = 0; it < n_iters; ++it) {
        const CVector e = ref.exact - two.u;
        const double before = std::sqrt(energy_sq(C, e));

        std::vector<CVector> projected(part.subdomains.size());
        for (std::size_t j = 0; j < part.subdomains.size(); ++j) {
            const Subdomain& sub = part.subdomains[j];
            const EigenBundle& eb = in.bundles[j];
            const LocalSolver& ls = in.solvers[j];
            const CVector e_ext = restrict_to(e, sub.dofs_ext);
            const CMatrix U = eb.eigenvectors.leftCols(eb.retained);
            const CVector pi_e = U * (U.adjoint() * (in.energies[j].ext.C * e_ext));
            projected[j] = ls.apply_R(pi_e);

            const CVector tail = ls.apply_K(e_ext - pi_e);
            const double lhs = energy_sq(in.energies[j].inner.C, tail);
            const double rhs = eb.tau_eff * energy_sq(in.energies[j].ext.C, e_ext);
            const double slack = 1e-12 * std::max(1.0, energy_sq(in.energies[j].ext.C, e_ext));
            if (lhs > rhs * (1.0 + 1e-8) + slack) {
                rep.max_tail_violation = std::max(rep.max_tail_violation,
                                                  rhs > 0.0 ? lhs / rhs - 1.0 : lhs);
            }
        }
        const CVector s = recombine(part, projected);
        const double snorm = s.norm();
        if (snorm > 0.0) {
            rep.max_kernel_residual =
                std::max(rep.max_kernel_residual, (s - in.coarse->apply_P0(s)).norm() / snorm);
        }

        two_level_iterate(two, pc);
        const double after = std::sqrt(energy_sq(C, ref.exact - two.u));
        const double ratio = before > 0.0 ? after / before : 0.0;
        rep.two_level_ratios.push_back(ratio);
        if (ratio > rep.rho * (1.0 + 1e-6)) {
            rep.two_level_within_bound = false;
            std::ostringstream msg;
            msg << "two-level ratio " << ratio << " exceeds rho " << rep.rho << " at iteration "
                << it;
            rep.diagnostics.push_back(msg.str());
        }
    }
    if (rep.max_kernel_residual > 1e-10) {
        rep.diagnostics.push_back("kernel property of I - P0 violated (residual " +
                                  std::to_string(rep.max_kernel_residual) + ")");
    }
    if (rep.max_tail_violation > 0.0) {
        rep.diagnostics.push_back("spectral tail bound violated (excess " +
                                  std::to_string(rep.max_tail_violation) + ")");
    }

    SolverState one = start_state(sys, u0);
    for (int it = 0; it < n_iters; ++it) {
        const double before = std::sqrt(energy_sq(C, ref.exact - one.u));
        oras_iterate(one, pc);
        const double after = std::sqrt(energy_sq(C, ref.exact - one.u));
        const double ratio = before > 0.0 ? after / before : 0.0;
        rep.one_level_ratios.push_back(ratio);
        if (ratio * ratio > rep.one_level_bound * (1.0 + 1e-6)) {
            rep.one_level_within_bound = false;
            std::ostringstream msg;
            msg << "one-level ratio^2 " << ratio * ratio << " exceeds k0 k1 xi "
                << rep.one_level_bound << " at iteration " << it;
            rep.diagnostics.push_back(msg.str());
        }
    }
    return rep;
}

void write_report(std::ostream& out, const EstimateReport& r) {
    out << std::setprecision(12);
    out << "k0 = " << r.k0 << '\n'
        << "k1 = " << r.k1 << '\n'
        << "max_element_multiplicity = " << r.max_element_multiplicity << '\n'
        << "xi = " << r.xi << '\n';
    for (std::size_t j = 0; j < r.xi_per_subdomain.size(); ++j) {
        out << "xi_" << j << " = " << r.xi_per_subdomain[j] << '\n';
    }
    out << "sigma = " << r.sigma << '\n'
        << "tau_eff = " << r.tau_eff << '\n'
        << "rho = " << r.rho << '\n'
        << "one_level_bound = " << r.one_level_bound << '\n'
        << "coarse_dimension = " << r.coarse_dimension << '\n'
        << "two_level_within_bound = " << (r.two_level_within_bound ? "true" : "false") << '\n'
        << "one_level_within_bound = " << (r.one_level_within_bound ? "true" : "false") << '\n'
        << "max_kernel_residual = " << r.max_kernel_residual << '\n'
        << "max_tail_violation = " << r.max_tail_violation << '\n';
    for (std::size_t k = 0; k < r.diagnostics.size(); ++k) {
        out << "diagnostic_" << k << " = " << r.diagnostics[k] << '\n';
    }
}

void write_ratio_csv(std::ostream& out, const EstimateReport& r) {
    out << "iter,two_level_ratio,one_level_ratio\n" << std::setprecision(12);
    const std::size_t n = std::max(r.two_level_ratios.size(), r.one_level_ratios.size());
    for (std::size_t k = 0; k < n; ++k) {
        out << k + 1 << ',';
        if (k < r.two_level_ratios.size()) out << r.two_level_ratios[k];
        out << ',';
        if (k < r.one_level_ratios.size()) out << r.one_level_ratios[k];
        out << '\n';
    }
}

} // namespace helmdd
