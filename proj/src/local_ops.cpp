#include "helmdd/local_ops.hpp"

#include <sstream>

#include "helmdd/parallel.hpp"

namespace helmdd {

LocalSolver::LocalSolver(const Subdomain& sub, CSparse impedance, CSparse extension,
                         double omega)
    : sub_(&sub),
      impedance_(std::move(impedance)),
      extension_(std::move(extension)),
      lu_(std::make_unique<Eigen::SparseLU<CSparse>>()) {
    impedance_.makeCompressed();
    lu_->compute(impedance_);
    if (lu_->info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "local impedance matrix of subdomain " << sub.id
            << " is singular at omega = " << omega << ": " << lu_->lastErrorMessage();
        throw NumericalError(msg.str());
    }
}

CVector LocalSolver::solve(const CVector& r) const {
    CVector x = lu_->solve(r);
    return x;
}

CVector LocalSolver::solve_adjoint(const CVector& r) const {
    // B^H = conj(B) for complex symmetric B.
    CVector x = lu_->solve(r.conjugate());
    return x.conjugate();
}

CVector LocalSolver::apply_R(const CVector& v_ext) const {
    const CVector inner = restrict_ext_to_inner(*sub_, v_ext);
    const CVector ext_action = extension_ * v_ext;
    const CVector rhs = impedance_ * inner - restrict_ext_to_inner(*sub_, ext_action);
    return solve(rhs);
}

CVector LocalSolver::apply_K(const CVector& v_ext) const {
    return sub_->chi.cast<Complex>().cwiseProduct(apply_R(v_ext));
}

CVector LocalSolver::oras_correction(const CVector& r_global) const {
    return solve(restrict_to(r_global, sub_->dofs));
}

CVector LocalSolver::oras_correction_local(const CVector& b_ext, const CVector& u_ext) const {
    const CVector r_ext = b_ext - extension_ * u_ext;
    return solve(restrict_ext_to_inner(*sub_, r_ext));
}

LocalSolver factorize_local(const Mesh& mesh, const MediumField& medium, double omega,
                            const Subdomain& sub) {
    return LocalSolver(sub, assemble_local_impedance(mesh, medium, omega, sub),
                       assemble_local_neumann(mesh, medium, omega, sub), omega);
}

std::vector<LocalSolver> factorize_all(const Mesh& mesh, const MediumField& medium,
                                       double omega, const Partition& part, int threads) {
    std::vector<std::unique_ptr<LocalSolver>> slots(part.subdomains.size());
    parallel_for(part.size(), threads, [&](int j) {
        slots[static_cast<std::size_t>(j)] = std::make_unique<LocalSolver>(
            factorize_local(mesh, medium, omega, part.subdomains[static_cast<std::size_t>(j)]));
    });
    std::vector<LocalSolver> out;
    out.reserve(slots.size());
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

} // namespace helmdd
