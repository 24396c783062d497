#include "helmdd/solver.hpp"

#include <sstream>

#include "helmdd/parallel.hpp"

namespace helmdd {

TwoLevelOras::TwoLevelOras(const GlobalSystem& system, const Partition& part,
                           std::span<const LocalSolver> solvers, const CoarseSpace* coarse,
                           int threads)
    : system_(&system), part_(&part), solvers_(solvers), coarse_(coarse), threads_(threads) {
    if (solvers.size() != part.subdomains.size()) {
        throw ConfigError("one local solver per subdomain expected");
    }
}

CVector TwoLevelOras::subdomain_sweep(const CVector& r) const {
    std::vector<CVector> local(solvers_.size());
    parallel_for(static_cast<int>(solvers_.size()), threads_, [&](int j) {
        local[static_cast<std::size_t>(j)] = solvers_[static_cast<std::size_t>(j)].oras_correction(r);
    });
    return recombine(*part_, local);
}

CVector TwoLevelOras::apply(const CVector& r) const {
    CVector w = subdomain_sweep(r);
    if (has_coarse()) {
        w += coarse_->coarse_correct(r - system_->A * w);
    }
    return w;
}

namespace {

void record(SolverState& state, const GlobalSystem& sys, const ErrorReference* reference) {
    const double bnorm = sys.b.norm();
    const double res = (sys.b - sys.A * state.u).norm();
    state.residuals.push_back(bnorm > 0.0 ? res / bnorm : res);
    state.final_true_residual = state.residuals.back();
    if (reference) {
        state.energy_errors.push_back(reference->relative_error(state.u));
    }
}

} // namespace

SolverState start_state(const GlobalSystem& system, const CVector& u0,
                        const ErrorReference* reference) {
    SolverState st;
    st.u = u0;
    record(st, system, reference);
    st.times.push_back(0.0);
    return st;
}

void oras_iterate(SolverState& state, const TwoLevelOras& pc, const ErrorReference* reference) {
    const GlobalSystem& sys = pc.system();
    state.u += pc.apply_one_level(sys.b - sys.A * state.u);
    ++state.iterations;
    record(state, sys, reference);
}

void two_level_iterate(SolverState& state, const TwoLevelOras& pc,
                       const ErrorReference* reference) {
    const GlobalSystem& sys = pc.system();
    state.u += pc.apply(sys.b - sys.A * state.u);
    ++state.iterations;
    record(state, sys, reference);
}

CVector direct_solve(const CSparse& A, const CVector& b) {
    CSparse Ac = A;
    Ac.makeCompressed();
    Eigen::SparseLU<CSparse> lu(Ac);
    if (lu.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "global matrix is singular: " << lu.lastErrorMessage();
        throw NumericalError(msg.str());
    }
    CVector x = lu.solve(b);
    return x;
}

CVector one_level_error_map(const Partition& part, std::span<const LocalSolver> solvers,
                            const CVector& e, int threads) {
    std::vector<CVector> local(solvers.size());
    parallel_for(static_cast<int>(solvers.size()), threads, [&](int j) {
        const Subdomain& sub = part.subdomains[static_cast<std::size_t>(j)];
        local[static_cast<std::size_t>(j)] =
            solvers[static_cast<std::size_t>(j)].apply_R(restrict_to(e, sub.dofs_ext));
    });
    return recombine(part, local);
}

} // namespace helmdd
