#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "helmdd/io.hpp"
#include "helmdd/solver.hpp"
#include "oracles.hpp"

using namespace helmdd;

namespace {

LinearOperator matvec(const CSparse& A) {
    return [&A](const CVector& x) -> CVector { return A * x; };
}

const LinearOperator identity_op = [](const CVector& x) -> CVector { return x; };

} // namespace

TEST(Stationary, SingleSubdomainIsExact) {
    auto s = fixture::desk_case(false, 8, 4, 1, 1);
    const TwoLevelOras pc(s->system, s->partition, s->solvers);
    std::mt19937_64 rng(1);
    SolverState st = start_state(s->system, oracle::random_vector(s->system.n, rng));
    oras_iterate(st, pc);
    EXPECT_EQ(st.iterations, 1);
    EXPECT_LT(st.residuals.back(), 1e-12);
    EXPECT_EQ(st.residuals.size(), 2u);
}

TEST(Stationary, ExactSolutionIsFixedPoint) {
    auto s = fixture::desk_case(false);
    const TwoLevelOras pc(s->system, s->partition, s->solvers);
    const CVector exact = direct_solve(s->system.A, s->system.b);
    SolverState st = start_state(s->system, exact);
    oras_iterate(st, pc);
    EXPECT_LT((st.u - exact).norm(), 1e-12 * exact.norm());
}

TEST(Stationary, OneLevelErrorIdentity) {
    auto s = fixture::desk_case(false);
    const TwoLevelOras pc(s->system, s->partition, s->solvers);
    const CVector exact = direct_solve(s->system.A, s->system.b);
    std::mt19937_64 rng(31);
    SolverState st = start_state(s->system, oracle::random_vector(s->system.n, rng));
    for (int it = 0; it < 10; ++it) {
        const CVector predicted = one_level_error_map(s->partition, s->solvers, exact - st.u);
        oras_iterate(st, pc);
        const CVector e = exact - st.u;
        EXPECT_LT((e - predicted).norm(), 1e-10 * e.norm()) << it;
    }
}

TEST(Stationary, TwoLevelErrorIdentity) {
    auto s = fixture::desk_case(true, 16, 8, 2, 2);
    apply_coarse(*s, FilterStrategy::percent(25.0));
    const TwoLevelOras pc(s->system, s->partition, s->solvers, &s->coarse);
    ASSERT_TRUE(pc.has_coarse());
    const CVector exact = direct_solve(s->system.A, s->system.b);
    std::mt19937_64 rng(32);
    SolverState st = start_state(s->system, oracle::random_vector(s->system.n, rng));
    for (int it = 0; it < 10; ++it) {
        const CVector y = one_level_error_map(s->partition, s->solvers, exact - st.u);
        const CVector predicted = y - s->coarse.apply_P0(y);
        two_level_iterate(st, pc);
        const CVector e = exact - st.u;
        EXPECT_LT((e - predicted).norm(), 1e-10 * e.norm()) << it;
    }
}

TEST(Stationary, EmptyCoarseSpaceIsOneLevel) {
    auto s = fixture::desk_case(true);
    apply_coarse(*s, FilterStrategy::count(0));
    const TwoLevelOras one(s->system, s->partition, s->solvers);
    const TwoLevelOras two(s->system, s->partition, s->solvers, &s->coarse);
    std::mt19937_64 rng(2);
    const CVector u0 = oracle::random_vector(s->system.n, rng);
    SolverState a = start_state(s->system, u0), b = start_state(s->system, u0);
    for (int it = 0; it < 3; ++it) {
        oras_iterate(a, one);
        two_level_iterate(b, two);
        EXPECT_EQ(a.u, b.u);
    }
}

TEST(Stationary, FullRangeCoarseSpaceKillsTheError) {
    auto s = fixture::desk_case(true);
    double xi = 0.0;
    for (const auto& eb : s->bundles) xi = std::max(xi, eb.xi());
    // every direction of the range of K_j is retained
    apply_coarse(*s, FilterStrategy::tau(1e-9 * xi));
    const TwoLevelOras pc(s->system, s->partition, s->solvers, &s->coarse);
    const CVector exact = direct_solve(s->system.A, s->system.b);
    std::mt19937_64 rng(3);
    SolverState st = start_state(s->system, oracle::random_vector(s->system.n, rng));
    const double e0 = (exact - st.u).norm();
    two_level_iterate(st, pc);
    EXPECT_LT((exact - st.u).norm(), 1e-6 * e0);
}

TEST(Stationary, IdentityCoarseSpaceIsExact) {
    auto s = fixture::desk_case(false, 8, 4, 2, 2);
    const CoarseSpace full = coarse_from_basis(CMatrix::Identity(s->system.n, s->system.n), s->system.A);
    const TwoLevelOras pc(s->system, s->partition, s->solvers, &full);
    std::mt19937_64 rng(4);
    SolverState st = start_state(s->system, oracle::random_vector(s->system.n, rng));
    two_level_iterate(st, pc);
    EXPECT_LT(st.residuals.back(), 1e-12);
}

TEST(Preconditioner, LinearAndDeterministic) {
    auto s = fixture::desk_case(true);
    apply_coarse(*s, FilterStrategy::percent(15.0));
    const TwoLevelOras pc(s->system, s->partition, s->solvers, &s->coarse);
    EXPECT_EQ(pc.apply(CVector::Zero(s->system.n)).norm(), 0.0);
    std::mt19937_64 rng(5);
    const CVector r = oracle::random_vector(s->system.n, rng);
    const Complex alpha(0.3, -1.7);
    const CVector mr = pc.apply(r);
    EXPECT_LT((pc.apply(alpha * r) - alpha * mr).norm(), 1e-12 * std::abs(alpha) * mr.norm());
    const CVector r2 = oracle::random_vector(s->system.n, rng);
    EXPECT_LT((pc.apply(r + r2) - mr - pc.apply(r2)).norm(), 1e-12 * mr.norm());
    EXPECT_EQ(pc.apply(r), mr);
}

TEST(Preconditioner, StationaryIterationMatchesTwoLevel) {
    auto s = fixture::desk_case(true);
    apply_coarse(*s, FilterStrategy::percent(25.0));
    const TwoLevelOras pc(s->system, s->partition, s->solvers, &s->coarse);
    std::mt19937_64 rng(6);
    const CVector u0 = oracle::random_vector(s->system.n, rng);
    SolverState st = start_state(s->system, u0);
    CVector u = u0;
    for (int it = 0; it < 5; ++it) {
        two_level_iterate(st, pc);
        // written out: one sweep from the current residual, then the coarse correction
        const CVector r = s->system.b - s->system.A * u;
        CVector w = CVector::Zero(s->system.n);
        for (std::size_t j = 0; j < s->solvers.size(); ++j) {
            const Subdomain& sub = s->partition.subdomains[j];
            w += extend_by_zero(sub.chi.cast<Complex>().cwiseProduct(s->solvers[j].solve(restrict_to(r, sub.dofs))), sub.dofs);
        }
        u += w + s->coarse.coarse_correct(r - s->system.A * w);
        EXPECT_LT((st.u - u).norm(), 1e-13 * u.norm()) << it;
    }
}

TEST(Preconditioner, ParallelSweepIsBitwiseSerial) {
    auto s = fixture::desk_case(true, 16, 8, 2, 2);
    apply_coarse(*s, FilterStrategy::percent(25.0));
    const TwoLevelOras serial(s->system, s->partition, s->solvers, &s->coarse, 1);
    const TwoLevelOras threaded(s->system, s->partition, s->solvers, &s->coarse, 3);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 3; ++trial) {
        const CVector r = oracle::random_vector(s->system.n, rng);
        EXPECT_EQ(serial.apply(r), threaded.apply(r));
    }
    const CVector e = oracle::random_vector(s->system.n, rng);
    EXPECT_EQ(one_level_error_map(s->partition, s->solvers, e, 1), one_level_error_map(s->partition, s->solvers, e, 4));
}

TEST(Gmres, ZeroRightHandSide) {
    auto s = fixture::desk_case(false, 8, 4);
    const SolverState st = gmres(matvec(s->system.A), CVector::Zero(s->system.n), identity_op, {});
    EXPECT_TRUE(st.converged);
    EXPECT_EQ(st.iterations, 0);
    EXPECT_EQ(st.u.norm(), 0.0);
}

TEST(Gmres, ExactPreconditionerConvergesInOneStep) {
    auto s = fixture::desk_case(false, 8, 4, 1, 1);
    const TwoLevelOras pc(s->system, s->partition, s->solvers);
    const SolverState st = gmres(matvec(s->system.A), s->system.b,
                                 [&](const CVector& r) { return pc.apply(r); }, {});
    EXPECT_TRUE(st.converged);
    EXPECT_EQ(st.iterations, 1);
    EXPECT_LE(st.final_true_residual, 1e-8);
}

TEST(Gmres, MatchesDirectSolveInEnergyNorm) {
    auto s = fixture::desk_case(true, 8, 8, 2, 1);
    const ErrorReference ref{direct_solve(s->system.A, s->system.b),
                             assemble_energy(s->mesh, s->medium, s->omega, all_elements(s->mesh)).C};
    for (bool coarse : {false, true}) {
        apply_coarse(*s, coarse ? std::optional(FilterStrategy::percent(25.0)) : std::nullopt);
        const TwoLevelOras pc(s->system, s->partition, s->solvers, &s->coarse);
        const SolverState st = gmres(matvec(s->system.A), s->system.b,
                                     [&](const CVector& r) { return pc.apply(r); }, {}, nullptr, &ref);
        EXPECT_TRUE(st.converged);
        EXPECT_LE(st.final_true_residual, 1e-8);
        EXPECT_LT(ref.relative_error(st.u), 1e-7);
        EXPECT_EQ(st.energy_errors.size(), st.residuals.size());
        for (std::size_t k = 1; k < st.residuals.size(); ++k) EXPECT_LE(st.residuals[k], st.residuals[k - 1] * (1 + 1e-12));
    }
}

TEST(Gmres, RestartedStillConverges) {
    auto s = fixture::desk_case(false);
    const TwoLevelOras pc(s->system, s->partition, s->solvers);
    GmresOptions opts;
    opts.restart = 4;
    const SolverState st = gmres(matvec(s->system.A), s->system.b,
                                 [&](const CVector& r) { return pc.apply(r); }, opts);
    EXPECT_TRUE(st.converged);
    const CVector exact = direct_solve(s->system.A, s->system.b);
    EXPECT_LT((st.u - exact).norm(), 1e-6 * exact.norm());
}

TEST(Gmres, IterationLimit) {
    auto s = fixture::desk_case(false);
    GmresOptions opts;
    opts.maxit = 3;
    const SolverState st = gmres(matvec(s->system.A), s->system.b, identity_op, opts);
    EXPECT_FALSE(st.converged);
    EXPECT_EQ(st.iterations, 3);
    EXPECT_EQ(st.residuals.size(), 4u);
    EXPECT_GT(st.final_true_residual, 1e-8);
    GmresOptions bad;
    bad.tol = 0.0;
    EXPECT_THROW(gmres(matvec(s->system.A), s->system.b, identity_op, bad), ConfigError);
}

TEST(Gmres, InitialGuessUsed) {
    auto s = fixture::desk_case(false, 8, 4);
    const CVector exact = direct_solve(s->system.A, s->system.b);
    const SolverState st = gmres(matvec(s->system.A), s->system.b, identity_op, {}, &exact);
    EXPECT_TRUE(st.converged);
    EXPECT_EQ(st.iterations, 0);
}

TEST(Direct, IdentityAndResidual) {
    CSparse I(5, 5);
    I.setIdentity();
    const CVector b = CVector::LinSpaced(5, 1.0, 5.0);
    EXPECT_EQ(direct_solve(I, b), b);
    auto s = fixture::desk_case(false);
    const CVector u = direct_solve(s->system.A, s->system.b);
    EXPECT_LE((s->system.b - s->system.A * u).norm(), 1e-12 * s->system.b.norm());
    EXPECT_THROW(direct_solve(CSparse(3, 3), CVector::Ones(3)), NumericalError);
}

TEST(Direct, MatchesDenseFactorization) {
    auto s = fixture::desk_case(false, 2, 2, 1, 1);
    const CMatrix A = oracle::dense_helmholtz(s->mesh, s->medium, s->omega, all_elements(s->mesh), false);
    const CVector ref = A.fullPivLu().solve(s->system.b);
    EXPECT_LT((direct_solve(s->system.A, s->system.b) - ref).norm(), 1e-12 * ref.norm());
}

TEST(ConvergenceCsv, Layout) {
    SolverState st;
    st.residuals = {1.0, 0.5};
    st.energy_errors = {0.9, 0.3};
    st.times = {0.0, 0.1};
    std::ostringstream a, b;
    write_convergence_csv(a, st, false);
    write_convergence_csv(b, st, true);
    EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "iter,residual_rel,energy_error_rel,time_s");
    std::istringstream lines(a.str());
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        if (rows > 1) EXPECT_EQ(line.back(), ',');
    }
    EXPECT_EQ(rows, 3);
    EXPECT_NE(b.str(), a.str());
}
