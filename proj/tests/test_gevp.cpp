#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "helmdd/gevp.hpp"
#include "helmdd/io.hpp"
#include "oracles.hpp"

using namespace helmdd;

namespace {

double c_norm_sq(const CSparse& C, const CVector& v) { return v.dot(C * v).real(); }

} // namespace

TEST(Gevp, SpectrumIsRealSortedAndOrthonormal) {
    auto s = fixture::desk_case(true);
    for (std::size_t j = 0; j < s->bundles.size(); ++j) {
        const EigenBundle& eb = s->bundles[j];
        const CMatrix Ct = oracle::to_dense(s->energies[j].ext.C);
        EXPECT_EQ(eb.size(), s->partition.subdomains[j].dofs_ext.size());
        EXPECT_GE(eb.min_raw_eigenvalue, -1e-8);
        EXPECT_GE(eb.eigenvalues.minCoeff(), 0.0);
        for (Index k = 1; k < eb.size(); ++k) EXPECT_LE(eb.eigenvalues[k], eb.eigenvalues[k - 1]);
        const CMatrix G = eb.eigenvectors.adjoint() * Ct * eb.eigenvectors;
        EXPECT_LT((G - CMatrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Gevp, EigenpairsSolveThePencil) {
    auto s = fixture::desk_case(true, 8, 4);
    for (std::size_t j = 0; j < s->bundles.size(); ++j) {
        const EigenBundle& eb = s->bundles[j];
        const CMatrix K = local_operator_matrix(s->solvers[j]);
        const CMatrix L = K.adjoint() * oracle::to_dense(s->energies[j].inner.C) * K;
        const CMatrix R = oracle::to_dense(s->energies[j].ext.C);
        const CMatrix resid = L * eb.eigenvectors - R * eb.eigenvectors * eb.eigenvalues.cast<Complex>().asDiagonal();
        EXPECT_LT(resid.norm(), 1e-9 * std::max(1.0, eb.xi()) * R.norm());
    }
}

TEST(Gevp, LargestEigenvalueMatchesPowerIteration) {
    auto s = fixture::desk_case(true);
    std::mt19937_64 rng(17);
    for (std::size_t j = 0; j < s->bundles.size(); ++j) {
        const CMatrix K = local_operator_matrix(s->solvers[j]);
        const CMatrix L = K.adjoint() * oracle::to_dense(s->energies[j].inner.C) * K;
        const double power = oracle::pencil_power_iteration(L, oracle::to_dense(s->energies[j].ext.C), 3000, rng);
        EXPECT_NEAR(s->bundles[j].xi(), power, 1e-8 * power);
    }
}

TEST(Gevp, SingleSubdomainSpectrumVanishes) {
    auto s = fixture::desk_case(true, 6, 3, 1, 1);
    EXPECT_EQ(s->bundles[0].xi(), 0.0);
    EXPECT_EQ(s->bundles[0].eigenvalues.maxCoeff(), 0.0);
}

TEST(Gevp, EigenvaluesDecay) {
    auto s = fixture::desk_case(true, 8, 4);
    for (std::size_t j = 0; j < s->bundles.size(); ++j) {
        const EigenBundle& eb = s->bundles[j];
        const auto iface = static_cast<Index>(s->partition.subdomains[j].interface_dofs.size());
        EXPECT_LT(eb.eigenvalues[iface], eb.xi());
        EXPECT_LT(eb.eigenvalues[eb.size() - 1], 1e-6);
        // the range of R_j is spanned by interface data, so the rank is at most |interface|
        for (Index k = iface; k < eb.size(); ++k) EXPECT_LT(eb.eigenvalues[k], 1e-10 * eb.xi());
    }
}

TEST(Gevp, Deterministic) {
    auto a = fixture::desk_case(true, 8, 4);
    auto b = fixture::desk_case(true, 8, 4);
    for (std::size_t j = 0; j < a->bundles.size(); ++j) {
        EXPECT_EQ(a->bundles[j].eigenvalues, b->bundles[j].eigenvalues);
        EXPECT_EQ(a->bundles[j].eigenvectors, b->bundles[j].eigenvectors);
    }
}

TEST(Gevp, RejectsIndefiniteRightMatrix) {
    auto s = fixture::desk_case(false, 8, 4);
    const SubdomainEnergy e = assemble_subdomain_energy(s->mesh, s->medium, s->omega, s->partition.subdomains[0]);
    EnergyMatrix bad = e.ext;
    bad.C = -bad.C;
    EXPECT_THROW(solve_gevp(s->solvers[0], e.inner, bad), NumericalError);
    EXPECT_THROW(solve_gevp(s->solvers[0], e.ext, e.ext), ConfigError);
}

TEST(Filter, PercentCount) {
    EXPECT_EQ(percent_count(7.5, 40), 3);
    EXPECT_EQ(percent_count(15.0, 40), 6);
    EXPECT_EQ(percent_count(25.0, 40), 10);
    EXPECT_EQ(percent_count(10.0, 30), 3);
    EXPECT_EQ(percent_count(12.5, 9), 2);
    EXPECT_EQ(percent_count(100.0, 9), 9);
    EXPECT_EQ(percent_count(0.1, 9), 1);
}

TEST(Filter, Strategies) {
    EigenBundle eb;
    eb.eigenvalues = (RVector(5) << 4.0, 2.0, 2.0, 0.5, 0.0).finished();
    filter(eb, FilterStrategy::tau(4.0), 40);
    EXPECT_EQ(eb.retained, 0);
    EXPECT_EQ(eb.tau_eff, 4.0);
    filter(eb, FilterStrategy::tau(10.0), 40);
    EXPECT_EQ(eb.retained, 0);
    filter(eb, FilterStrategy::count(0), 40);
    EXPECT_EQ(eb.retained, 0);
    filter(eb, FilterStrategy::tau(1.0), 40);
    EXPECT_EQ(eb.retained, 3);
    EXPECT_EQ(eb.tau_eff, 0.5);
    filter(eb, FilterStrategy::percent(7.5), 40);
    EXPECT_EQ(eb.retained, 3);
    EXPECT_TRUE(eb.warnings.empty());
    filter(eb, FilterStrategy::count(9), 40);
    EXPECT_EQ(eb.retained, 5);
    EXPECT_EQ(eb.tau_eff, 0.0);
    EXPECT_EQ(eb.warnings.size(), 1u);
    EXPECT_THROW(filter(eb, FilterStrategy::tau(0.0), 40), ConfigError);
    EXPECT_THROW(filter(eb, FilterStrategy::percent(0.0), 40), ConfigError);
    EXPECT_THROW(filter(eb, FilterStrategy::percent(101.0), 40), ConfigError);
    EXPECT_THROW(filter(eb, FilterStrategy::count(-1), 40), ConfigError);
}

TEST(Filter, TauAndCountAgree) {
    auto s = fixture::desk_case(true);
    for (EigenBundle eb : s->bundles) {
        for (double tau : {1e-3, 1e-1, 0.5 * eb.xi()}) {
            filter(eb, FilterStrategy::tau(tau), 0);
            const int m = eb.retained;
            const double t = eb.tau_eff;
            int count = 0;
            for (Index k = 0; k < eb.size(); ++k) count += eb.eigenvalues[k] > tau;
            EXPECT_EQ(m, count);
            filter(eb, FilterStrategy::count(count), 0);
            EXPECT_EQ(eb.retained, m);
            EXPECT_EQ(eb.tau_eff, t);
        }
    }
}

TEST(Saddle, EveryPairSatisfiesMixedForm) {
    auto s = fixture::desk_case(true);
    for (std::size_t j = 0; j < s->bundles.size(); ++j) {
        for (Index k = 0; k < s->bundles[j].size(); ++k) {
            const SaddlePointResidual r = verify_saddlepoint(s->solvers[j], s->energies[j], s->bundles[j], k);
            EXPECT_LE(r.max(), 1e-8) << "j=" << j << " k=" << k << " lambda=" << s->bundles[j].eigenvalues[k];
        }
    }
}

TEST(Saddle, SingleSubdomainPairs) {
    auto s = fixture::desk_case(true, 6, 3, 1, 1);
    for (Index k = 0; k < s->bundles[0].size(); ++k)
        EXPECT_LE(verify_saddlepoint(s->solvers[0], s->energies[0], s->bundles[0], k).max(), 1e-10);
}

TEST(Saddle, RejectsZeroVector) {
    auto s = fixture::desk_case(true, 8, 4);
    const CVector zero = CVector::Zero(s->partition.subdomains[0].dofs_ext.size());
    EXPECT_THROW(verify_saddlepoint(s->solvers[0], s->energies[0], zero, 1.0), ConfigError);
    EXPECT_THROW(verify_saddlepoint(s->solvers[0], s->energies[0], s->bundles[0], -1), std::out_of_range);
}

TEST(Saddle, DetectsWrongEigenvalue) {
    auto s = fixture::desk_case(true, 8, 4);
    const EigenBundle& eb = s->bundles[0];
    const auto r = verify_saddlepoint(s->solvers[0], s->energies[0], eb.eigenvectors.col(0), 0.5 * eb.xi());
    EXPECT_GT(r.block3, 0.1);
}

TEST(Gevp, SpectralTailBound) {
    auto s = fixture::desk_case(true);
    std::mt19937_64 rng(23);
    for (std::size_t j = 0; j < s->bundles.size(); ++j) {
        EigenBundle eb = s->bundles[j];
        filter(eb, FilterStrategy::percent(25.0), static_cast<int>(s->partition.subdomains[j].interface_dofs.size()));
        ASSERT_GT(eb.retained, 0);
        const CSparse& Ct = s->energies[j].ext.C;
        const CMatrix U = eb.eigenvectors.leftCols(eb.retained);
        for (int trial = 0; trial < 200; ++trial) {
            const CVector v = oracle::random_vector(Ct.rows(), rng);
            const CVector tail = v - U * (U.adjoint() * (Ct * v));
            const double lhs = c_norm_sq(s->energies[j].inner.C, s->solvers[j].apply_K(tail));
            EXPECT_LE(lhs, eb.tau_eff * c_norm_sq(Ct, v) * (1.0 + 1e-8));
        }
    }
}

TEST(Gevp, SpectrumDump) {
    EigenBundle eb;
    eb.eigenvalues = (RVector(2) << 3.5, 0.25).finished();
    std::ostringstream out;
    write_spectrum(out, eb);
    EXPECT_EQ(out.str().substr(0, 2), "1 ");
    EXPECT_NE(out.str().find("\n2 "), std::string::npos);
}
