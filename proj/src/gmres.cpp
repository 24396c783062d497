#include "helmdd/gmres.hpp"

#include <chrono>
#include <cmath>

namespace helmdd {

double ErrorReference::energy_norm(const CVector& v) const {
    return std::sqrt(std::max(0.0, v.dot(C * v).real()));
}

double ErrorReference::relative_error(const CVector& u) const {
    const double ref = energy_norm(exact);
    const double err = energy_norm(exact - u);
    return ref > 0.0 ? err / ref : err;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Back substitution on the leading k x k block of the rotated Hessenberg matrix.
CVector upper_solve(const CMatrix& H, const CVector& g, int k) {
    return H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
}

} // namespace

SolverState gmres(const LinearOperator& A, const CVector& b, const LinearOperator& M,
                  const GmresOptions& options, const CVector* x0,
                  const ErrorReference* reference) {
    if (!(options.tol > 0.0) || options.restart < 1 || options.maxit < 0) {
        throw ConfigError("invalid GMRES options");
    }
    const auto t0 = Clock::now();
    SolverState st;
    const Index n = b.size();
    st.u = x0 ? *x0 : CVector::Zero(n);
    const double bnorm = b.norm();

    auto record = [&](double rel, const CVector* x) {
        st.residuals.push_back(rel);
        st.times.push_back(seconds_since(t0));
        if (reference && x) {
            st.energy_errors.push_back(reference->relative_error(*x));
        }
    };

    if (bnorm == 0.0) {
        st.u.setZero();
        st.converged = true;
        record(0.0, &st.u);
        st.solve_time = seconds_since(t0);
        return st;
    }

    CVector r = b - A(st.u);
    double beta = r.norm();
    st.final_true_residual = beta / bnorm;
    record(beta / bnorm, &st.u);
    if (beta / bnorm <= options.tol) {
        st.converged = true;
        st.solve_time = seconds_since(t0);
        return st;
    }

    const int m = options.restart;
    while (st.iterations < options.maxit) {
        CMatrix V(n, m + 1);
        CMatrix H = CMatrix::Zero(m + 1, m);
        std::vector<double> cs(static_cast<std::size_t>(m));
        std::vector<Complex> sn(static_cast<std::size_t>(m));
        CVector g = CVector::Zero(m + 1);
        g[0] = beta;
        V.col(0) = r / beta;

        int k = 0;
        bool done = false;
        while (k < m && st.iterations < options.maxit) {
            CVector w = A(M(V.col(k)));
            // Modified Gram-Schmidt with one reorthogonalization pass.
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= k; ++i) {
                    const Complex h = V.col(i).dot(w);
                    H(i, k) += h;
                    w -= h * V.col(i);
                }
            }
            const double hnext = w.norm();
            H(k + 1, k) = hnext;

            for (int i = 0; i < k; ++i) {
                const Complex a = H(i, k);
                const Complex c = H(i + 1, k);
                H(i, k) = cs[static_cast<std::size_t>(i)] * a + sn[static_cast<std::size_t>(i)] * c;
                H(i + 1, k) = -std::conj(sn[static_cast<std::size_t>(i)]) * a +
                              cs[static_cast<std::size_t>(i)] * c;
            }
            const Complex h1 = H(k, k);
            const Complex h2 = H(k + 1, k);
            const double d = std::sqrt(std::norm(h1) + std::norm(h2));
            if (std::abs(h1) == 0.0) {
                cs[static_cast<std::size_t>(k)] = 0.0;
                sn[static_cast<std::size_t>(k)] = d > 0.0 ? std::conj(h2) / d : Complex(1.0);
            } else {
                cs[static_cast<std::size_t>(k)] = std::abs(h1) / d;
                sn[static_cast<std::size_t>(k)] = (h1 / std::abs(h1)) * std::conj(h2) / d;
            }
            H(k, k) = cs[static_cast<std::size_t>(k)] * h1 + sn[static_cast<std::size_t>(k)] * h2;
            H(k + 1, k) = 0.0;
            g[k + 1] = -std::conj(sn[static_cast<std::size_t>(k)]) * g[k];
            g[k] = cs[static_cast<std::size_t>(k)] * g[k];

            ++k;
            ++st.iterations;
            const double rel = std::abs(g[k]) / bnorm;
            if (reference) {
                const CVector x = st.u + M(V.leftCols(k) * upper_solve(H, g, k));
                record(rel, &x);
            } else {
                record(rel, nullptr);
            }
            if (rel <= options.tol || hnext <= 1e-14 * beta) {
                done = true;
                break;
            }
            V.col(k) = w / hnext;
        }

        st.u += M(V.leftCols(k) * upper_solve(H, g, k));
        r = b - A(st.u);
        beta = r.norm();
        st.final_true_residual = beta / bnorm;
        if (beta / bnorm <= options.tol) {
            st.converged = true;
            break;
        }
        if (done && beta == 0.0) {
            break;
        }
    }
    st.solve_time = seconds_since(t0);
    return st;
}

} // namespace helmdd
