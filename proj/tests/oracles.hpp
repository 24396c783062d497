#pragma once

// Independent dense reference computations used by the tests. Nothing here
// calls into the library's assembly, solver or eigen paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "helmdd/mesh.hpp"
#include "helmdd/types.hpp"

namespace oracle {

using helmdd::Complex;
using helmdd::CMatrix;
using helmdd::CVector;
using helmdd::Mesh;
using helmdd::MediumField;

/// Coefficients (a, b, c) of phi_k = a + b x + c y from the vertex Vandermonde system.
inline Eigen::Matrix3d basis_coefficients(const Mesh& mesh, int e) {
    Eigen::Matrix3d V;
    const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
    for (int k = 0; k < 3; ++k) {
        const auto& p = mesh.nodes()[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
        V(k, 0) = 1.0;
        V(k, 1) = p.x;
        V(k, 2) = p.y;
    }
    return V.inverse(); // column k holds the coefficients of phi_k
}

inline double triangle_area(const Mesh& mesh, int e) {
    const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
    const auto& a = mesh.nodes()[static_cast<std::size_t>(t[0])];
    const auto& b = mesh.nodes()[static_cast<std::size_t>(t[1])];
    const auto& c = mesh.nodes()[static_cast<std::size_t>(t[2])];
    return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

inline Eigen::Matrix3d stiffness(const Mesh& mesh, int e) {
    const Eigen::Matrix3d C = basis_coefficients(mesh, e);
    Eigen::Matrix3d K;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            K(r, c) = (C(1, r) * C(1, c) + C(2, r) * C(2, c)) * triangle_area(mesh, e);
    return K;
}

/// Edge-midpoint quadrature, exact for the quadratic products phi_r phi_c.
inline Eigen::Matrix3d mass(const Mesh& mesh, int e) {
    const Eigen::Matrix3d C = basis_coefficients(mesh, e);
    const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
    Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
    for (int q = 0; q < 3; ++q) {
        const auto& a = mesh.nodes()[static_cast<std::size_t>(t[static_cast<std::size_t>(q)])];
        const auto& b = mesh.nodes()[static_cast<std::size_t>(t[static_cast<std::size_t>((q + 1) % 3)])];
        const double x = 0.5 * (a.x + b.x), y = 0.5 * (a.y + b.y);
        Eigen::Vector3d phi;
        for (int k = 0; k < 3; ++k) phi[k] = C(0, k) + C(1, k) * x + C(2, k) * y;
        M += phi * phi.transpose() * (triangle_area(mesh, e) / 3.0);
    }
    return M;
}

/// Simpson's rule on an edge, exact for the quadratic products.
inline Eigen::Matrix2d edge_mass(double len) {
    Eigen::Matrix2d M;
    // phi_a = (1, 1/2, 0), phi_b = (0, 1/2, 1) at the Simpson nodes
    const double w[3] = {len / 6.0, 4.0 * len / 6.0, len / 6.0};
    const double pa[3] = {1.0, 0.5, 0.0};
    const double pb[3] = {0.0, 0.5, 1.0};
    M.setZero();
    for (int q = 0; q < 3; ++q) {
        M(0, 0) += w[q] * pa[q] * pa[q];
        M(0, 1) += w[q] * pa[q] * pb[q];
        M(1, 0) += w[q] * pb[q] * pa[q];
        M(1, 1) += w[q] * pb[q] * pb[q];
    }
    return M;
}

inline bool geometric_outer(const Mesh& mesh, int a, int b) {
    const auto& pa = mesh.nodes()[static_cast<std::size_t>(a)];
    const auto& pb = mesh.nodes()[static_cast<std::size_t>(b)];
    const auto& bd = mesh.bounds();
    auto same = [](double u, double v, double w) { return u == w && v == w; };
    return same(pa.x, pb.x, bd.xmin) || same(pa.x, pb.x, bd.xmax) || same(pa.y, pb.y, bd.ymin) ||
           same(pa.y, pb.y, bd.ymax);
}

struct Edge {
    int a, b;
    double len;
    bool outer;
};

/// Edges that belong to exactly one element of the set.
inline std::vector<Edge> boundary_of(const Mesh& mesh, const std::vector<int>& elems) {
    std::map<std::pair<int, int>, int> count;
    for (int e : elems) {
        const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
        for (int k = 0; k < 3; ++k) {
            int a = t[static_cast<std::size_t>(k)], b = t[static_cast<std::size_t>((k + 1) % 3)];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    }
    std::vector<Edge> out;
    for (const auto& [k, c] : count) {
        if (c != 1) continue;
        const auto& pa = mesh.nodes()[static_cast<std::size_t>(k.first)];
        const auto& pb = mesh.nodes()[static_cast<std::size_t>(k.second)];
        out.push_back({k.first, k.second, std::hypot(pb.x - pa.x, pb.y - pa.y),
                       geometric_outer(mesh, k.first, k.second)});
    }
    return out;
}

/// Dense form over an element set, indexed by global node id (n x n):
/// stiff_w * S + mass_w * M + outer_w * B_outer + iface_w * B_interface.
inline CMatrix dense_form(const Mesh& mesh, const MediumField& med, const std::vector<int>& elems,
                          Complex stiff_w, Complex mass_w, Complex outer_w, Complex iface_w) {
    const int n = mesh.num_nodes();
    CMatrix A = CMatrix::Zero(n, n);
    for (int e : elems) {
        const Eigen::Matrix3d K = stiffness(mesh, e) * med.mu[static_cast<std::size_t>(e)];
        const Eigen::Matrix3d M = mass(mesh, e) * med.nu[static_cast<std::size_t>(e)];
        const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                A(t[static_cast<std::size_t>(r)], t[static_cast<std::size_t>(c)]) +=
                    stiff_w * K(r, c) + mass_w * M(r, c);
    }
    for (const Edge& ed : boundary_of(mesh, elems)) {
        const Eigen::Matrix2d Me = edge_mass(ed.len);
        const Complex w = ed.outer ? outer_w : iface_w;
        const int ids[2] = {ed.a, ed.b};
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) A(ids[r], ids[c]) += w * Me(r, c);
    }
    return A;
}

inline CMatrix dense_helmholtz(const Mesh& mesh, const MediumField& med, double omega,
                               const std::vector<int>& elems, bool interface_impedance) {
    return dense_form(mesh, med, elems, 1.0, -omega * omega, Complex(0.0, -omega),
                      interface_impedance ? Complex(0.0, -omega) : Complex(0.0));
}

inline CMatrix dense_energy(const Mesh& mesh, const MediumField& med, double omega,
                            const std::vector<int>& elems) {
    return dense_form(mesh, med, elems, 1.0, omega * omega, 0.0, 0.0);
}

/// Submatrix on sorted global ids.
inline CMatrix submatrix(const CMatrix& A, const std::vector<int>& rows, const std::vector<int>& cols) {
    CMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = A(rows[r], cols[c]);
    return out;
}

inline CVector random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    CVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v[k] = Complex(d(rng), d(rng));
    return v;
}

/// Power iteration for the largest eigenvalue of the definite pencil (L, R),
/// using R-inner products and a dense R solve.
inline double pencil_power_iteration(const CMatrix& L, const CMatrix& R, int iters,
                                     std::mt19937_64& rng) {
    Eigen::FullPivLU<CMatrix> lu(R);
    CVector x = random_vector(L.rows(), rng);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        CVector y = lu.solve(L * x);
        const double nrm = std::sqrt(std::abs(y.dot(R * y)));
        x = y / nrm;
        lambda = x.dot(L * x).real() / x.dot(R * x).real();
    }
    return lambda;
}

inline CMatrix to_dense(const helmdd::CSparse& A) { return CMatrix(A); }

inline double rel_diff(const CMatrix& a, const CMatrix& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

inline double energy_sq(const CMatrix& C, const CVector& v) { return v.dot(C * v).real(); }

} // namespace oracle
