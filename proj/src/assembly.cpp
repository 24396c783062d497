#include "helmdd/assembly.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

#include "helmdd/decomposition.hpp"

namespace helmdd {

DofMap DofMap::identity(int n) {
    DofMap m;
    m.global.resize(static_cast<std::size_t>(n));
    std::iota(m.global.begin(), m.global.end(), 0);
    m.local = m.global;
    return m;
}

DofMap DofMap::from_nodes(std::vector<int> nodes, int num_global) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    DofMap m;
    m.global = std::move(nodes);
    m.local.assign(static_cast<std::size_t>(num_global), -1);
    for (std::size_t k = 0; k < m.global.size(); ++k) {
        m.local[static_cast<std::size_t>(m.global[k])] = static_cast<int>(k);
    }
    return m;
}

DofMap DofMap::from_elements(const Mesh& mesh, std::span<const int> elems) {
    std::vector<int> nodes;
    nodes.reserve(elems.size() * 3);
    for (int e : elems) {
        for (int v : mesh.elements()[static_cast<std::size_t>(e)]) {
            nodes.push_back(v);
        }
    }
    return from_nodes(std::move(nodes), mesh.num_nodes());
}

Eigen::Matrix3d element_stiffness(const Mesh& mesh, int element) {
    const auto& t = mesh.elements()[static_cast<std::size_t>(element)];
    const auto& p = mesh.nodes();
    Eigen::Matrix<double, 2, 3> grad;
    for (int k = 0; k < 3; ++k) {
        const Point& b = p[static_cast<std::size_t>(t[static_cast<std::size_t>((k + 1) % 3)])];
        const Point& c = p[static_cast<std::size_t>(t[static_cast<std::size_t>((k + 2) % 3)])];
        grad(0, k) = b.y - c.y;
        grad(1, k) = c.x - b.x;
    }
    const double area = mesh.area(element);
    return grad.transpose() * grad / (4.0 * area);
}

Eigen::Matrix3d element_mass(const Mesh& mesh, int element) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Constant(1.0);
    m.diagonal().setConstant(2.0);
    return m * (mesh.area(element) / 12.0);
}

Eigen::Matrix2d edge_mass(double length) {
    Eigen::Matrix2d m;
    m << 2.0, 1.0, 1.0, 2.0;
    return m * (length / 6.0);
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

/// Edge -> number of elements of the set containing it (ordered map keeps
/// enumeration deterministic).
std::map<EdgeKey, std::pair<int, double>> edge_counts(const Mesh& mesh,
                                                      std::span<const int> elems) {
    std::map<EdgeKey, std::pair<int, double>> counts;
    for (int e : elems) {
        for (int k = 0; k < 3; ++k) {
            const auto [a, b] = mesh.edge_nodes(e, k);
            auto& entry = counts[key(a, b)];
            entry.first += 1;
            entry.second = mesh.edge_length(e, k);
        }
    }
    return counts;
}

} // namespace

std::vector<EdgeRef> outer_boundary_edges(const Mesh& mesh, std::span<const int> elems) {
    std::vector<EdgeRef> out;
    for (const auto& [k, v] : edge_counts(mesh, elems)) {
        if (v.first == 1 && mesh.on_boundary(k.first, k.second)) {
            out.push_back({k.first, k.second, v.second});
        }
    }
    return out;
}

std::vector<EdgeRef> interface_edges(const Mesh& mesh, std::span<const int> elems) {
    std::vector<EdgeRef> out;
    for (const auto& [k, v] : edge_counts(mesh, elems)) {
        if (v.first == 1 && !mesh.on_boundary(k.first, k.second)) {
            out.push_back({k.first, k.second, v.second});
        }
    }
    return out;
}

namespace {

RSparse edge_matrix(const std::vector<EdgeRef>& edges, const DofMap& dofs) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(edges.size() * 4);
    for (const EdgeRef& edge : edges) {
        const Eigen::Matrix2d m = edge_mass(edge.length);
        const int ids[2] = {dofs.local[static_cast<std::size_t>(edge.a)],
                            dofs.local[static_cast<std::size_t>(edge.b)]};
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                trip.emplace_back(ids[r], ids[c], m(r, c));
            }
        }
    }
    RSparse out(dofs.size(), dofs.size());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

CSparse combine(const RSparse& s, double ws, const RSparse& m, double wm,
                const RSparse& b, Complex wb) {
    CSparse out = s.cast<Complex>() * Complex(ws) + m.cast<Complex>() * Complex(wm) +
                  b.cast<Complex>() * wb;
    out.makeCompressed();
    return out;
}

} // namespace

RealForms assemble_real_forms(const Mesh& mesh, const MediumField& medium,
                              std::span<const int> elems, const DofMap& dofs) {
    std::vector<Eigen::Triplet<double>> ts;
    std::vector<Eigen::Triplet<double>> tm;
    ts.reserve(elems.size() * 9);
    tm.reserve(elems.size() * 9);
    for (int e : elems) {
        const Eigen::Matrix3d ke = element_stiffness(mesh, e) * medium.mu[static_cast<std::size_t>(e)];
        const Eigen::Matrix3d me = element_mass(mesh, e) * medium.nu[static_cast<std::size_t>(e)];
        const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
        for (int r = 0; r < 3; ++r) {
            const int lr = dofs.local[static_cast<std::size_t>(t[static_cast<std::size_t>(r)])];
            for (int c = 0; c < 3; ++c) {
                const int lc = dofs.local[static_cast<std::size_t>(t[static_cast<std::size_t>(c)])];
                ts.emplace_back(lr, lc, ke(r, c));
                tm.emplace_back(lr, lc, me(r, c));
            }
        }
    }
    RealForms f;
    f.stiffness.resize(dofs.size(), dofs.size());
    f.stiffness.setFromTriplets(ts.begin(), ts.end());
    f.mass.resize(dofs.size(), dofs.size());
    f.mass.setFromTriplets(tm.begin(), tm.end());
    f.boundary_mass = edge_matrix(outer_boundary_edges(mesh, elems), dofs);
    f.interface_mass = edge_matrix(interface_edges(mesh, elems), dofs);
    return f;
}

std::vector<int> all_elements(const Mesh& mesh) {
    std::vector<int> e(static_cast<std::size_t>(mesh.num_elements()));
    std::iota(e.begin(), e.end(), 0);
    return e;
}

CSparse assemble_neumann(const Mesh& mesh, const MediumField& medium, double omega,
                         std::span<const int> elems, const DofMap& dofs) {
    const RealForms f = assemble_real_forms(mesh, medium, elems, dofs);
    return combine(f.stiffness, 1.0, f.mass, -omega * omega, f.boundary_mass,
                   Complex(0.0, -omega));
}

GlobalSystem assemble_global(const Mesh& mesh, const MediumField& medium, double omega) {
    if (!(omega > 0.0)) {
        throw ConfigError("omega must be positive");
    }
    medium.validate(mesh);
    const std::vector<int> elems = all_elements(mesh);
    const DofMap dofs = DofMap::identity(mesh.num_nodes());
    GlobalSystem sys;
    sys.n = mesh.num_nodes();
    sys.A = assemble_neumann(mesh, medium, omega, elems, dofs);
    sys.b = assemble_rhs(mesh, medium, elems, dofs);
    return sys;
}

CVector assemble_rhs(const Mesh& mesh, const MediumField& medium) {
    const std::vector<int> elems = all_elements(mesh);
    return assemble_rhs(mesh, medium, elems, DofMap::identity(mesh.num_nodes()));
}

CVector assemble_rhs(const Mesh& mesh, const MediumField& medium, std::span<const int> elems,
                     const DofMap& dofs) {
    CVector b = CVector::Zero(dofs.size());
    const auto& nodes = mesh.nodes();
    if (medium.source.amplitude != Complex(0.0, 0.0)) {
        // Edge-midpoint rule: weight area/3, each midpoint sees phi = 1/2 on its two vertices.
        for (int e : elems) {
            const auto& t = mesh.elements()[static_cast<std::size_t>(e)];
            const double w = mesh.area(e) / 3.0;
            for (int k = 0; k < 3; ++k) {
                const int a = t[static_cast<std::size_t>(k)];
                const int c = t[static_cast<std::size_t>((k + 1) % 3)];
                const Point mid{0.5 * (nodes[static_cast<std::size_t>(a)].x + nodes[static_cast<std::size_t>(c)].x),
                                0.5 * (nodes[static_cast<std::size_t>(a)].y + nodes[static_cast<std::size_t>(c)].y)};
                const Complex fw = medium.source(mid) * (0.5 * w);
                b[dofs.local[static_cast<std::size_t>(a)]] += fw;
                b[dofs.local[static_cast<std::size_t>(c)]] += fw;
            }
        }
    }

    // Robin datum: constant per edge, so the 2-point Gauss rule gives g * len / 2 per node.
    std::vector<char> in_set(static_cast<std::size_t>(mesh.num_elements()), 0);
    for (int e : elems) {
        in_set[static_cast<std::size_t>(e)] = 1;
    }
    const auto& edges = mesh.boundary_edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!in_set[static_cast<std::size_t>(edges[k].element)] || medium.g[k] == Complex(0.0, 0.0)) {
            continue;
        }
        const auto [a, c] = mesh.edge_nodes(edges[k].element, edges[k].local_edge);
        const Complex gl = medium.g[k] * (0.5 * mesh.edge_length(edges[k].element, edges[k].local_edge));
        b[dofs.local[static_cast<std::size_t>(a)]] += gl;
        b[dofs.local[static_cast<std::size_t>(c)]] += gl;
    }
    return b;
}

EnergyMatrix assemble_energy(const Mesh& mesh, const MediumField& medium, double omega,
                             std::span<const int> elems) {
    if (elems.empty()) {
        throw ConfigError("energy matrix needs a nonempty element set");
    }
    return assemble_energy(mesh, medium, omega, elems, DofMap::from_elements(mesh, elems));
}

EnergyMatrix assemble_energy(const Mesh& mesh, const MediumField& medium, double omega,
                             std::span<const int> elems, const DofMap& dofs) {
    if (elems.empty()) {
        throw ConfigError("energy matrix needs a nonempty element set");
    }
    const RealForms f = assemble_real_forms(mesh, medium, elems, dofs);
    EnergyMatrix em;
    em.C = combine(f.stiffness, 1.0, f.mass, omega * omega, f.boundary_mass, Complex(0.0));
    em.dofs = dofs;
    return em;
}

CSparse assemble_local_impedance(const Mesh& mesh, const MediumField& medium, double omega,
                                 const Subdomain& sub) {
    if (sub.elems.empty()) {
        throw ConfigError("subdomain has no elements");
    }
    const RealForms f = assemble_real_forms(mesh, medium, sub.elems, sub.dofs);
    RSparse robin = f.boundary_mass + f.interface_mass;
    return combine(f.stiffness, 1.0, f.mass, -omega * omega, robin, Complex(0.0, -omega));
}

CSparse assemble_local_neumann(const Mesh& mesh, const MediumField& medium, double omega,
                               const Subdomain& sub) {
    if (sub.elems_ext.empty()) {
        throw ConfigError("subdomain extension has no elements");
    }
    return assemble_neumann(mesh, medium, omega, sub.elems_ext, sub.dofs_ext);
}

} // namespace helmdd
