#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "helmdd/mesh.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

struct Subdomain;

/// Ascending list of global node ids plus the inverse lookup (-1 when absent).
struct DofMap {
    std::vector<int> global;
    std::vector<int> local;

    int size() const { return static_cast<int>(global.size()); }
    bool contains(int g) const { return local[static_cast<std::size_t>(g)] >= 0; }

    static DofMap identity(int n);
    static DofMap from_nodes(std::vector<int> nodes, int num_global);
    static DofMap from_elements(const Mesh& mesh, std::span<const int> elems);
};

std::vector<int> all_elements(const Mesh& mesh);

/// Element kernels for P1 triangles (unit coefficients).
Eigen::Matrix3d element_stiffness(const Mesh& mesh, int element);
Eigen::Matrix3d element_mass(const Mesh& mesh, int element);
Eigen::Matrix2d edge_mass(double length);

struct EdgeRef {
    int a = 0;
    int b = 0;
    double length = 0.0;
};

/// Edges of the union of `elems` that lie on the outer boundary.
std::vector<EdgeRef> outer_boundary_edges(const Mesh& mesh, std::span<const int> elems);
/// Edges of the union of `elems` on its boundary but not on the outer boundary.
std::vector<EdgeRef> interface_edges(const Mesh& mesh, std::span<const int> elems);

/// Real building blocks over an element set, indexed through `dofs`:
/// stiffness (mu grad, grad), mass (nu ., .), outer Robin edge mass and
/// interface edge mass.
struct RealForms {
    RSparse stiffness;
    RSparse mass;
    RSparse boundary_mass;
    RSparse interface_mass;
};

RealForms assemble_real_forms(const Mesh& mesh, const MediumField& medium,
                              std::span<const int> elems, const DofMap& dofs);

/// A[l, k] = a(phi_k, phi_l), b[l] = l(phi_l).
struct GlobalSystem {
    CSparse A;
    CVector b;
    int n = 0;
};

/// Energy matrix C = S + omega^2 M over an element set, indexed by `dofs`.
struct EnergyMatrix {
    CSparse C;
    DofMap dofs;
};

GlobalSystem assemble_global(const Mesh& mesh, const MediumField& medium, double omega);

/// Load vector over all elements.
CVector assemble_rhs(const Mesh& mesh, const MediumField& medium);
/// Load vector restricted to `elems` (outer Robin datum only on their outer edges).
CVector assemble_rhs(const Mesh& mesh, const MediumField& medium, std::span<const int> elems,
                     const DofMap& dofs);

EnergyMatrix assemble_energy(const Mesh& mesh, const MediumField& medium, double omega,
                             std::span<const int> elems);
EnergyMatrix assemble_energy(const Mesh& mesh, const MediumField& medium, double omega,
                             std::span<const int> elems, const DofMap& dofs);

/// a over `elems` (volume terms and outer Robin edges), nothing on interior cuts.
CSparse assemble_neumann(const Mesh& mesh, const MediumField& medium, double omega,
                         std::span<const int> elems, const DofMap& dofs);

/// B_j: a over Omega_j plus the -i omega impedance term on its interior interface.
CSparse assemble_local_impedance(const Mesh& mesh, const MediumField& medium, double omega,
                                 const Subdomain& sub);
/// A-tilde_j: a over the oversampled extension of Omega_j.
CSparse assemble_local_neumann(const Mesh& mesh, const MediumField& medium, double omega,
                               const Subdomain& sub);

} // namespace helmdd
