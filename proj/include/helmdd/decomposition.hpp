#pragma once

#include <span>
#include <string>
#include <vector>

#include "helmdd/assembly.hpp"
#include "helmdd/mesh.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

/// One overlapping subdomain Omega_j and its oversampled extension.
struct Subdomain {
    int id = 0;
    std::vector<int> elems;     ///< Omega_j, ascending
    std::vector<int> elems_ext; ///< extension, ascending, superset of elems
    DofMap dofs;
    DofMap dofs_ext;
    /// Global ids of Omega_j nodes on its interior boundary, ascending.
    std::vector<int> interface_dofs;
    /// Position inside dofs_ext of every dofs entry (restriction ext -> Omega_j).
    std::vector<int> inner_in_ext;
    /// Partition-of-unity weights, indexed like dofs.
    RVector chi;

    bool is_interface(int global_dof) const;
};

struct Partition {
    std::vector<Subdomain> subdomains;
    int jx = 1;
    int jy = 1;
    int overlap = 1;
    int oversample = 1;
    int num_nodes = 0;
    std::vector<std::vector<int>> neighbors;
    std::vector<int> multiplicity;             ///< per node, Omega_j cover
    std::vector<int> multiplicity_ext;         ///< per node, extension cover
    std::vector<int> element_multiplicity_ext; ///< per element, extension cover
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(subdomains.size()); }
};

/// Element set grown by `layers` vertex-neighbour layers.
std::vector<int> grow_layers(const Mesh& mesh, std::vector<int> elems, int layers);

/// jx * jy stripe cells grown by `overlap` layers, extensions by `oversample`
/// more; partition of unity included.
Partition partition(const Mesh& mesh, int jx, int jy, int overlap, int oversample);

/// chi_j = w_j / sum_k w_k with w_j = 1 off the interface of Omega_j, 0 on it.
void build_pou(Partition& part);

CVector restrict_to(const CVector& v, std::span<const int> positions);
CVector extend_by_zero(const CVector& v, std::span<const int> positions, Index size);

inline CVector restrict_to(const CVector& global, const DofMap& dofs) {
    return restrict_to(global, dofs.global);
}
inline CVector extend_by_zero(const CVector& local, const DofMap& dofs) {
    return extend_by_zero(local, dofs.global, static_cast<Index>(dofs.local.size()));
}

/// Extension vector -> Omega_j vector.
CVector restrict_ext_to_inner(const Subdomain& sub, const CVector& v_ext);
/// Omega_j vector -> extension vector, zero outside Omega_j.
CVector extend_inner_to_ext(const Subdomain& sub, const CVector& v);

/// sum_j E_j (chi_j .* v_j)
CVector recombine(const Partition& part, std::span<const CVector> local);

} // namespace helmdd
