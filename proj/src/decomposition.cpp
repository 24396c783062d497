#include "helmdd/decomposition.hpp"

#include <algorithm>
#include <cmath>

namespace helmdd {

bool Subdomain::is_interface(int global_dof) const {
    return std::binary_search(interface_dofs.begin(), interface_dofs.end(), global_dof);
}

std::vector<int> grow_layers(const Mesh& mesh, std::vector<int> elems, int layers) {
    std::vector<char> in_set(static_cast<std::size_t>(mesh.num_elements()), 0);
    for (int e : elems) {
        in_set[static_cast<std::size_t>(e)] = 1;
    }
    for (int layer = 0; layer < layers; ++layer) {
        std::vector<int> added;
        for (int e : elems) {
            for (int v : mesh.elements()[static_cast<std::size_t>(e)]) {
                for (int f : mesh.node_elements()[static_cast<std::size_t>(v)]) {
                    if (!in_set[static_cast<std::size_t>(f)]) {
                        in_set[static_cast<std::size_t>(f)] = 1;
                        added.push_back(f);
                    }
                }
            }
        }
        if (added.empty()) {
            break;
        }
        elems.insert(elems.end(), added.begin(), added.end());
    }
    std::sort(elems.begin(), elems.end());
    return elems;
}

namespace {

std::vector<int> interface_nodes(const Mesh& mesh, const std::vector<int>& elems,
                                 const DofMap& dofs) {
    std::vector<char> in_set(static_cast<std::size_t>(mesh.num_elements()), 0);
    for (int e : elems) {
        in_set[static_cast<std::size_t>(e)] = 1;
    }
    std::vector<int> out;
    for (int v : dofs.global) {
        const auto& adj = mesh.node_elements()[static_cast<std::size_t>(v)];
        const bool cut = std::any_of(adj.begin(), adj.end(),
                                     [&](int f) { return !in_set[static_cast<std::size_t>(f)]; });
        if (cut) {
            out.push_back(v);
        }
    }
    return out;
}

} // namespace

Partition partition(const Mesh& mesh, int jx, int jy, int overlap, int oversample) {
    if (jx < 1 || jy < 1) {
        throw ConfigError("subdomain grid must be at least 1x1");
    }
    if (jx > mesh.nx() || jy > mesh.ny()) {
        throw ConfigError("more subdomain stripes than elements along an axis");
    }
    if (overlap < 1) {
        throw ConfigError("overlap must be at least one layer");
    }
    if (oversample < 1) {
        throw ConfigError("oversample must be at least one layer");
    }

    Partition part;
    part.jx = jx;
    part.jy = jy;
    part.overlap = overlap;
    part.oversample = oversample;
    part.num_nodes = mesh.num_nodes();

    const int num_sub = jx * jy;
    std::vector<std::vector<int>> base(static_cast<std::size_t>(num_sub));
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const int cell = e / 2;
        const int i = cell % mesh.nx();
        const int j = cell / mesh.nx();
        const int bx = static_cast<int>(static_cast<long>(i) * jx / mesh.nx());
        const int by = static_cast<int>(static_cast<long>(j) * jy / mesh.ny());
        base[static_cast<std::size_t>(by * jx + bx)].push_back(e);
    }

    part.subdomains.resize(static_cast<std::size_t>(num_sub));
    for (int s = 0; s < num_sub; ++s) {
        Subdomain& sub = part.subdomains[static_cast<std::size_t>(s)];
        sub.id = s;
        sub.elems = grow_layers(mesh, base[static_cast<std::size_t>(s)], overlap);
        sub.elems_ext = grow_layers(mesh, sub.elems, oversample);
        sub.dofs = DofMap::from_elements(mesh, sub.elems);
        sub.dofs_ext = DofMap::from_elements(mesh, sub.elems_ext);
        sub.interface_dofs = interface_nodes(mesh, sub.elems, sub.dofs);
        sub.inner_in_ext.reserve(sub.dofs.global.size());
        for (int g : sub.dofs.global) {
            sub.inner_in_ext.push_back(sub.dofs_ext.local[static_cast<std::size_t>(g)]);
        }
        if (num_sub > 1 && static_cast<int>(sub.elems.size()) == mesh.num_elements()) {
            part.warnings.push_back("subdomain " + std::to_string(s) +
                                    " covers the whole domain; overlap is too large");
        }
    }

    part.multiplicity.assign(static_cast<std::size_t>(mesh.num_nodes()), 0);
    part.multiplicity_ext.assign(static_cast<std::size_t>(mesh.num_nodes()), 0);
    part.element_multiplicity_ext.assign(static_cast<std::size_t>(mesh.num_elements()), 0);
    for (const Subdomain& sub : part.subdomains) {
        for (int g : sub.dofs.global) {
            ++part.multiplicity[static_cast<std::size_t>(g)];
        }
        for (int g : sub.dofs_ext.global) {
            ++part.multiplicity_ext[static_cast<std::size_t>(g)];
        }
        for (int e : sub.elems_ext) {
            ++part.element_multiplicity_ext[static_cast<std::size_t>(e)];
        }
    }

    part.neighbors.resize(static_cast<std::size_t>(num_sub));
    for (int a = 0; a < num_sub; ++a) {
        const Subdomain& sa = part.subdomains[static_cast<std::size_t>(a)];
        for (int b = 0; b < num_sub; ++b) {
            if (a == b) {
                continue;
            }
            const Subdomain& sb = part.subdomains[static_cast<std::size_t>(b)];
            const bool touch = std::any_of(sa.dofs.global.begin(), sa.dofs.global.end(),
                                           [&](int g) { return sb.dofs.contains(g); });
            if (touch) {
                part.neighbors[static_cast<std::size_t>(a)].push_back(b);
            }
        }
    }

    build_pou(part);
    return part;
}

void build_pou(Partition& part) {
    std::vector<double> total(static_cast<std::size_t>(part.num_nodes), 0.0);
    for (const Subdomain& sub : part.subdomains) {
        for (int g : sub.dofs.global) {
            if (!sub.is_interface(g)) {
                total[static_cast<std::size_t>(g)] += 1.0;
            }
        }
    }
    for (std::size_t g = 0; g < total.size(); ++g) {
        if (total[g] <= 0.0) {
            throw NumericalError("node " + std::to_string(g) +
                                 " has no positive partition-of-unity weight");
        }
    }
    for (Subdomain& sub : part.subdomains) {
        sub.chi.resize(sub.dofs.size());
        for (int k = 0; k < sub.dofs.size(); ++k) {
            const int g = sub.dofs.global[static_cast<std::size_t>(k)];
            sub.chi[k] = sub.is_interface(g) ? 0.0 : 1.0 / total[static_cast<std::size_t>(g)];
        }
    }
}

CVector restrict_to(const CVector& v, std::span<const int> positions) {
    CVector out(static_cast<Index>(positions.size()));
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const int p = positions[k];
        if (p < 0 || p >= v.size()) {
            throw std::out_of_range("restriction index out of range");
        }
        out[static_cast<Index>(k)] = v[p];
    }
    return out;
}

CVector extend_by_zero(const CVector& v, std::span<const int> positions, Index size) {
    if (static_cast<Index>(positions.size()) != v.size()) {
        throw std::out_of_range("extension size mismatch");
    }
    CVector out = CVector::Zero(size);
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const int p = positions[k];
        if (p < 0 || p >= size) {
            throw std::out_of_range("extension index out of range");
        }
        out[p] = v[static_cast<Index>(k)];
    }
    return out;
}

CVector restrict_ext_to_inner(const Subdomain& sub, const CVector& v_ext) {
    return restrict_to(v_ext, sub.inner_in_ext);
}

CVector extend_inner_to_ext(const Subdomain& sub, const CVector& v) {
    return extend_by_zero(v, sub.inner_in_ext, sub.dofs_ext.size());
}

CVector recombine(const Partition& part, std::span<const CVector> local) {
    CVector out = CVector::Zero(part.num_nodes);
    for (std::size_t j = 0; j < part.subdomains.size(); ++j) {
        const Subdomain& sub = part.subdomains[j];
        const CVector& v = local[j];
        for (int k = 0; k < sub.dofs.size(); ++k) {
            out[sub.dofs.global[static_cast<std::size_t>(k)]] += sub.chi[k] * v[k];
        }
    }
    return out;
}

} // namespace helmdd
