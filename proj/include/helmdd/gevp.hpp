#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "helmdd/assembly.hpp"
#include "helmdd/local_ops.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

/// Energy matrices of one subdomain: on Omega_j (indexed by dofs) and on the
/// extension (indexed by dofs_ext).
struct SubdomainEnergy {
    EnergyMatrix inner;
    EnergyMatrix ext;
};

SubdomainEnergy assemble_subdomain_energy(const Mesh& mesh, const MediumField& medium,
                                          double omega, const Subdomain& sub);

/// Spectrum of the pencil (K_j^H C_j K_j, C-tilde_j).
struct EigenBundle {
    int subdomain = 0;
    RVector eigenvalues;  ///< descending, clipped at zero within roundoff
    CMatrix eigenvectors; ///< extension-indexed columns, C-tilde-orthonormal
    double min_raw_eigenvalue = 0.0; ///< smallest eigenvalue before clipping
    int retained = 0;
    double tau_eff = 0.0; ///< largest excluded eigenvalue, 0 if none excluded
    std::vector<std::string> warnings;

    double xi() const { return eigenvalues.size() ? eigenvalues[0] : 0.0; }
    Index size() const { return eigenvalues.size(); }
};

struct FilterStrategy {
    enum class Kind { Tau, Count, Percent };
    Kind kind = Kind::Count;
    double value = 0.0;

    static FilterStrategy tau(double t) { return {Kind::Tau, t}; }
    static FilterStrategy count(int m) { return {Kind::Count, static_cast<double>(m)}; }
    static FilterStrategy percent(double p) { return {Kind::Percent, p}; }
};

/// ceil(p * interface_size / 100), immune to binary rounding of p.
int percent_count(double percent, int interface_size);

/// Dense K_j = chi_j R_j, one column per extension dof.
CMatrix local_operator_matrix(const LocalSolver& ls);

/// Full dense solve by Cholesky reduction of C-tilde_j. Throws NumericalError
/// when C-tilde_j is not HPD or an eigenvalue falls below -1e-8.
EigenBundle solve_gevp(const LocalSolver& ls, const EnergyMatrix& inner,
                       const EnergyMatrix& ext);

/// Sets retained and tau_eff. Interface size comes from the bundle's subdomain.
void filter(EigenBundle& eb, const FilterStrategy& strategy, int interface_size);

/// Relative residuals of the three blocks of the mixed (saddle-point) form.
struct SaddlePointResidual {
    double block1 = 0.0;
    double block2 = 0.0;
    double block3 = 0.0;

    double max() const { return std::max(block1, std::max(block2, block3)); }
};

/// Block 3 is scaled by max(|lambda|, lambda_scale) ||C-tilde u||, so that
/// pairs in the numerically zero tail are judged against the top of the spectrum.
SaddlePointResidual verify_saddlepoint(const LocalSolver& ls, const SubdomainEnergy& energy,
                                       const CVector& u_ext, double lambda,
                                       double lambda_scale = 0.0);
SaddlePointResidual verify_saddlepoint(const LocalSolver& ls, const SubdomainEnergy& energy,
                                       const EigenBundle& eb, Index k);

} // namespace helmdd
