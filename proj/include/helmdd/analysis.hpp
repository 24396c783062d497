#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "helmdd/assembly.hpp"
#include "helmdd/coarse.hpp"
#include "helmdd/decomposition.hpp"
#include "helmdd/gevp.hpp"
#include "helmdd/local_ops.hpp"
#include "helmdd/solver.hpp"

namespace helmdd {

/// Dense analysis is refused above this many global dofs.
inline constexpr int kAnalysisMaxDofs = 5000;

/// Largest eigenvalue of the Hermitian-definite pencil (left, right).
double largest_pencil_eigenvalue(const CMatrix& left, const CMatrix& right);

/// Zero-extension matrix from the stacked interface-free dofs of every Omega_j.
CMatrix stacked_extension(const Partition& part);

/// sup ||sum_j E_j u_j||^2 / sum_j ||u_j||^2 over u_j vanishing on the interface of Omega_j.
double estimate_k0(const Partition& part, const EnergyMatrix& global,
                   std::span<const SubdomainEnergy> local);

/// sup sum_j ||u|ext_j||^2 / ||u||^2.
double estimate_k1(const Partition& part, const EnergyMatrix& global,
                   std::span<const SubdomainEnergy> local);

/// Energy-norm operator norm of I - P0.
double estimate_sigma(const CoarseSpace& coarse, const EnergyMatrix& global);

struct EstimateReport {
    double k0 = 0.0;
    double k1 = 0.0;
    double xi = 0.0;
    std::vector<double> xi_per_subdomain;
    double sigma = 0.0;
    double tau_eff = 0.0;
    double rho = 0.0;
    double one_level_bound = 0.0;
    int max_element_multiplicity = 0;
    int coarse_dimension = 0;

    std::vector<double> two_level_ratios;
    std::vector<double> one_level_ratios;
    bool two_level_within_bound = true;
    bool one_level_within_bound = true;

    /// Operator checks along the two-level error sequence.
    double max_kernel_residual = 0.0;   ///< ||(I-P0) sum E chi R Pi e|| / ||sum E chi R Pi e||
    double max_tail_violation = 0.0;    ///< max ||K(I-Pi)e||^2 / (tau_eff ||e||^2) - 1, clipped at 0
    std::vector<std::string> diagnostics;

    double recomputed_rho() const;
};

struct ContractionInputs {
    const GlobalSystem* system = nullptr;
    const Partition* partition = nullptr;
    std::span<const LocalSolver> solvers;
    std::span<const SubdomainEnergy> energies;
    std::span<const EigenBundle> bundles;
    const CoarseSpace* coarse = nullptr;
    const EnergyMatrix* global_energy = nullptr;
};

/// Measures the constants, then runs n_iters one- and two-level stationary
/// iterations from u0 and checks every energy-error ratio against its bound.
EstimateReport contraction_report(const ContractionInputs& in, const CVector& u0, int n_iters,
                                  int threads = 1);

/// Flat "key = value" report.
void write_report(std::ostream& out, const EstimateReport& report);
/// "iter,two_level_ratio,one_level_ratio"
void write_ratio_csv(std::ostream& out, const EstimateReport& report);

} // namespace helmdd
