#include "helmdd/io.hpp"

#include <algorithm>
#include <iomanip>
#include <tuple>
#include <vector>

namespace helmdd {

void write_matrix_coordinates(std::ostream& out, const CSparse& A) {
    std::vector<std::tuple<Index, Index, Complex>> entries;
    entries.reserve(static_cast<std::size_t>(A.nonZeros()));
    for (int outer = 0; outer < A.outerSize(); ++outer) {
        for (CSparse::InnerIterator it(A, outer); it; ++it) {
            entries.emplace_back(it.row(), it.col(), it.value());
        }
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    out << std::setprecision(17);
    for (const auto& [r, c, v] : entries) {
        out << r + 1 << ' ' << c + 1 << ' ' << v.real() << ' ' << v.imag() << '\n';
    }
}

void write_partition(std::ostream& out, const Partition& part) {
    out << "subdomains " << part.size() << " grid " << part.jx << 'x' << part.jy << " overlap "
        << part.overlap << " oversample " << part.oversample << '\n';
    out << std::setprecision(17);
    for (const Subdomain& sub : part.subdomains) {
        out << "subdomain " << sub.id << " dofs " << sub.dofs.size() << " ext "
            << sub.dofs_ext.size() << " interface " << sub.interface_dofs.size() << '\n';
        for (int k = 0; k < sub.dofs.size(); ++k) {
            out << sub.dofs.global[static_cast<std::size_t>(k)] << ' ' << sub.chi[k] << '\n';
        }
    }
}

void write_spectrum(std::ostream& out, const EigenBundle& eb) {
    out << std::setprecision(17);
    for (Index k = 0; k < eb.size(); ++k) {
        out << k + 1 << ' ' << eb.eigenvalues[k] << '\n';
    }
}

void write_coarse_summary(std::ostream& out, const CoarseSpace& cs) {
    out << "dimension = " << cs.dimension() << '\n' << std::setprecision(12);
    for (std::size_t j = 0; j < cs.retained_counts.size(); ++j) {
        out << "subdomain_" << j << "_retained = " << cs.retained_counts[j] << '\n';
        out << "subdomain_" << j << "_tau_eff = " << cs.tau_eff[j] << '\n';
    }
    double tmax = 0.0;
    for (double t : cs.tau_eff) {
        tmax = std::max(tmax, t);
    }
    out << "tau_eff = " << tmax << '\n';
}

void write_convergence_csv(std::ostream& out, const SolverState& state, bool with_times) {
    out << "iter,residual_rel,energy_error_rel,time_s\n" << std::setprecision(12);
    for (std::size_t k = 0; k < state.residuals.size(); ++k) {
        out << k << ',' << state.residuals[k] << ',';
        if (k < state.energy_errors.size()) {
            out << state.energy_errors[k];
        }
        out << ',';
        if (with_times && k < state.times.size()) {
            out << state.times[k];
        }
        out << '\n';
    }
}

} // namespace helmdd
