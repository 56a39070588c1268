#include "eulerlab/mollify.hpp"

#include "eulerlab/error.hpp"

#include <cmath>
#include <sstream>

namespace eulerlab {

double wrapped_displacement(const PeriodicGrid& grid, int i) noexcept {
    return grid.wavenumber_index(i) * grid.spacing();
}

int min_grid_for_epsilon(double epsilon) {
    int n = 8;
    while (4.0 * 2.0 / n > epsilon && n < (1 << 24)) n *= 2;
    return n;
}

MollifierKernel make_kernel(const PeriodicGrid& grid, double epsilon) {
    const double lo = MollifierKernel::min_epsilon(grid);
    if (!(epsilon >= lo * (1.0 - 1e-12))) {
        std::ostringstream msg;
        msg << "mollify: epsilon " << epsilon << " is below 4*spacing = " << lo << " on a "
            << grid.n_per_axis() << "-per-axis grid; need n_per_axis >= " << min_grid_for_epsilon(epsilon);
        throw ConfigError(msg.str());
    }
    if (!(epsilon <= MollifierKernel::kMaxEpsilon)) {
        std::ostringstream msg;
        msg << "mollify: epsilon " << epsilon << " exceeds the maximum " << MollifierKernel::kMaxEpsilon;
        throw ConfigError(msg.str());
    }

    std::vector<double> eta(grid.size(), 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const ModeIndex idx = grid.sample_index(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dims(); ++a) {
            const double z = wrapped_displacement(grid, idx[a]);
            r2 += z * z;
        }
        const double s = r2 / (epsilon * epsilon);
        if (s < 1.0) {
            eta[i] = std::exp(-1.0 / (1.0 - s));
            mass += eta[i];
        }
    }
    mass *= grid.cell_volume();
    for (double& v : eta) v /= mass;

    ScalarField values(grid, std::move(eta));
    const Spectrum& s = values.spectrum();
    std::vector<double> multiplier(s.coeffs.size());
    const double volume = grid.domain_volume();
    for (std::size_t i = 0; i < multiplier.size(); ++i) multiplier[i] = volume * s.coeffs[i].real();
    return MollifierKernel(epsilon, std::move(values), std::move(multiplier));
}

ScalarField mollify(const ScalarField& f, const MollifierKernel& kernel) {
    require_same_grid(f.grid(), kernel.grid(), "mollify");
    Spectrum s = f.spectrum();
    const auto& m = kernel.multiplier();
    for (std::size_t i = 0; i < m.size(); ++i) s.coeffs[i] *= m[i];
    return ScalarField::from_spectrum(s);
}

VelocityField mollify(const VelocityField& u, const MollifierKernel& kernel) {
    std::vector<ScalarField> comps;
    for (int a = 0; a < u.dims(); ++a) comps.push_back(mollify(u[a], kernel));
    return VelocityField(std::move(comps), u.divergence_free());
}

}  // namespace eulerlab
