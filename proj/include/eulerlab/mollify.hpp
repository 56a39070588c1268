#pragma once

#include "eulerlab/field.hpp"

#include <vector>

namespace eulerlab {

/// Sampled bump eta(z) = c*exp(-1/(1-|z/eps|^2)) on |z| < eps (periodic distance),
/// normalized to unit discrete mass. Convolution is realized as multiplication by the
/// kernel's Fourier multiplier.
class MollifierKernel {
public:
    const PeriodicGrid& grid() const noexcept { return values_.grid(); }
    double epsilon() const noexcept { return epsilon_; }
    /// Kernel samples indexed by displacement: sample i sits at z = wrap(i*spacing).
    const ScalarField& values() const noexcept { return values_; }
    /// Real multiplier per half-spectrum coefficient (the kernel is even).
    const std::vector<double>& multiplier() const noexcept { return multiplier_; }

    /// Smallest admissible epsilon on a grid (4*spacing) and the largest (1/2).
    static double min_epsilon(const PeriodicGrid& g) noexcept { return 4.0 * g.spacing(); }
    static constexpr double kMaxEpsilon = 0.5;

private:
    friend MollifierKernel make_kernel(const PeriodicGrid& grid, double epsilon);
    MollifierKernel(double eps, ScalarField values, std::vector<double> multiplier)
        : epsilon_(eps), values_(std::move(values)), multiplier_(std::move(multiplier)) {}

    double epsilon_;
    ScalarField values_;
    std::vector<double> multiplier_;
};

/// Throws ConfigError for epsilon outside [4*spacing, 1/2]; the message names the
/// smallest grid that resolves the requested epsilon.
MollifierKernel make_kernel(const PeriodicGrid& grid, double epsilon);

/// Periodic distance of displacement index i from zero along one axis, in domain units.
double wrapped_displacement(const PeriodicGrid& grid, int i) noexcept;

/// Smallest power-of-two n_per_axis for which epsilon >= 4*spacing.
int min_grid_for_epsilon(double epsilon);

ScalarField mollify(const ScalarField& f, const MollifierKernel& kernel);
VelocityField mollify(const VelocityField& u, const MollifierKernel& kernel);

}  // namespace eulerlab
