#pragma once

// Spectral building blocks shared by the homogeneous and Boussinesq vorticity solvers.

#include "eulerlab/field.hpp"

#include <array>
#include <vector>

namespace eulerlab::detail {

struct SpectralOps {
    explicit SpectralOps(const PeriodicGrid& g);

    PeriodicGrid grid;
    std::vector<double> k0, k1;      // derivative wavenumbers (Nyquist zeroed)
    std::vector<double> inv_k2;      // 1/|k|^2, 0 where |k| = 0
    std::vector<unsigned char> keep;  // 2/3-rule mask
};

/// Per-grid operator tables (2D), built once and shared.
const SpectralOps& spectral_ops(const PeriodicGrid& g);

VelocityField velocity_from_vorticity(const Spectrum& omega, const std::array<double, 2>& mean);

/// -mask(u.grad w), zero mode forced to 0.
Spectrum advection_rhs(const Spectrum& omega, const VelocityField& u);

/// -mask(div(theta u)), zero mode forced to 0.
Spectrum transport_rhs(const ScalarField& theta, const VelocityField& u);

/// a + s*b coefficient-wise.
Spectrum axpy(const Spectrum& a, double s, const Spectrum& b);
/// a + dt/6 (k1 + 2 k2 + 2 k3 + k4).
Spectrum rk4_combine(const Spectrum& a, double dt, const Spectrum& k1, const Spectrum& k2, const Spectrum& k3,
                     const Spectrum& k4);

bool all_finite(const Spectrum& s);

/// Throws StepSizeError unless dt <= cfl*spacing/max|u|.
void check_cfl(const VelocityField& u, double dt, double cfl);

}  // namespace eulerlab::detail
