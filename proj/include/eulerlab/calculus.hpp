#pragma once

#include "eulerlab/field.hpp"

namespace eulerlab {

// Spectral calculus. Derivatives multiply mode k by i*pi*k per axis, with the Nyquist
// mode's derivative set to zero; gradient, divergence and leray_project all use that same
// wavenumber so div(leray_project(u)) vanishes to round-off.

ScalarField partial(const ScalarField& f, int axis);
VelocityField gradient(const ScalarField& f);
ScalarField divergence(const VelocityField& u);
/// Scalar curl d1 u2 - d2 u1 (dims == 2 only).
ScalarField curl2d(const VelocityField& u);

/// Projection onto divergence-free fields: u(k) - k (k.u(k)) / |k|^2, identity at k = 0.
VelocityField leray_project(const VelocityField& u);

/// (sum |f|^p * spacing^N)^(1/p); vector fields use the pointwise Euclidean magnitude.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VelocityField& u, double p);
double max_norm(const ScalarField& f);
double max_norm(const VelocityField& u);

/// Riemann-sum integral over the torus.
double integral(const ScalarField& f);
double mean(const ScalarField& f);
/// Discrete L2 inner products.
double inner(const ScalarField& f, const ScalarField& g);
double inner(const VelocityField& u, const VelocityField& v);

/// max|div u| / max|u| (0 for the zero field).
double divergence_ratio(const VelocityField& u);

/// Zero every mode with some |k_a| above the 2/3-rule cutoff.
void dealias(Spectrum& s);
bool within_dealias_band(const PeriodicGrid& g, const ModeIndex& k);

/// Spectral resampling: truncation onto a coarser grid or zero padding onto a finer one.
/// Modes that do not exist on both grids (including Nyquist) are dropped.
ScalarField resample(const ScalarField& f, const PeriodicGrid& target);
VelocityField resample(const VelocityField& u, const PeriodicGrid& target);

/// Exact circular translation by whole grid steps: result(x) = f(x + steps*spacing).
ScalarField shift(const ScalarField& f, const ModeIndex& steps);

}  // namespace eulerlab
