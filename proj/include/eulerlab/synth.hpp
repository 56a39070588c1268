#pragma once

#include "eulerlab/field.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace eulerlab {

enum class SynthKind { lacunary, taylor_green, shear, random_divfree, constant };

std::string to_string(SynthKind kind);
/// Throws ConfigError listing the valid names.
SynthKind synth_kind_from_string(const std::string& name);

struct SynthSpec {
    SynthKind kind = SynthKind::taylor_green;
    std::optional<double> alpha;   // lacunary
    std::optional<int> j_max;      // lacunary, finest octave
    std::optional<double> slope;   // random_divfree spectral slope
    std::uint64_t seed = 0;
    double amplitude = 1.0;
};

/// Divergence-free lacunary field with translation differences scaling like |xi|^alpha.
///
/// Octave j in 0..j_max carries four modes cos(pi K.x + phi) e with K = round(2^j (cos t, sin t))
/// for stratified angles t = t0 + m*pi/4 (t0 random per octave), amplitude |K|^-alpha and e a
/// random unit vector orthogonal to K. Wave vectors are unique across octaves; a collision
/// redraws the angle. The coarsest and finest octaves carry the weights of the geometric
/// tails they truncate, sqrt(1/(1-4^(alpha-1))) and sqrt(1/(1-4^-alpha)). Draws come from
/// CounterRng(seed, stream = j). Requires dims == 2 and every |K_a| within the dealiased band.
VelocityField lacunary_field(const SynthSpec& spec, const PeriodicGrid& grid);

/// amplitude * (sin(pi x1) cos(pi x2), -cos(pi x1) sin(pi x2)); dims == 2.
VelocityField taylor_green(const PeriodicGrid& grid, double amplitude);
/// Pressure of the Taylor-Green state from the Poisson equation: (amplitude^2/4)(cos 2pi x1 + cos 2pi x2).
ScalarField taylor_green_pressure(const PeriodicGrid& grid, double amplitude);

/// (profile(x2), 0); the profile must not vary in x1.
VelocityField shear_flow(const PeriodicGrid& grid, const ScalarField& profile);

/// Gaussian spectral coefficients with |u(k)| ~ |k|^-slope on the dealiased band, Leray
/// projected and scaled to kinetic energy amplitude^2 (the Taylor-Green energy at equal
/// amplitude). Draws come from CounterRng(seed, stream = component).
VelocityField random_divfree(const PeriodicGrid& grid, double slope, std::uint64_t seed, double amplitude = 1.0);

/// Dispatch on spec.kind. shear uses amplitude*sin(pi x2); constant uses (amplitude, 0, ...).
VelocityField synthesize(const SynthSpec& spec, const PeriodicGrid& grid);

/// Largest j_max admissible for a lacunary field on this grid.
int max_lacunary_octave(const PeriodicGrid& grid);

}  // namespace eulerlab
