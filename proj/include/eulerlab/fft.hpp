#pragma once

#include "eulerlab/grid.hpp"

#include <complex>
#include <span>
#include <vector>

namespace eulerlab {

using Complex = std::complex<double>;

/// Normalized half-spectrum of a real field: f(x) = sum_k c_k exp(i*pi*k.x'), where x' is
/// the sample offset from the first grid point. Coefficients are stored in FFTW r2c order.
struct Spectrum {
    PeriodicGrid grid;
    std::vector<Complex> coeffs;

    explicit Spectrum(const PeriodicGrid& g) : grid(g), coeffs(g.spectral_size()) {}
    Spectrum(const PeriodicGrid& g, std::vector<Complex> c) : grid(g), coeffs(std::move(c)) {}
};

/// Forward real-to-complex transform, normalized by n^N.
Spectrum forward_transform(const PeriodicGrid& grid, std::span<const double> values);
/// Inverse complex-to-real transform (input is not modified).
std::vector<double> inverse_transform(const Spectrum& spectrum);

}  // namespace eulerlab
