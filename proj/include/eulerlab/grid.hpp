#pragma once

#include <array>
#include <cstddef>
#include <numbers>

namespace eulerlab {

inline constexpr double kPi = std::numbers::pi;

/// Largest spatial dimension supported by the field calculus.
inline constexpr int kMaxDims = 3;

using Point = std::array<double, kMaxDims>;
using ModeIndex = std::array<int, kMaxDims>;

/// Uniform discretization of the flat torus [-1,1)^N.
///
/// Sample i along an axis sits at x = -1 + i*spacing. Integer wavenumbers use the
/// symmetric range [-n/2, n/2-1]; the physical wavenumber of index k is pi*k because
/// the domain period is 2.
class PeriodicGrid {
public:
    int dims() const noexcept { return dims_; }
    int n_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return spacing_; }

    /// Number of physical samples, n^N.
    std::size_t size() const noexcept { return size_; }
    /// Number of stored half-spectrum coefficients, n^(N-1) * (n/2+1).
    std::size_t spectral_size() const noexcept { return spectral_size_; }
    /// Length of the last (halved) spectral axis.
    int half_length() const noexcept { return n_ / 2 + 1; }

    /// Cell volume spacing^N, the quadrature weight.
    double cell_volume() const noexcept { return cell_volume_; }
    /// |Omega| = 2^N.
    double domain_volume() const noexcept { return static_cast<double>(1 << dims_); }

    double coordinate(int i) const noexcept { return -1.0 + i * spacing_; }

    /// Symmetric integer wavenumber of storage index i along a full axis.
    int wavenumber_index(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }
    /// Physical wavenumber pi*k of storage index i.
    double wavenumber(int i) const noexcept { return kPi * wavenumber_index(i); }
    /// Wavenumber used for differentiation: the Nyquist mode is mapped to zero.
    double derivative_wavenumber(int i) const noexcept {
        const int k = wavenumber_index(i);
        return k == -n_ / 2 ? 0.0 : kPi * k;
    }
    bool is_nyquist(int k) const noexcept { return k == -n_ / 2; }

    /// Largest |k| kept by the 2/3-rule dealiasing filter.
    int dealias_cutoff() const noexcept { return n_ / 3; }

    /// Decode a flat half-spectrum index into per-axis integer wavenumbers.
    ModeIndex mode(std::size_t flat) const noexcept;
    /// Decode a flat physical index into per-axis sample indices.
    ModeIndex sample_index(std::size_t flat) const noexcept;
    /// Physical coordinates of a flat physical index (unused axes are zero).
    Point point(std::size_t flat) const noexcept;
    /// Flat physical index of per-axis sample indices (taken modulo n).
    std::size_t flat_index(const ModeIndex& idx) const noexcept;

    friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) noexcept {
        return a.dims_ == b.dims_ && a.n_ == b.n_;
    }

private:
    friend PeriodicGrid make_grid(int dims, int n_per_axis);
    PeriodicGrid(int dims, int n);

    int dims_;
    int n_;
    double spacing_;
    double cell_volume_;
    std::size_t size_;
    std::size_t spectral_size_;
};

/// Build a grid; throws ConfigError unless 2 <= dims <= 3 and n_per_axis is a power of two >= 8.
PeriodicGrid make_grid(int dims, int n_per_axis);

bool is_power_of_two(long long v) noexcept;

}  // namespace eulerlab
