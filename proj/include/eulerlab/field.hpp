#pragma once

#include "eulerlab/fft.hpp"
#include "eulerlab/grid.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace eulerlab {

namespace detail {
struct SpectralCache {
    std::mutex mutex;
    std::optional<Spectrum> spectrum;
};
}  // namespace detail

/// Real scalar samples on a periodic grid with a lazily computed spectrum.
///
/// Copies share the spectral cache; any mutable access detaches it, so a stale
/// transform is never observed. Const access is safe from several threads.
class ScalarField {
public:
    /// Zero field.
    explicit ScalarField(const PeriodicGrid& grid);
    /// Takes ownership of row-major samples; throws ConfigError on size mismatch or non-finite data.
    ScalarField(const PeriodicGrid& grid, std::vector<double> values);

    static ScalarField constant(const PeriodicGrid& grid, double value);
    static ScalarField sample(const PeriodicGrid& grid, const std::function<double(const Point&)>& f);
    /// Inverse transform of a spectrum.
    static ScalarField from_spectrum(const Spectrum& spectrum);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Mutable view; invalidates the spectral cache.
    std::span<double> mutable_values();

    const Spectrum& spectrum() const;
    bool has_spectral_cache() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    struct Unchecked {};
    ScalarField(const PeriodicGrid& grid, std::vector<double> values, Unchecked);

    PeriodicGrid grid_;
    std::vector<double> values_;
    mutable std::shared_ptr<detail::SpectralCache> cache_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField operator*(const ScalarField& a, const ScalarField& b);

/// N scalar components on one grid, optionally flagged divergence-free.
class VelocityField {
public:
    /// Zero field (trivially divergence-free).
    explicit VelocityField(const PeriodicGrid& grid);
    /// Components must share one grid and number grid.dims().
    explicit VelocityField(std::vector<ScalarField> components, bool divergence_free = false);

    static VelocityField constant(const PeriodicGrid& grid, const Point& value);
    static VelocityField sample(const PeriodicGrid& grid, const std::function<Point(const Point&)>& f);

    const PeriodicGrid& grid() const noexcept { return components_.front().grid(); }
    int dims() const noexcept { return static_cast<int>(components_.size()); }
    const ScalarField& operator[](int axis) const { return components_[static_cast<std::size_t>(axis)]; }
    const std::vector<ScalarField>& components() const noexcept { return components_; }

    /// Mutable component access; clears the divergence-free flag.
    ScalarField& mutable_component(int axis);

    bool divergence_free() const noexcept { return divergence_free_; }
    void set_divergence_free(bool flag) noexcept { divergence_free_ = flag; }

    VelocityField& operator+=(const VelocityField& other);
    VelocityField& operator-=(const VelocityField& other);
    VelocityField& operator*=(double s);

private:
    std::vector<ScalarField> components_;
    bool divergence_free_ = false;
};

VelocityField operator+(VelocityField a, const VelocityField& b);
VelocityField operator-(VelocityField a, const VelocityField& b);
VelocityField operator*(double s, VelocityField a);

/// Throws GridMismatchError naming `where` unless the grids agree.
void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where);

}  // namespace eulerlab
