#include "eulerlab/field.hpp"

#include "eulerlab/error.hpp"

#include <cmath>
#include <string>

namespace eulerlab {

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where) {
    if (!(a == b)) {
        throw GridMismatchError(std::string(where) + ": operands live on different grids (" +
                                std::to_string(a.n_per_axis()) + "^" + std::to_string(a.dims()) +
                                " vs " + std::to_string(b.n_per_axis()) + "^" +
                                std::to_string(b.dims()) + ")");
    }
}

ScalarField::ScalarField(const PeriodicGrid& grid)
    : grid_(grid), values_(grid.size(), 0.0), cache_(std::make_shared<detail::SpectralCache>()) {}

ScalarField::ScalarField(const PeriodicGrid& grid, std::vector<double> values, Unchecked)
    : grid_(grid), values_(std::move(values)), cache_(std::make_shared<detail::SpectralCache>()) {}

ScalarField::ScalarField(const PeriodicGrid& grid, std::vector<double> values)
    : ScalarField(grid, std::move(values), Unchecked{}) {
    if (values_.size() != grid_.size()) {
        throw ConfigError("field: expected " + std::to_string(grid_.size()) + " samples, got " +
                          std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw ConfigError("field: samples must be finite");
    }
}

ScalarField ScalarField::constant(const PeriodicGrid& grid, double value) {
    return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::sample(const PeriodicGrid& grid, const std::function<double(const Point&)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.point(i));
    return ScalarField(grid, std::move(v));
}

ScalarField ScalarField::from_spectrum(const Spectrum& spectrum) {
    return ScalarField(spectrum.grid, inverse_transform(spectrum), Unchecked{});
}

std::span<double> ScalarField::mutable_values() {
    cache_ = std::make_shared<detail::SpectralCache>();
    return values_;
}

const Spectrum& ScalarField::spectrum() const {
    std::lock_guard lock(cache_->mutex);
    if (!cache_->spectrum) cache_->spectrum.emplace(forward_transform(grid_, values_));
    return *cache_->spectrum;
}

bool ScalarField::has_spectral_cache() const {
    std::lock_guard lock(cache_->mutex);
    return cache_->spectrum.has_value();
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field +=");
    auto v = mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field -=");
    auto v = mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& x : mutable_values()) x *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "field product");
    ScalarField out = a;
    auto v = out.mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= b[i];
    return out;
}

VelocityField::VelocityField(const PeriodicGrid& grid)
    : components_(static_cast<std::size_t>(grid.dims()), ScalarField(grid)), divergence_free_(true) {}

VelocityField::VelocityField(std::vector<ScalarField> components, bool divergence_free)
    : components_(std::move(components)), divergence_free_(divergence_free) {
    if (components_.empty()) throw ConfigError("velocity: no components");
    const PeriodicGrid& g = components_.front().grid();
    if (static_cast<int>(components_.size()) != g.dims()) {
        throw ConfigError("velocity: component count must equal grid dimension");
    }
    for (const auto& c : components_) require_same_grid(g, c.grid(), "velocity");
}

VelocityField VelocityField::constant(const PeriodicGrid& grid, const Point& value) {
    std::vector<ScalarField> comps;
    for (int a = 0; a < grid.dims(); ++a) comps.push_back(ScalarField::constant(grid, value[a]));
    return VelocityField(std::move(comps), true);
}

VelocityField VelocityField::sample(const PeriodicGrid& grid, const std::function<Point(const Point&)>& f) {
    std::vector<std::vector<double>> data(static_cast<std::size_t>(grid.dims()),
                                          std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point v = f(grid.point(i));
        for (int a = 0; a < grid.dims(); ++a) data[a][i] = v[a];
    }
    std::vector<ScalarField> comps;
    for (auto& d : data) comps.emplace_back(grid, std::move(d));
    return VelocityField(std::move(comps));
}

ScalarField& VelocityField::mutable_component(int axis) {
    divergence_free_ = false;
    return components_.at(static_cast<std::size_t>(axis));
}

VelocityField& VelocityField::operator+=(const VelocityField& other) {
    require_same_grid(grid(), other.grid(), "velocity +=");
    for (std::size_t a = 0; a < components_.size(); ++a) components_[a] += other.components_[a];
    divergence_free_ = divergence_free_ && other.divergence_free_;
    return *this;
}

VelocityField& VelocityField::operator-=(const VelocityField& other) {
    require_same_grid(grid(), other.grid(), "velocity -=");
    for (std::size_t a = 0; a < components_.size(); ++a) components_[a] -= other.components_[a];
    divergence_free_ = divergence_free_ && other.divergence_free_;
    return *this;
}

VelocityField& VelocityField::operator*=(double s) {
    for (auto& c : components_) c *= s;
    return *this;
}

VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
VelocityField operator*(double s, VelocityField a) { return a *= s; }

}  // namespace eulerlab
