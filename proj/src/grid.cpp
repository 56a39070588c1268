#include "eulerlab/grid.hpp"

#include "eulerlab/error.hpp"

#include <string>

namespace eulerlab {

bool is_power_of_two(long long v) noexcept { return v > 0 && (v & (v - 1)) == 0; }

PeriodicGrid::PeriodicGrid(int dims, int n)
    : dims_(dims), n_(n), spacing_(2.0 / n), cell_volume_(1.0), size_(1), spectral_size_(1) {
    for (int a = 0; a < dims; ++a) {
        cell_volume_ *= spacing_;
        size_ *= static_cast<std::size_t>(n);
        spectral_size_ *= static_cast<std::size_t>(a + 1 == dims ? n / 2 + 1 : n);
    }
}

PeriodicGrid make_grid(int dims, int n_per_axis) {
    if (dims < 2 || dims > kMaxDims) {
        throw ConfigError("grid: dims must be 2 or 3, got " + std::to_string(dims));
    }
    if (!is_power_of_two(n_per_axis) || n_per_axis < 8) {
        throw ConfigError("grid: n_per_axis must be a power of two >= 8, got " +
                          std::to_string(n_per_axis));
    }
    return PeriodicGrid(dims, n_per_axis);
}

ModeIndex PeriodicGrid::mode(std::size_t flat) const noexcept {
    ModeIndex k{0, 0, 0};
    const auto h = static_cast<std::size_t>(half_length());
    k[dims_ - 1] = static_cast<int>(flat % h);
    flat /= h;
    for (int a = dims_ - 2; a >= 0; --a) {
        k[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
        flat /= static_cast<std::size_t>(n_);
    }
    for (int a = 0; a < dims_; ++a) k[a] = wavenumber_index(k[a]);
    return k;
}

ModeIndex PeriodicGrid::sample_index(std::size_t flat) const noexcept {
    ModeIndex idx{0, 0, 0};
    for (int a = dims_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
        flat /= static_cast<std::size_t>(n_);
    }
    return idx;
}

Point PeriodicGrid::point(std::size_t flat) const noexcept {
    const ModeIndex idx = sample_index(flat);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dims_; ++a) x[a] = coordinate(idx[a]);
    return x;
}

std::size_t PeriodicGrid::flat_index(const ModeIndex& idx) const noexcept {
    std::size_t flat = 0;
    for (int a = 0; a < dims_; ++a) {
        int i = idx[a] % n_;
        if (i < 0) i += n_;
        flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return flat;
}

}  // namespace eulerlab
