#include <doctest.h>

#include "eulerlab/calculus.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/rng.hpp"
#include "eulerlab/snapshot.hpp"

#include <cmath>
#include <filesystem>

using namespace eulerlab;

namespace {

// Random field restricted to |k_a| <= kmax.
ScalarField band_limited(const PeriodicGrid& g, std::uint64_t seed, int kmax) {
    CounterRng rng(seed, 0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = rng.normal();
    Spectrum s = ScalarField(g, v).spectrum();
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        const ModeIndex k = g.mode(i);
        for (int a = 0; a < g.dims(); ++a) {
            if (std::abs(k[a]) > kmax) s.coeffs[i] = 0.0;
        }
    }
    return ScalarField::from_spectrum(s);
}

VelocityField band_limited_vector(const PeriodicGrid& g, std::uint64_t seed, int kmax) {
    std::vector<ScalarField> c;
    for (int a = 0; a < g.dims(); ++a) c.push_back(band_limited(g, seed + 17 * a, kmax));
    return VelocityField(std::move(c));
}

double max_diff(const ScalarField& a, const ScalarField& b) { return max_norm(a - b); }

}  // namespace

TEST_CASE("make_grid: spacing, sizes and rejection") {
    const auto g = make_grid(2, 64);
    CHECK(g.spacing() == 1.0 / 32.0);
    CHECK(g.spacing() * g.n_per_axis() == 2.0);
    CHECK(make_grid(3, 8).size() == 512);
    CHECK_THROWS_AS(make_grid(2, 7), ConfigError);
    CHECK_THROWS_AS(make_grid(2, 4), ConfigError);
    CHECK_THROWS_AS(make_grid(1, 64), ConfigError);
    CHECK(g.wavenumber(3) == doctest::Approx(3 * kPi));
    CHECK(g.wavenumber_index(63) == -1);
    CHECK(g.wavenumber_index(32) == -32);
}

TEST_CASE("gradient of constant and of sin(pi x1)") {
    const auto g = make_grid(2, 32);
    const auto c = gradient(ScalarField::constant(g, 5.0));
    CHECK(max_norm(c) < 1e-12);
    const auto f = ScalarField::sample(g, [](const Point& x) { return std::sin(kPi * x[0]); });
    const auto df = gradient(f);
    const auto expect = ScalarField::sample(g, [](const Point& x) { return kPi * std::cos(kPi * x[0]); });
    CHECK(max_diff(df[0], expect) < 1e-12);
    CHECK(max_norm(df[1]) < 1e-12);
}

TEST_CASE("gradient matches fourth-order finite differences") {
    // Oracle: centered 5-point stencil, error O(h^4 * |k|^5). Halving h should cut it ~16x.
    double prev = 0.0;
    for (int n : {64, 128}) {
        const auto g = make_grid(2, n);
        // Same band-limited function sampled on both grids.
        const auto f = ScalarField::sample(g, [](const Point& x) {
            return std::sin(kPi * (2 * x[0] + x[1]) + 0.3) + 0.5 * std::cos(kPi * (3 * x[0] - 2 * x[1]));
        });
        const auto df = gradient(f);
        const double h = g.spacing();
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            ModeIndex idx = g.sample_index(i);
            auto at = [&](int off) {
                ModeIndex j = idx;
                j[0] += off;
                return f[g.flat_index(j)];
            };
            const double fd = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
            err = std::max(err, std::abs(fd - df[0][i]));
        }
        if (prev > 0.0) CHECK(prev / err > 14.0);
        CHECK(err < 2e3 * std::pow(h, 4));
        prev = err;
    }
}

TEST_CASE("divergence examples") {
    const auto g = make_grid(2, 32);
    CHECK(max_norm(divergence(VelocityField::constant(g, {1.0, -2.0, 0.0}))) < 1e-12);
    const auto u = VelocityField::sample(g, [](const Point& x) { return Point{std::sin(kPi * x[0]), 0.0, 0.0}; });
    const auto expect = ScalarField::sample(g, [](const Point& x) { return kPi * std::cos(kPi * x[0]); });
    CHECK(max_diff(divergence(u), expect) < 1e-12);
}

TEST_CASE("leray projection: gradients vanish, idempotence, transverse modes, divergence") {
    const auto g = make_grid(2, 32);
    const auto phi = band_limited(g, 1, 10);
    CHECK(max_norm(leray_project(gradient(phi))) < 1e-10);

    const auto shear = VelocityField::sample(g, [](const Point& x) { return Point{std::sin(kPi * x[1]), 0.0, 0.0}; });
    const auto ps = leray_project(shear);
    CHECK(max_norm(ps - shear) < 1e-12);
    CHECK(ps.divergence_free());

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto u = band_limited_vector(g, seed, 16);
        const auto p1 = leray_project(u);
        const auto p2 = leray_project(p1);
        CHECK(max_norm(p2 - p1) <= 1e-12 * max_norm(p1));
        CHECK(max_norm(divergence(p1)) <= 1e-10 * max_norm(u));
    }
    const auto g3 = make_grid(3, 16);
    const auto u3 = band_limited_vector(g3, 9, 8);
    CHECK(divergence_ratio(leray_project(u3)) < 1e-10);
}

TEST_CASE("gradient and divergence are adjoint") {
    const auto g = make_grid(2, 32);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto f = band_limited(g, seed, 12);
        const auto u = band_limited_vector(g, seed + 100, 12);
        CHECK(std::abs(inner(gradient(f), u) + inner(f, divergence(u))) < 1e-10);
    }
    // Also for unrestricted random data: the zeroed Nyquist derivative keeps the identity exact.
    const auto f = band_limited(g, 77, 16);
    const auto u = band_limited_vector(g, 78, 16);
    CHECK(std::abs(inner(gradient(f), u) + inner(f, divergence(u))) < 1e-10);
}

TEST_CASE("lp_norm examples") {
    const auto g = make_grid(2, 32);
    CHECK(lp_norm(ScalarField::constant(g, 1.0), 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    const auto s = ScalarField::sample(g, [](const Point& x) { return std::sin(kPi * x[0]); });
    CHECK(lp_norm(s, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    const auto f = band_limited(g, 3, 16);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        CHECK(lp_norm(-3.0 * f, p) == doctest::Approx(3.0 * lp_norm(f, p)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(lp_norm(f, 0.5), ConfigError);
}

TEST_CASE("transform round trip and cache invariant") {
    for (auto g : {make_grid(2, 64), make_grid(3, 16)}) {
        const auto f = band_limited(g, 5, g.n_per_axis());
        const auto back = inverse_transform(f.spectrum());
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
        CHECK(err <= 1e-12 * max_norm(f));
    }
    const auto g = make_grid(2, 16);
    ScalarField f = ScalarField::constant(g, 1.0);
    CHECK(f.spectrum().coeffs[0].real() == doctest::Approx(1.0));
    CHECK(f.has_spectral_cache());
    f.mutable_values()[0] = 5.0;
    CHECK_FALSE(f.has_spectral_cache());
    CHECK(f.spectrum().coeffs[0].real() == doctest::Approx(1.0 + 4.0 / 256.0));
}

TEST_CASE("field construction checks") {
    const auto g = make_grid(2, 8);
    CHECK_THROWS_AS(ScalarField(g, std::vector<double>(10, 0.0)), ConfigError);
    std::vector<double> bad(64, 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(ScalarField(g, bad), ConfigError);
    CHECK_THROWS_AS(ScalarField::constant(g, 1.0) + ScalarField::constant(make_grid(2, 16), 1.0), GridMismatchError);
}

TEST_CASE("resample: truncation and padding are exact for band-limited data") {
    const auto fine = make_grid(2, 64);
    const auto coarse = make_grid(2, 32);
    auto fn = [](const Point& x) { return std::sin(kPi * (3 * x[0] - x[1])) + std::cos(kPi * 5 * x[1]); };
    const auto f_fine = ScalarField::sample(fine, fn);
    const auto f_coarse = ScalarField::sample(coarse, fn);
    CHECK(max_diff(resample(f_fine, coarse), f_coarse) < 1e-12);
    CHECK(max_diff(resample(f_coarse, fine), f_fine) < 1e-12);
}

TEST_CASE("snapshot round trip") {
    const auto g = make_grid(2, 16);
    const auto f = band_limited(g, 11, 8);
    const auto path = std::filesystem::temp_directory_path() / "eulerlab_snapshot_test.eulb";
    write_snapshot(path, {f, 2.0 * f});
    CHECK(std::filesystem::file_size(path) == 32 + 2 * 8 * 256);
    const auto back = read_snapshot(path);
    REQUIRE(back.size() == 2);
    CHECK(max_diff(back[0], f) == 0.0);
    CHECK(max_diff(back[1], 2.0 * f) == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("counter generator is reproducible and splittable") {
    CounterRng a(42, 0), b(42, 0), c(42, 1);
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    // Known value of the v1 layout: mix(mix(42 + PHI) + PHI).
    const std::uint64_t key = CounterRng::mix(42 + CounterRng::kPhi);
    CHECK(x == CounterRng::mix(key + CounterRng::kPhi));
    double mean = 0.0;
    CounterRng r(7, 3);
    for (int i = 0; i < 20000; ++i) mean += r.uniform();
    CHECK(mean / 20000 == doctest::Approx(0.5).epsilon(0.02));
}
