#include <doctest.h>

#include "eulerlab/calculus.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/mollify.hpp"
#include "eulerlab/synth.hpp"

#include <cmath>

using namespace eulerlab;

TEST_CASE("make_kernel: mass, support, positivity, range") {
    const auto g = make_grid(2, 256);
    const auto k = make_kernel(g, 0.1);
    double mass = 0.0;
    int negative = 0, outside = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = k.values()[i];
        negative += v < 0.0;
        mass += v;
        const ModeIndex idx = g.sample_index(i);
        const double r = std::hypot(wrapped_displacement(g, idx[0]), wrapped_displacement(g, idx[1]));
        outside += r >= 0.1 && v != 0.0;
    }
    CHECK(negative == 0);
    CHECK(outside == 0);
    CHECK(std::abs(mass * g.cell_volume() - 1.0) < 1e-12);
    CHECK(k.multiplier()[0] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_kernel(make_grid(2, 64), 0.01), ConfigError);
    try {
        make_kernel(make_grid(2, 64), 0.01);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("n_per_axis >= 1024") != std::string::npos);
    }
    CHECK_THROWS_AS(make_kernel(g, 0.6), ConfigError);
    CHECK_NOTHROW(make_kernel(make_grid(2, 64), 4.0 / 32.0));
}

TEST_CASE("mollify preserves constants and commutes with derivatives") {
    const auto g = make_grid(2, 64);
    const auto k = make_kernel(g, 0.25);
    CHECK(max_norm(mollify(ScalarField::constant(g, 3.0), k) - ScalarField::constant(g, 3.0)) < 1e-12);
    const auto f = ScalarField::sample(g, [](const Point& x) {
        return std::sin(kPi * (2 * x[0] + x[1])) + std::cos(kPi * 3 * x[1] + 0.2);
    });
    for (int a = 0; a < 2; ++a) {
        CHECK(max_norm(mollify(partial(f, a), k) - partial(mollify(f, k), a)) < 1e-12);
    }
}

TEST_CASE("mollify matches direct physical-space convolution") {
    const auto g = make_grid(2, 64);
    const double eps = 0.2;
    const auto k = make_kernel(g, eps);
    const auto f = ScalarField::sample(g, [](const Point& x) { return std::sin(kPi * x[0]); });
    const auto fe = mollify(f, k);
    const int n = g.n_per_axis();
    double err = 0.0;
    for (int i0 = 0; i0 < n; i0 += 5) {
        for (int i1 = 0; i1 < n; i1 += 7) {
            double sum = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double w = k.values()[j];
                if (w == 0.0) continue;
                const ModeIndex d = g.sample_index(j);
                sum += f[g.flat_index({i0 - d[0], i1 - d[1], 0})] * w;
            }
            sum *= g.cell_volume();
            err = std::max(err, std::abs(sum - fe[g.flat_index({i0, i1, 0})]));
        }
    }
    CHECK(err < 1e-8);
    // Single mode is only damped.
    CHECK(max_norm(fe) < max_norm(f));
    CHECK(max_norm(fe) > 0.5 * max_norm(f));
}

TEST_CASE("mollify: L2 contraction, convergence, commutes with Leray projection") {
    const auto g = make_grid(2, 128);
    const auto u = random_divfree(g, 1.0, 3);
    const auto raw = VelocityField({u[0] * u[1], u[0] - u[1]});
    const auto smooth = ScalarField::sample(g, [](const Point& x) { return std::exp(std::sin(kPi * x[0])) * std::cos(kPi * x[1]); });
    double prev = 1e300;
    for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
        const auto k = make_kernel(g, eps);
        for (int a = 0; a < 2; ++a) CHECK(lp_norm(mollify(raw[a], k), 2.0) <= lp_norm(raw[a], 2.0) + 1e-14);
        const double d = lp_norm(mollify(smooth, k) - smooth, 2.0);
        CHECK(d <= prev + 1e-10);
        prev = d;
        CHECK(max_norm(mollify(leray_project(raw), k) - leray_project(mollify(raw, k))) < 1e-12);
        CHECK(mollify(u, k).divergence_free());
    }
    CHECK_THROWS_AS(mollify(smooth, make_kernel(make_grid(2, 64), 0.25)), GridMismatchError);
}
