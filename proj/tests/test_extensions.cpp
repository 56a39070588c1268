#include <doctest.h>

#include "eulerlab/calculus.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/extensions.hpp"
#include "eulerlab/synth.hpp"

#include <cmath>

using namespace eulerlab;

namespace {

SolverConfig config(double dt, double T, int stride) {
    SolverConfig c;
    c.dt = dt;
    c.T = T;
    c.snapshot_stride = stride;
    return c;
}

ScalarField advect(ScalarField rho, const VelocityField& u, double dt, long steps) {
    for (long k = 0; k < steps; ++k) rho = transport_step(rho, u, dt);
    return rho;
}

ScalarField bump_density(const PeriodicGrid& g, double amp) {
    return ScalarField::sample(g, [amp](const Point& x) { return 1.0 + amp * std::sin(kPi * x[0]) * std::sin(kPi * x[1]); });
}

bool bitwise_equal(const ScalarField& a, const ScalarField& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("transport_step: trivial cases and conservation") {
    const auto g = make_grid(2, 64);
    const auto u = random_divfree(g, 3.0, 4);
    const auto c = ScalarField::constant(g, 1.7);
    CHECK(max_norm(advect(c, u, 1e-3, 10) - c) < 1e-13);
    const auto rho = bump_density(g, 0.3);
    CHECK(max_norm(advect(rho, VelocityField(g), 1e-3, 10) - rho) < 1e-14);

    const auto moved = advect(rho, u, 2e-3, 50);
    CHECK(std::abs(integral(moved) - integral(rho)) <= 1e-12 * integral(rho));
    CHECK_THROWS_AS(transport_step(rho, u, 1.0), StepSizeError);
}

TEST_CASE("transport_step: shear flow matches characteristics") {
    const auto g = make_grid(2, 256);
    const auto u = VelocityField::sample(g, [](const Point& x) { return Point{0.0, std::sin(kPi * x[0]), 0.0}; });
    const double dt = 1.0 / 512;
    const long steps = 1024;  // t = 2, one period of the fastest column
    const double t = dt * steps;

    const auto rho1 = ScalarField::sample(g, [](const Point& x) { return std::sin(kPi * x[0]); });
    CHECK(max_norm(advect(rho1, u, dt, steps) - rho1) <= 1e-6);

    const auto rho2 = ScalarField::sample(g, [](const Point& x) { return std::sin(kPi * x[1]); });
    const auto exact = ScalarField::sample(g, [t](const Point& x) { return std::sin(kPi * (x[1] - t * std::sin(kPi * x[0]))); });
    const auto got = advect(rho2, u, dt, steps);
    CHECK(max_norm(got - exact) <= 1e-6);
}

TEST_CASE("transport_step: L2 norm is nearly conserved for smooth data") {
    const auto g = make_grid(2, 256);
    const auto u = random_divfree(g, 3.0, 9, 0.5);
    const auto rho = bump_density(g, 0.5);
    const auto moved = advect(rho, u, 4e-3, 250);
    CHECK(std::abs(inner(moved, moved) - inner(rho, rho)) <= 1e-6 * inner(rho, rho));
}

TEST_CASE("variable Poisson solve") {
    const auto g = make_grid(2, 64);
    const auto rho = bump_density(g, 0.4);
    const auto target = ScalarField::sample(g, [](const Point& x) { return std::cos(kPi * x[0]) + 0.5 * std::sin(2 * kPi * x[1]); });
    // f = -div(grad(target) / rho)
    auto gt = gradient(target);
    std::vector<ScalarField> flux;
    for (int a = 0; a < 2; ++a) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = gt[a][i] / rho[i];
        flux.emplace_back(g, std::move(v));
    }
    const auto f = -1.0 * divergence(VelocityField(std::move(flux)));
    ScalarField p(g);
    const int iters = solve_variable_poisson(rho, f, p, {});
    CHECK(iters > 0);
    CHECK(iters < 100);
    CHECK(max_norm(p - (target - ScalarField::constant(g, mean(target)))) < 1e-8);

    ScalarField zero(g);
    CHECK(solve_variable_poisson(rho, ScalarField(g), zero, {}) == 0);
    ScalarField q(g);
    CHECK_THROWS_AS(solve_variable_poisson(rho, f, q, {1e-14, 1}), SolverAbort);
    try {
        ScalarField r(g);
        solve_variable_poisson(rho, f, r, {1e-14, 1});
    } catch (const SolverAbort& e) {
        CHECK(std::string(e.what()).find("1 iterations") != std::string::npos);
    }
}

TEST_CASE("inhom_solve: unit density reduces to the homogeneous solver") {
    const auto g = make_grid(2, 64);
    const auto u0 = random_divfree(g, 3.0, 2, 0.5);
    const auto cfg = config(2e-3, 0.5, 50);
    const auto hom = solve(u0, cfg);
    const auto inh = inhom_solve(ScalarField::constant(g, 1.0), u0, cfg);
    REQUIRE(hom.states.size() == inh.states.size());
    double err = 0.0;
    for (std::size_t s = 0; s < hom.states.size(); ++s) {
        CHECK(inh.states[s].time == hom.states[s].time);
        err = std::max(err, max_norm(inh.states[s].velocity - hom.states[s].velocity));
    }
    CHECK(err <= 1e-8);
    // Pressures agree on the resolved band; the homogeneous recovery keeps unmasked product modes.
    Spectrum pi = inh.states.back().pressure.spectrum(), ph = hom.states.back().pressure.spectrum();
    dealias(pi);
    dealias(ph);
    CHECK(max_norm(ScalarField::from_spectrum(pi) - ScalarField::from_spectrum(ph)) <= 1e-8);
}

TEST_CASE("inhom_solve: static state, mass and energy ledgers, errors") {
    const auto g = make_grid(2, 64);
    const auto rho0 = bump_density(g, 0.3);
    const auto still = inhom_solve(rho0, VelocityField(g), config(1e-2, 0.2, 5));
    for (const auto& s : still.states) {
        CHECK(max_norm(s.velocity) == 0.0);
        CHECK(max_norm(s.density - rho0) == 0.0);
    }

    const auto u0 = random_divfree(g, 3.0, 6, 0.5);
    const auto t = inhom_solve(rho0, u0, config(4e-3, 1.0, 25));
    for (double m : t.mass_ledger) CHECK(std::abs(m - t.mass_ledger.front()) <= 1e-8 * t.mass_ledger.front());
    CHECK(t.max_energy_drift <= 1e-6 * t.energy_ledger.front());
    CHECK(t.max_pressure_iterations > 0);
    for (const auto& s : t.states) {
        CHECK(divergence_ratio(s.velocity) < 1e-8);
        CHECK(std::abs(mean(s.pressure)) < 1e-12);
    }

    CHECK_THROWS_AS(inhom_solve(rho0 - ScalarField::constant(g, 2.0), u0, config(1e-3, 0.1, 1)), ConfigError);
    PressureSolveOptions tight{1e-14, 1};
    CHECK_THROWS_AS(inhom_solve(rho0, u0, config(1e-3, 0.01, 1), tight), SolverAbort);
}

TEST_CASE("density contraction check") {
    const auto g = make_grid(2, 32);
    const auto rho0 = bump_density(g, 0.2);
    const auto u0 = random_divfree(g, 3.0, 1, 0.5);
    const auto a = inhom_solve(rho0, u0, config(5e-3, 0.2, 8));
    const auto same = density_contraction_check(a, a, 1e-10);
    for (double d : same.differences) CHECK(d == 0.0);
    CHECK(same.pass);

    auto b = a;
    const auto bump = ScalarField::sample(g, [](const Point& x) { return 0.1 * std::cos(kPi * x[0]); });
    for (std::size_t s = 2; s < b.states.size(); ++s) b.states[s].density = b.states[s].density + bump;
    const auto bad = density_contraction_check(a, b, 1e-8);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.first_violation.has_value());
    CHECK(bad.first_violation->first == 0);
    CHECK(bad.first_violation->second == 2);
    CHECK(bad.worst_slack < -1e-3);

    auto c = a;
    c.states.pop_back();
    CHECK_THROWS_AS(density_contraction_check(a, c, 1e-8), ConfigError);
}

TEST_CASE("inhom uniqueness: resolution pair passes") {
    const auto g = make_grid(2, 64);
    const auto rho0 = bump_density(g, 0.2);
    const auto u0 = taylor_green(g, 0.5);
    InhomUniquenessOptions opt;
    opt.tolerance = 1e-5;
    const auto r = inhom_uniqueness_experiment(rho0, u0, {32, config(4e-3, 0.2, 10)}, {64, config(4e-3, 0.2, 10)}, opt);
    CHECK(r.contraction.pass);
    CHECK(r.hypothesis.met);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.mass_drift_a <= 1e-8);
    CHECK(r.mass_drift_b <= 1e-8);
    for (double e : r.weighted_energy) CHECK(e >= 0.0);
}

TEST_CASE("boussinesq: reductions to the homogeneous solver") {
    const auto g = make_grid(2, 64);
    const auto u0 = random_divfree(g, 3.0, 12, 0.5);
    const auto cfg = config(2e-3, 0.2, 10);
    const auto hom = solve(u0, cfg);

    const auto zero = boussinesq_solve(ScalarField(g), u0, {0.0, -1.0}, cfg);
    REQUIRE(zero.states.size() == hom.states.size());
    for (std::size_t s = 0; s < hom.states.size(); ++s) {
        CHECK(bitwise_equal(zero.states[s].velocity[0], hom.states[s].velocity[0]));
        CHECK(bitwise_equal(zero.states[s].velocity[1], hom.states[s].velocity[1]));
        CHECK(bitwise_equal(zero.states[s].vorticity, hom.states[s].vorticity));
    }

    const auto theta0 = bump_density(g, 0.5);
    const auto passive = boussinesq_solve(theta0, u0, {0.0, 0.0}, cfg);
    for (std::size_t s = 0; s < hom.states.size(); ++s) {
        CHECK(max_norm(passive.states[s].velocity - hom.states[s].velocity) <= 1e-8);
    }
    // Passive scalar mass is conserved.
    for (double m : passive.theta_ledger) CHECK(std::abs(m - passive.theta_ledger.front()) <= 1e-8 * std::abs(passive.theta_ledger.front()));
    const auto vt = passive.velocity_trajectory();
    CHECK(vt.states.size() == passive.states.size());
    CHECK(max_norm(vt.states.back().pressure - hom.states.back().pressure) <= 1e-8);
}

TEST_CASE("boussinesq: short-time response to buoyancy") {
    const auto g = make_grid(2, 64);
    const double t = 1e-2;
    const auto cfg = config(1e-3, t, 10);
    const std::array<double, 2> gv{0.0, -1.0};
    auto expected = [&](const ScalarField& th) {
        const VelocityField force({ScalarField(g), -1.0 * th});
        return t * leray_project(force);
    };

    const auto horiz = ScalarField::sample(g, [](const Point& x) { return std::sin(kPi * x[0]); });
    const auto r1 = boussinesq_solve(horiz, VelocityField(g), gv, cfg);
    CHECK(max_norm(r1.states.back().velocity) > 1e-3);
    CHECK(max_norm(r1.states.back().velocity - expected(horiz)) <= 1e-4);

    const auto mixed = ScalarField::sample(g, [](const Point& x) {
        return std::sin(kPi * x[0]) * std::cos(2 * kPi * x[1]) + 0.3 * std::cos(kPi * (x[0] + x[1]));
    });
    const auto r2 = boussinesq_solve(mixed, VelocityField(g), gv, cfg);
    CHECK(max_norm(r2.states.back().velocity - expected(mixed)) <= 1e-4);

    // Gradient forcing is absorbed by the pressure.
    const auto vert = ScalarField::sample(g, [](const Point& x) { return std::sin(kPi * x[1]); });
    const auto r3 = boussinesq_solve(vert, VelocityField(g), gv, cfg);
    CHECK(max_norm(r3.states.back().velocity) < 1e-12);

    // Mean momentum grows with g * mean(theta).
    const auto r4 = boussinesq_solve(ScalarField::constant(g, 2.0), VelocityField(g), {0.5, 0.0}, cfg);
    CHECK(mean(r4.states.back().velocity[0]) == doctest::Approx(t).epsilon(1e-12));
    CHECK(max_norm(r4.states.back().velocity[1]) == 0.0);
}

TEST_CASE("boussinesq uniqueness") {
    const auto g = make_grid(2, 64);
    const auto u0 = taylor_green(g, 0.5);
    const auto theta0 = bump_density(g, 0.3) - ScalarField::constant(g, 1.0);
    const RunSpec a{32, config(4e-3, 0.2, 10)};
    const RunSpec b{64, config(4e-3, 0.2, 10)};

    const auto same = boussinesq_uniqueness_experiment(theta0, u0, {0.0, -1.0}, a, a);
    for (double d : same.theta.differences) CHECK(d == 0.0);
    for (double e : same.velocity.energy.values) CHECK(e == 0.0);
    CHECK(same.verdict == Verdict::pass);

    const auto hom = uniqueness_experiment(u0, a, b);
    const auto cold = boussinesq_uniqueness_experiment(ScalarField(g), u0, {0.0, -1.0}, a, b);
    CHECK(cold.velocity.energy.values == hom.energy.values);
    CHECK(cold.velocity.certificate.slack == hom.certificate.slack);
    CHECK(cold.velocity.verdict == hom.verdict);

    UniquenessOptions opt;
    opt.certify_tolerance = 1e-5;
    const auto r = boussinesq_uniqueness_experiment(theta0, u0, {0.0, -1.0}, a, b, opt);
    CHECK(r.theta.pass);
    CHECK(r.velocity.certificate.pass);
    CHECK(r.hypothesis.met);
    CHECK(r.verdict == Verdict::pass);
}
