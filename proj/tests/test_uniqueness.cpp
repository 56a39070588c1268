#include <doctest.h>

#include "eulerlab/calculus.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/mollify.hpp"
#include "eulerlab/synth.hpp"
#include "eulerlab/uniqueness.hpp"

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

std::vector<double> axis(int n, double T) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(T * i / n);
    return t;
}

}  // namespace

TEST_CASE("relative energy: examples and expanded form") {
    const auto g = make_grid(2, 64);
    const auto tg = taylor_green(g, 1.0);
    const VelocityField zero(g);
    CHECK(relative_energy(tg, tg) == 0.0);
    CHECK(relative_energy(zero, tg) == doctest::Approx(1.0).epsilon(1e-12));

    const auto u = random_divfree(g, 1.5, 5);
    const auto v = random_divfree(g, 1.5, 6);
    CHECK(relative_energy(u, v) == relative_energy(v, u));
    auto moved = [](const VelocityField& w) { return VelocityField({shift(w[0], {3, 7, 0}), shift(w[1], {3, 7, 0})}); };
    CHECK(relative_energy(moved(u), moved(v)) == doctest::Approx(relative_energy(u, v)).epsilon(1e-13));
    const double expanded = 0.5 * (inner(u, u) + inner(v, v)) - inner(u, v);
    CHECK(std::abs(expanded - relative_energy(u, v)) <= 1e-10);
    CHECK(relative_energy(u, v) > 0.0);

    const auto rho = ScalarField::constant(g, 2.0);
    CHECK(weighted_relative_energy(rho, u, v) == doctest::Approx(2.0 * relative_energy(u, v)).epsilon(1e-12));
    CHECK_THROWS_AS(relative_energy(u, random_divfree(make_grid(2, 32), 1.5, 6)), GridMismatchError);
}

TEST_CASE("one-sided Lipschitz estimator") {
    const auto g = make_grid(2, 256);
    const double eps = MollifierKernel::min_epsilon(g);
    const auto shear = VelocityField::sample(g, [](const Point& x) { return Point{std::sin(kPi * x[1]), 0.0, 0.0}; });
    CHECK(one_sided_lipschitz(shear, eps) == doctest::Approx(kPi / 2).epsilon(0.02));
    CHECK(one_sided_lipschitz(VelocityField::constant(g, {1.0, -3.0, 0.0}), eps) == 0.0);

    const auto tg = taylor_green(g, 1.0);
    CHECK(one_sided_lipschitz(tg, eps) == doctest::Approx(kPi).epsilon(0.02));

    const auto v = random_divfree(g, 1.0, 8);
    const double c = one_sided_lipschitz(v, eps);
    CHECK(one_sided_lipschitz(2.0 * v, eps) == 2.0 * c);
    CHECK(one_sided_lipschitz(0.5 * v, eps) == 0.5 * c);
    CHECK(one_sided_lipschitz(3.0 * v, eps) == doctest::Approx(3.0 * c).epsilon(1e-12));

    const auto ve = mollify(v, make_kernel(g, eps));
    double grad_max = 0.0;
    for (int a = 0; a < 2; ++a) {
        const auto d = gradient(ve[a]);
        grad_max = std::max({grad_max, max_norm(d[0]), max_norm(d[1])});
    }
    CHECK(c > 0.0);
    CHECK(c <= 2.0 * grad_max);  // |sym grad| <= sum of two entries
    CHECK_THROWS_AS(one_sided_lipschitz(v, 0.5 * eps), ConfigError);
}

TEST_CASE("one-sided Lipschitz: 3D closed form agrees with the shear value") {
    const auto g = make_grid(3, 32);
    const auto shear = VelocityField::sample(g, [](const Point& x) { return Point{0.0, 0.0, std::sin(kPi * x[0])}; });
    CHECK(one_sided_lipschitz(shear, MollifierKernel::min_epsilon(g)) == doctest::Approx(kPi / 2).epsilon(0.05));
}

TEST_CASE("gronwall_certify: constructed series") {
    const auto t = axis(10, 1.0);
    const LipschitzSeries ones{t, std::vector<double>(t.size(), 1.0), 0.1};

    const RelativeEnergySeries zero{t, std::vector<double>(t.size(), 0.0), "a|b"};
    const auto z = gronwall_certify(zero, ones, 0.0, 1e-9);
    CHECK(z.pass);
    CHECK(z.slack == 0.0);
    const auto zb = gronwall_certify(zero, ones, 0.25, 1e-9);
    CHECK(zb.slack == 0.25);
    CHECK(zb.commutator_budget == 0.25);

    // Exact equality with the trapezoid integral of a constant rate.
    std::vector<double> e;
    for (double s : t) e.push_back(std::exp(s));
    const auto eq = gronwall_certify({t, e, "eq"}, ones, 0.0, 1e-9);
    CHECK(eq.pass);
    CHECK(std::abs(eq.slack) < 1e-12);

    std::vector<double> e2;
    for (double s : t) e2.push_back(std::exp(2.0 * s));
    const auto bad = gronwall_certify({t, e2, "bad"}, ones, 0.0, 1e-6);
    CHECK_FALSE(bad.pass);
    CHECK(bad.tau1 == 0.0);
    CHECK(bad.tau2 == 1.0);
    CHECK(bad.lhs == doctest::Approx(std::exp(2.0)));
    CHECK(bad.bound == doctest::Approx(std::exp(1.0)));
    CHECK(bad.slack == doctest::Approx(std::exp(1.0) - std::exp(2.0)));

    // Monotone in the budget.
    bool seen_pass = false;
    for (double budget : {0.0, 1.0, 3.0, 4.7, 5.0, 10.0}) {
        const bool pass = gronwall_certify({t, e2, "bad"}, ones, budget, 1e-6).pass;
        CHECK((pass || !seen_pass));
        seen_pass = seen_pass || pass;
    }
    CHECK(seen_pass);

    CHECK_THROWS_AS(gronwall_certify({axis(5, 1.0), std::vector<double>(6, 0.0), ""}, ones, 0.0, 1e-9), ConfigError);
    CHECK_THROWS_AS(gronwall_certify(zero, ones, 0.0, 0.0), ConfigError);

    const auto ct = cumulative_trapezoid({0.0, 1.0, 3.0}, {1.0, 3.0, 1.0});
    CHECK(ct == std::vector<double>{0.0, 2.0, 6.0});
}

TEST_CASE("uniqueness pipeline: identical runs, Taylor-Green, rough data") {
    const auto g = make_grid(2, 64);
    const auto tg = taylor_green(g, 1.0);
    const RunSpec a{32, config(2e-3, 0.2, 20)};

    const auto same = uniqueness_experiment(tg, a, a);
    for (double e : same.energy.values) CHECK(e == 0.0);
    CHECK(same.certificate.pass);
    CHECK(same.verdict == Verdict::pass);

    const RunSpec b{64, config(2e-3, 0.2, 20)};
    const auto r = uniqueness_experiment(tg, a, b);
    CHECK(r.comparison_n == 32);
    CHECK(r.energy.times.size() == 6);
    for (double e : r.energy.values) CHECK(e <= 1e-6);
    for (double c : r.lipschitz.c_values) CHECK(c == doctest::Approx(kPi).epsilon(0.1));
    CHECK(r.hypothesis.required_alpha == 0.5);
    CHECK(r.hypothesis.met);
    CHECK(r.certificate.pass);
    CHECK(r.verdict == Verdict::pass);
    CHECK(exit_code(r.verdict) == 0);
    CHECK(r.budget_epsilons.size() == r.budget_values.size());

    UniquenessOptions t1;
    t1.path = CertificatePath::trilinear;
    const auto r1 = uniqueness_experiment(tg, a, b, t1);
    CHECK(r1.hypothesis.required_alpha == doctest::Approx(1.0 / 3.0));
    CHECK(r1.verdict == Verdict::pass);

    // Rough data on coarse grids: the verdict must agree with its components.
    const auto rough = random_divfree(g, 0.6, 21, 0.3);
    const auto q = uniqueness_experiment(rough, {32, config(2e-3, 0.1, 10)}, {64, config(2e-3, 0.1, 10)});
    if (!q.hypothesis.met) {
        CHECK(q.verdict == Verdict::hypothesis_not_met);
        CHECK(exit_code(q.verdict) == 3);
    } else if (!q.certificate.pass) {
        CHECK(q.verdict == Verdict::certificate_failure);
        CHECK(exit_code(q.verdict) == 2);
    } else {
        CHECK(q.verdict == Verdict::pass);
    }
    CHECK(q.hypothesis.fitted_alpha.has_value());
}

TEST_CASE("verdict names and exit codes") {
    CHECK(to_string(Verdict::pass) == "pass");
    CHECK(to_string(Verdict::certificate_failure) == "certificate_failure");
    CHECK(to_string(Verdict::hypothesis_not_met) == "hypothesis_not_met");
    CHECK(exit_code(Verdict::certificate_failure) == 2);
    CHECK(exit_code(Verdict::hypothesis_not_met) == 3);
    CHECK(to_string(CertificatePath::trilinear) == "trilinear");
}
