#include "eulerlab/extensions.hpp"

#include "eulerlab/besov.hpp"
#include "eulerlab/calculus.hpp"
#include "eulerlab/detail/vorticity.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/mollify.hpp"
#include "eulerlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eulerlab {
namespace {

using detail::spectral_ops;

double sum_product(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_density(const ScalarField& rho, double time) {
    for (double v : rho.values()) {
        if (!(v > 0.0)) {
            std::ostringstream msg;
            msg << "inhom: density is not positive (" << v << ") at t = " << time;
            throw SolverAbort(msg.str(), time);
        }
    }
}

void check_finite(const VelocityField& u, double time) {
    for (const auto& c : u.components()) {
        for (double v : c.values()) {
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "inhom: non-finite velocity at t = " << time;
                throw SolverAbort(msg.str(), time);
            }
        }
    }
}

ScalarField masked(const ScalarField& f) {
    Spectrum s = f.spectrum();
    dealias(s);
    return ScalarField::from_spectrum(s);
}

// Fitted exponent or nullopt for fields without translation differences.
std::optional<double> fitted(const VelocityField& f, double p) { return besov_seminorm(f, 0.5, p).fitted_alpha; }
std::optional<double> fitted(const ScalarField& f, double p) { return besov_seminorm(f, 0.5, p).fitted_alpha; }

void take_min(std::optional<double>& acc, std::optional<double> v) {
    if (v) acc = acc ? std::min(*acc, *v) : *v;
}

VelocityField scaled(const ScalarField& rho, const VelocityField& u) {
    std::vector<ScalarField> c;
    for (int a = 0; a < u.dims(); ++a) c.push_back(rho * u[a]);
    return VelocityField(std::move(c));
}

double default_tolerance(double drift_a, double drift_b) { return std::max(10.0 * std::max(drift_a, drift_b), 1e-12); }

// Variable-density right-hand side with the pressure warm start carried in p.
struct InhomRhs {
    ScalarField drho;
    VelocityField du;
    int iterations;
};

InhomRhs inhom_rhs(const ScalarField& rho, const VelocityField& u, ScalarField& p, const PressureSolveOptions& opt,
                   double time) {
    const PeriodicGrid& g = rho.grid();
    const int d = g.dims();
    // N = mask(u.grad u)
    std::vector<ScalarField> n;
    for (int a = 0; a < d; ++a) {
        const VelocityField du = gradient(u[a]);
        std::vector<double> prod(g.size(), 0.0);
        for (int b = 0; b < d; ++b) {
            for (std::size_t i = 0; i < g.size(); ++i) prod[i] += u[b][i] * du[b][i];
        }
        n.push_back(masked(ScalarField(g, std::move(prod))));
    }
    const VelocityField nf(std::move(n));
    const ScalarField f = divergence(nf);
    const int iters = solve_variable_poisson(rho, f, p, opt, time);
    const VelocityField gp = gradient(p);
    std::vector<ScalarField> dut;
    for (int a = 0; a < d; ++a) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = -nf[a][i] - gp[a][i] / rho[i];
        dut.push_back(masked(ScalarField(g, std::move(v))));
    }
    ScalarField drho = ScalarField::from_spectrum(detail::transport_rhs(rho, u));
    return {std::move(drho), VelocityField(std::move(dut)), iters};
}

}  // namespace

ScalarField transport_step(const ScalarField& rho, const VelocityField& u, double dt, double cfl) {
    require_same_grid(rho.grid(), u.grid(), "transport_step");
    detail::check_cfl(u, dt, cfl);
    const Spectrum& r = rho.spectrum();
    auto rhs = [&u](const Spectrum& s) { return detail::transport_rhs(ScalarField::from_spectrum(s), u); };
    const Spectrum k1 = detail::transport_rhs(rho, u);
    const Spectrum k2 = rhs(detail::axpy(r, 0.5 * dt, k1));
    const Spectrum k3 = rhs(detail::axpy(r, 0.5 * dt, k2));
    const Spectrum k4 = rhs(detail::axpy(r, dt, k3));
    return ScalarField::from_spectrum(detail::rk4_combine(r, dt, k1, k2, k3, k4));
}

std::vector<double> InhomTrajectory::times() const {
    std::vector<double> t;
    for (const auto& s : states) t.push_back(s.time);
    return t;
}

int solve_variable_poisson(const ScalarField& rho, const ScalarField& f, ScalarField& p,
                           const PressureSolveOptions& options, double time) {
    const PeriodicGrid& g = rho.grid();
    require_same_grid(g, f.grid(), "variable Poisson");
    require_same_grid(g, p.grid(), "variable Poisson");
    std::vector<double> inv_rho(g.size());
    double c = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        inv_rho[i] = 1.0 / rho[i];
        c += inv_rho[i];
    }
    c /= static_cast<double>(g.size());

    auto apply = [&](const ScalarField& q) {
        VelocityField gq = gradient(q);
        for (int a = 0; a < g.dims(); ++a) {
            auto v = gq.mutable_component(a).mutable_values();
            for (std::size_t i = 0; i < v.size(); ++i) v[i] *= inv_rho[i];
        }
        return -1.0 * divergence(gq);
    };
    std::vector<double> inv_k2(g.spectral_size());
    for (std::size_t i = 0; i < g.spectral_size(); ++i) {
        const ModeIndex m = g.mode(i);
        double k2 = 0.0;
        for (int a = 0; a < g.dims(); ++a) {
            const double k = g.is_nyquist(m[a]) ? 0.0 : kPi * m[a];
            k2 += k * k;
        }
        inv_k2[i] = k2 > 0.0 ? 1.0 / (c * k2) : 0.0;
    }
    auto precondition = [&](const ScalarField& r) {
        Spectrum s = r.spectrum();
        for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] *= inv_k2[i];
        return ScalarField::from_spectrum(s);
    };

    const double fnorm = std::sqrt(sum_product(f.values(), f.values()));
    if (fnorm == 0.0) {
        p = ScalarField(g);
        return 0;
    }
    ScalarField r = f - apply(p);
    ScalarField z = precondition(r);
    ScalarField dir = z;
    double rz = sum_product(r.values(), z.values());
    for (int it = 1; it <= options.max_iterations; ++it) {
        if (std::sqrt(sum_product(r.values(), r.values())) <= options.tolerance * fnorm) return it - 1;
        const ScalarField ad = apply(dir);
        const double a = rz / sum_product(dir.values(), ad.values());
        p += a * dir;
        r -= a * ad;
        z = precondition(r);
        const double rz_new = sum_product(r.values(), z.values());
        dir = z + (rz_new / rz) * dir;
        rz = rz_new;
    }
    if (std::sqrt(sum_product(r.values(), r.values())) <= options.tolerance * fnorm) return options.max_iterations;
    std::ostringstream msg;
    msg << "inhom: pressure solve did not converge after " << options.max_iterations << " iterations at t = " << time;
    throw SolverAbort(msg.str(), time);
}

InhomTrajectory inhom_solve(const ScalarField& rho0, const VelocityField& u0, const SolverConfig& config,
                            const PressureSolveOptions& pressure) {
    const PeriodicGrid& g = u0.grid();
    if (g.dims() != 2) throw ConfigError("inhom: only dims == 2 is supported");
    require_same_grid(g, rho0.grid(), "inhom_solve");
    for (double v : rho0.values()) {
        if (!(v > 0.0)) throw ConfigError("inhom: initial density must be positive");
    }
    if (divergence_ratio(u0) > 1e-10) throw ConfigError("inhom: initial velocity is not divergence-free");
    if (config.snapshot_stride < 1) throw ConfigError("solver: snapshot_stride must be >= 1");
    const long nsteps = step_count(config.T, config.dt);

    ScalarField rho = rho0;
    VelocityField u = u0;
    ScalarField p(g);
    InhomTrajectory traj;
    traj.dt = config.dt;
    traj.config = config;
    auto energy = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += rho[i] * (u[0][i] * u[0][i] + u[1][i] * u[1][i]);
        return 0.5 * s * g.cell_volume();
    };
    auto record = [&](long k) {
        const double t = static_cast<double>(k) * config.dt;
        ScalarField pk = p;
        inhom_rhs(rho, u, pk, pressure, t);
        traj.states.push_back({t, rho, u, pk});
        traj.energy_ledger.push_back(energy());
        traj.mass_ledger.push_back(integral(rho));
    };
    record(0);
    const double e0 = traj.energy_ledger.front();
    const double dt = config.dt;
    for (long k = 1; k <= nsteps; ++k) {
        const double t = static_cast<double>(k - 1) * dt;
        detail::check_cfl(u, dt, config.cfl);
        const InhomRhs k1 = inhom_rhs(rho, u, p, pressure, t);
        const InhomRhs k2 = inhom_rhs(rho + (0.5 * dt) * k1.drho, u + (0.5 * dt) * k1.du, p, pressure, t);
        const InhomRhs k3 = inhom_rhs(rho + (0.5 * dt) * k2.drho, u + (0.5 * dt) * k2.du, p, pressure, t);
        const InhomRhs k4 = inhom_rhs(rho + dt * k3.drho, u + dt * k3.du, p, pressure, t);
        traj.max_pressure_iterations =
            std::max({traj.max_pressure_iterations, k1.iterations, k2.iterations, k3.iterations, k4.iterations});
        rho = rho + (dt / 6.0) * (k1.drho + 2.0 * k2.drho + 2.0 * k3.drho + k4.drho);
        u = u + (dt / 6.0) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
        u.set_divergence_free(true);
        const double tn = static_cast<double>(k) * dt;
        check_finite(u, tn);
        check_density(rho, tn);
        if (k % config.snapshot_stride == 0 || k == nsteps) record(k);
        traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(energy() - e0));
    }
    return traj;
}

ContractionReport scalar_contraction_check(const std::vector<double>& times, const std::vector<ScalarField>& rho_a,
                                           const std::vector<VelocityField>& u_a, const std::vector<ScalarField>& rho_b,
                                           const std::vector<VelocityField>& u_b, double tolerance,
                                           std::optional<double> epsilon) {
    const std::size_t n = times.size();
    if (rho_a.size() != n || u_a.size() != n || rho_b.size() != n || u_b.size() != n || n == 0) {
        throw ConfigError("contraction: series lengths do not match the time axis");
    }
    if (!(tolerance > 0.0)) throw ConfigError("contraction: tolerance must be positive");
    const PeriodicGrid& g = rho_a.front().grid();
    ContractionReport r{};
    r.times = times;
    r.tolerance = tolerance;
    r.epsilon = epsilon.value_or(MollifierKernel::min_epsilon(g));
    const MollifierKernel kernel = make_kernel(g, r.epsilon);
    r.differences.assign(n, 0.0);
    r.budget_rate.assign(n, 0.0);
    parallel_for(n, [&](std::size_t s) {
        const ScalarField diff = rho_a[s] - rho_b[s];
        r.differences[s] = 0.5 * inner(diff, diff);
        const ScalarField ra = mollify(rho_a[s], kernel), rb = mollify(rho_b[s], kernel);
        const VelocityField ua = mollify(u_a[s], kernel), ub = mollify(u_b[s], kernel);
        const VelocityField ca = mollify(scaled(rho_a[s], u_a[s]), kernel) - scaled(ra, ua);
        const VelocityField cb = mollify(scaled(rho_b[s], u_b[s]), kernel) - scaled(rb, ub);
        r.budget_rate[s] = std::abs(inner(ca - cb, gradient(ra - rb)));
    });
    r.cumulative_budget = cumulative_trapezoid(times, r.budget_rate);
    r.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double slack = r.differences[i] + (r.cumulative_budget[j] - r.cumulative_budget[i]) - r.differences[j];
            if (slack < r.worst_slack) {
                r.worst_slack = slack;
                r.worst_index1 = i;
                r.worst_index2 = j;
            }
            if (slack < -tolerance && !r.first_violation) r.first_violation = std::make_pair(i, j);
        }
    }
    if (n < 2) r.worst_slack = 0.0;
    r.pass = !r.first_violation.has_value();
    return r;
}

namespace {

template <typename Traj, typename ScalarOf>
ContractionReport contraction_on_coarser(const Traj& a, const Traj& b, double tolerance, std::optional<double> epsilon,
                                         ScalarOf scalar_of) {
    if (a.states.empty() || b.states.empty() || a.states.size() != b.states.size()) {
        throw ConfigError("contraction: trajectories have different snapshot counts");
    }
    for (std::size_t s = 0; s < a.states.size(); ++s) {
        if (std::abs(a.states[s].time - b.states[s].time) > 1e-12 * std::max(1.0, a.states[s].time)) {
            throw ConfigError("contraction: snapshot times differ at index " + std::to_string(s));
        }
    }
    const PeriodicGrid& ga = a.states.front().velocity.grid();
    const PeriodicGrid& gb = b.states.front().velocity.grid();
    const PeriodicGrid gc = ga.n_per_axis() <= gb.n_per_axis() ? ga : gb;
    std::vector<double> t;
    std::vector<ScalarField> ra, rb;
    std::vector<VelocityField> ua, ub;
    for (std::size_t s = 0; s < a.states.size(); ++s) {
        t.push_back(a.states[s].time);
        ra.push_back(resample(scalar_of(a.states[s]), gc));
        rb.push_back(resample(scalar_of(b.states[s]), gc));
        ua.push_back(resample(a.states[s].velocity, gc));
        ub.push_back(resample(b.states[s].velocity, gc));
    }
    return scalar_contraction_check(t, ra, ua, rb, ub, tolerance, epsilon);
}

double relative_drift(const std::vector<double>& ledger) {
    double m = 0.0;
    for (double v : ledger) m = std::max(m, std::abs(v - ledger.front()));
    return ledger.front() != 0.0 ? m / std::abs(ledger.front()) : m;
}

}  // namespace

ContractionReport density_contraction_check(const InhomTrajectory& a, const InhomTrajectory& b, double tolerance,
                                            std::optional<double> epsilon) {
    return contraction_on_coarser(a, b, tolerance, epsilon, [](const InhomState& s) -> const ScalarField& { return s.density; });
}

InhomUniquenessReport inhom_uniqueness_experiment(const ScalarField& rho0, const VelocityField& u0, const RunSpec& a,
                                                  const RunSpec& b, const InhomUniquenessOptions& options) {
    const RunSpec* specs[2] = {&a, &b};
    std::vector<std::optional<InhomTrajectory>> runs(2);
    parallel_for(2, [&](std::size_t i) {
        const VelocityField init = initial_on_grid(u0, specs[i]->grid_n);
        const ScalarField r0 = resample(rho0, init.grid());
        runs[i] = inhom_solve(r0, init, specs[i]->solver, options.pressure);
    });
    const InhomTrajectory& ta = *runs[0];
    const InhomTrajectory& tb = *runs[1];

    InhomUniquenessReport r{};
    const double tol = options.tolerance.value_or(default_tolerance(ta.max_energy_drift, tb.max_energy_drift));
    r.contraction = density_contraction_check(ta, tb, tol, options.epsilon);
    r.mass_drift_a = relative_drift(ta.mass_ledger);
    r.mass_drift_b = relative_drift(tb.mass_ledger);

    const PeriodicGrid ga = ta.states.front().velocity.grid();
    const PeriodicGrid gb = tb.states.front().velocity.grid();
    const PeriodicGrid gc = ga.n_per_axis() <= gb.n_per_axis() ? ga : gb;
    const std::size_t n = ta.states.size();
    r.weighted_energy.assign(n, 0.0);
    std::vector<std::optional<double>> alphas(n);
    parallel_for(n, [&](std::size_t s) {
        const auto& sa = ta.states[s];
        const auto& sb = tb.states[s];
        r.weighted_energy[s] = weighted_relative_energy(resample(sa.density, gc), resample(sa.velocity, gc),
                                                        resample(sb.velocity, gc));
        std::optional<double> m;
        for (const auto* st : {&sa, &sb}) {
            take_min(m, fitted(st->density, options.p_int));
            take_min(m, fitted(scaled(st->density, st->velocity), options.p_int));
            take_min(m, fitted(st->velocity, options.p_int));
        }
        alphas[s] = m;
    });
    std::optional<double> min_alpha;
    for (const auto& v : alphas) take_min(min_alpha, v);
    r.hypothesis = {min_alpha, 1.0 / 3.0, !min_alpha || *min_alpha > 1.0 / 3.0};
    r.verdict = !r.hypothesis.met ? Verdict::hypothesis_not_met
                : r.contraction.pass ? Verdict::pass
                                     : Verdict::certificate_failure;
    return r;
}

std::vector<double> BoussinesqTrajectory::times() const {
    std::vector<double> t;
    for (const auto& s : states) t.push_back(s.time);
    return t;
}

Trajectory BoussinesqTrajectory::velocity_trajectory() const {
    Trajectory t;
    t.dt = dt;
    t.config = config;
    t.energy_ledger = energy_ledger;
    t.max_energy_drift = max_energy_drift;
    for (const auto& s : states) {
        t.states.push_back({s.time, s.velocity, s.vorticity, recover_pressure(s.velocity)});
        t.enstrophy_ledger.push_back(inner(s.vorticity, s.vorticity));
    }
    return t;
}

BoussinesqTrajectory boussinesq_solve(const ScalarField& theta0, const VelocityField& u0, const std::array<double, 2>& g,
                                      const SolverConfig& config) {
    const PeriodicGrid& grid = u0.grid();
    if (grid.dims() != 2) throw ConfigError("boussinesq: only dims == 2 is supported");
    require_same_grid(grid, theta0.grid(), "boussinesq_solve");
    if (!(config.cfl > 0.0)) throw ConfigError("solver: cfl must be positive");
    if (divergence_ratio(u0) > 1e-10) throw ConfigError("boussinesq: initial velocity is not divergence-free");
    if (config.snapshot_stride < 1) throw ConfigError("solver: snapshot_stride must be >= 1");
    const long nsteps = step_count(config.T, config.dt);
    const auto& ops = spectral_ops(grid);

    Spectrum omega = curl2d(u0).spectrum();
    Spectrum theta = theta0.spectrum();
    const std::array<double, 2> mean0{mean(u0[0]), mean(u0[1])};
    // Mean forcing g * mean(theta); the zero mode of theta never changes.
    const double theta_bar = theta.coeffs[0].real();
    const std::array<double, 2> mean_rate{g[0] * theta_bar, g[1] * theta_bar};
    const bool mean_moves = mean_rate[0] != 0.0 || mean_rate[1] != 0.0;
    const bool forced = g[0] != 0.0 || g[1] != 0.0;

    auto mean_at = [&](double t) {
        if (!mean_moves) return mean0;
        return std::array<double, 2>{mean0[0] + mean_rate[0] * t, mean0[1] + mean_rate[1] * t};
    };
    struct Rates {
        Spectrum dw, dth;
    };
    auto rhs = [&](const Spectrum& w, const Spectrum& th, const std::array<double, 2>& U) {
        const VelocityField u = detail::velocity_from_vorticity(w, U);
        Spectrum dw = detail::advection_rhs(w, u);
        if (forced) {
            for (std::size_t i = 0; i < dw.coeffs.size(); ++i) {
                if (!ops.keep[i] || i == 0) continue;
                const Complex b = Complex(0.0, ops.k0[i]) * (th.coeffs[i] * g[1]) -
                                  Complex(0.0, ops.k1[i]) * (th.coeffs[i] * g[0]);
                if (b != Complex(0.0)) dw.coeffs[i] += b;
            }
        }
        return Rates{std::move(dw), detail::transport_rhs(ScalarField::from_spectrum(th), u)};
    };

    BoussinesqTrajectory traj;
    traj.dt = config.dt;
    traj.g = g;
    traj.config = config;
    double time = 0.0;
    auto record = [&](long k) {
        BoussinesqState s{static_cast<double>(k) * config.dt, ScalarField::from_spectrum(theta),
                          detail::velocity_from_vorticity(omega, mean_at(time)), ScalarField::from_spectrum(omega)};
        traj.energy_ledger.push_back(0.5 * inner(s.velocity, s.velocity));
        traj.theta_ledger.push_back(integral(s.theta));
        traj.states.push_back(std::move(s));
    };
    record(0);
    const double e0 = traj.energy_ledger.front();
    const double dt = config.dt;
    for (long k = 1; k <= nsteps; ++k) {
        const auto U = mean_at(time);
        detail::check_cfl(detail::velocity_from_vorticity(omega, U), dt, config.cfl);
        const Rates k1 = rhs(omega, theta, U);
        const Rates k2 = rhs(detail::axpy(omega, 0.5 * dt, k1.dw), detail::axpy(theta, 0.5 * dt, k1.dth),
                             mean_at(time + 0.5 * dt));
        const Rates k3 = rhs(detail::axpy(omega, 0.5 * dt, k2.dw), detail::axpy(theta, 0.5 * dt, k2.dth),
                             mean_at(time + 0.5 * dt));
        const Rates k4 = rhs(detail::axpy(omega, dt, k3.dw), detail::axpy(theta, dt, k3.dth), mean_at(time + dt));
        Spectrum next_w = detail::rk4_combine(omega, dt, k1.dw, k2.dw, k3.dw, k4.dw);
        Spectrum next_t = detail::rk4_combine(theta, dt, k1.dth, k2.dth, k3.dth, k4.dth);
        const double tn = static_cast<double>(k) * dt;
        if (!detail::all_finite(next_w) || !detail::all_finite(next_t)) {
            std::ostringstream msg;
            msg << "boussinesq: non-finite state at t = " << tn;
            throw SolverAbort(msg.str(), tn);
        }
        omega = std::move(next_w);
        theta = std::move(next_t);
        time = tn;
        if (k % config.snapshot_stride == 0 || k == nsteps) {
            record(k);
            traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(traj.energy_ledger.back() - e0));
        }
    }
    return traj;
}

BoussinesqUniquenessReport boussinesq_uniqueness_experiment(const ScalarField& theta0, const VelocityField& u0,
                                                            const std::array<double, 2>& g, const RunSpec& a,
                                                            const RunSpec& b, const UniquenessOptions& options) {
    const RunSpec* specs[2] = {&a, &b};
    std::vector<std::optional<BoussinesqTrajectory>> runs(2);
    parallel_for(2, [&](std::size_t i) {
        const VelocityField init = initial_on_grid(u0, specs[i]->grid_n);
        runs[i] = boussinesq_solve(resample(theta0, init.grid()), init, g, specs[i]->solver);
    });
    const BoussinesqTrajectory& ta = *runs[0];
    const BoussinesqTrajectory& tb = *runs[1];

    BoussinesqUniquenessReport r{};
    r.velocity = certify_trajectories(ta.velocity_trajectory(), tb.velocity_trajectory(), options);
    r.theta = contraction_on_coarser(ta, tb, r.velocity.certify_tolerance, options.working_epsilon,
                                     [](const BoussinesqState& s) -> const ScalarField& { return s.theta; });
    std::optional<double> min_alpha;
    for (const auto* t : {&ta, &tb}) {
        for (const auto& s : t->states) {
            take_min(min_alpha, fitted(s.theta, options.p_int));
            take_min(min_alpha, fitted(scaled(s.theta, s.velocity), options.p_int));
            take_min(min_alpha, fitted(s.velocity, options.p_int));
        }
    }
    r.hypothesis = {min_alpha, 1.0 / 3.0, !min_alpha || *min_alpha > 1.0 / 3.0};
    if (!r.hypothesis.met) {
        r.verdict = Verdict::hypothesis_not_met;
    } else if (!r.velocity.certificate.pass || !r.theta.pass) {
        r.verdict = Verdict::certificate_failure;
    } else {
        r.verdict = Verdict::pass;
    }
    return r;
}

}  // namespace eulerlab
