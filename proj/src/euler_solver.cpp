#include "eulerlab/euler_solver.hpp"

#include "eulerlab/calculus.hpp"
#include "eulerlab/detail/vorticity.hpp"
#include "eulerlab/error.hpp"

#include <cmath>
#include <sstream>

namespace eulerlab {

using detail::spectral_ops;

std::vector<double> Trajectory::times() const {
    std::vector<double> t;
    for (const auto& s : states) t.push_back(s.time);
    return t;
}

VorticitySolver::VorticitySolver(const VelocityField& u0, double cfl)
    : grid_(u0.grid()), cfl_(cfl), omega_(u0.grid()) {
    if (grid_.dims() != 2) throw ConfigError("solver: only dims == 2 is supported");
    if (!(cfl > 0.0)) throw ConfigError("solver: cfl must be positive");
    if (divergence_ratio(u0) > 1e-10) throw ConfigError("solver: initial velocity is not divergence-free");
    omega_ = curl2d(u0).spectrum();
    mean_ = {mean(u0[0]), mean(u0[1])};
}

VelocityField VorticitySolver::velocity() const { return detail::velocity_from_vorticity(omega_, mean_); }

ScalarField VorticitySolver::vorticity() const { return ScalarField::from_spectrum(omega_); }

double VorticitySolver::energy() const {
    const VelocityField u = velocity();
    return 0.5 * inner(u, u);
}

SolverState VorticitySolver::state() const {
    VelocityField u = velocity();
    ScalarField p = recover_pressure(u);
    return SolverState{time_, std::move(u), vorticity(), std::move(p)};
}

double VorticitySolver::max_stable_dt() const {
    const double umax = max_norm(velocity());
    return umax == 0.0 ? INFINITY : cfl_ * grid_.spacing() / umax;
}

void VorticitySolver::step(double dt) {
    auto rhs = [this](const Spectrum& w) { return detail::advection_rhs(w, detail::velocity_from_vorticity(w, mean_)); };
    detail::check_cfl(velocity(), dt, cfl_);
    const Spectrum k1 = rhs(omega_);
    const Spectrum k2 = rhs(detail::axpy(omega_, 0.5 * dt, k1));
    const Spectrum k3 = rhs(detail::axpy(omega_, 0.5 * dt, k2));
    const Spectrum k4 = rhs(detail::axpy(omega_, dt, k3));
    Spectrum next = detail::rk4_combine(omega_, dt, k1, k2, k3, k4);
    if (!detail::all_finite(next)) {
        std::ostringstream msg;
        msg << "solver: non-finite vorticity at t = " << time_ + dt;
        throw SolverAbort(msg.str(), time_ + dt);
    }
    omega_ = std::move(next);
    time_ += dt;
}

SolverState step(const SolverState& state, double dt, double cfl) {
    VorticitySolver s(state.velocity, cfl);
    s.step(dt);
    SolverState out = s.state();
    out.time = state.time + dt;
    return out;
}

long step_count(double T, double dt) {
    if (!(dt > 0.0)) throw ConfigError("solver: dt must be positive");
    if (!(T >= 0.0)) throw ConfigError("solver: T must be non-negative");
    const long n = std::lround(T / dt);
    if (std::abs(static_cast<double>(n) * dt - T) > 1e-9 * std::max(1.0, T)) {
        std::ostringstream msg;
        msg << "solver: T = " << T << " is not a whole number of steps dt = " << dt;
        throw ConfigError(msg.str());
    }
    return n;
}

Trajectory solve(const VelocityField& u0, const SolverConfig& config) {
    const long nsteps = step_count(config.T, config.dt);
    if (config.snapshot_stride < 1) throw ConfigError("solver: snapshot_stride must be >= 1");
    VorticitySolver solver(u0, config.cfl);
    Trajectory traj;
    traj.dt = config.dt;
    traj.config = config;

    auto record = [&](long k) {
        SolverState s = solver.state();
        s.time = static_cast<double>(k) * config.dt;
        traj.energy_ledger.push_back(0.5 * inner(s.velocity, s.velocity));
        traj.enstrophy_ledger.push_back(inner(s.vorticity, s.vorticity));
        traj.states.push_back(std::move(s));
    };
    record(0);
    const double e0 = traj.energy_ledger.front();
    for (long k = 1; k <= nsteps; ++k) {
        try {
            solver.step(config.dt);
        } catch (const SolverAbort& e) {
            throw SolverAbort(e.what(), static_cast<double>(k) * config.dt);
        }
        if (k % config.snapshot_stride == 0 || k == nsteps) {
            record(k);
            traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(traj.energy_ledger.back() - e0));
        } else {
            traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(solver.energy() - e0));
        }
    }
    return traj;
}

ScalarField recover_pressure(const VelocityField& u) {
    const PeriodicGrid& g = u.grid();
    const int d = g.dims();
    std::vector<std::vector<double>> k(static_cast<std::size_t>(d), std::vector<double>(g.spectral_size()));
    for (std::size_t i = 0; i < g.spectral_size(); ++i) {
        const ModeIndex m = g.mode(i);
        for (int a = 0; a < d; ++a) k[a][i] = g.is_nyquist(m[a]) ? 0.0 : kPi * m[a];
    }
    Spectrum p(g);
    for (int a = 0; a < d; ++a) {
        for (int b = a; b < d; ++b) {
            const Spectrum s = (u[a] * u[b]).spectrum();
            const double mult = a == b ? 1.0 : 2.0;
            for (std::size_t i = 0; i < g.spectral_size(); ++i) p.coeffs[i] -= mult * k[a][i] * k[b][i] * s.coeffs[i];
        }
    }
    for (std::size_t i = 0; i < g.spectral_size(); ++i) {
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) k2 += k[a][i] * k[a][i];
        p.coeffs[i] = k2 > 0.0 ? p.coeffs[i] / k2 : Complex(0.0);
    }
    return ScalarField::from_spectrum(p);
}

AdmissibilityReport admissibility_check(const std::vector<double>& ledger, double tolerance) {
    AdmissibilityReport r{true, 0.0, std::nullopt};
    for (std::size_t i = 0; i < ledger.size(); ++i) {
        for (std::size_t j = i + 1; j < ledger.size(); ++j) {
            const double v = ledger[j] - ledger[i];
            r.max_violation = std::max(r.max_violation, v);
            if (v > tolerance && !r.first_violation) r.first_violation = std::make_pair(i, j);
        }
    }
    r.pass = !r.first_violation.has_value();
    return r;
}

AdmissibilityReport admissibility_check(const Trajectory& traj, double tolerance) {
    return admissibility_check(traj.energy_ledger, tolerance);
}

double WeakTestFunction::profile(double t) const {
    if (t > support_end) return 0.0;
    const double s = t / support_end;
    return 1.0 - s * s;
}

double WeakTestFunction::profile_derivative(double t) const {
    if (t > support_end) return 0.0;
    return -2.0 * t / (support_end * support_end);
}

namespace {

struct LowMode {
    int k0, k1;
    bool sine;
};

std::vector<LowMode> low_modes(int count) {
    static const LowMode table[] = {{1, 0, true},  {0, 1, true},  {1, 1, false}, {1, -1, true}, {2, 0, false},
                                    {0, 2, true},  {2, 1, true},  {1, 2, false}, {2, -1, false}, {1, -2, true},
                                    {3, 0, true},  {0, 3, false}, {2, 2, true},  {3, 1, false}, {1, 3, true}};
    const int available = static_cast<int>(std::size(table));
    if (count < 1 || count > available) {
        throw ConfigError("weak tests: count must lie in [1, " + std::to_string(available) + "]");
    }
    return std::vector<LowMode>(table, table + count);
}

ScalarField trig_mode(const PeriodicGrid& g, const LowMode& m) {
    return ScalarField::sample(g, [m](const Point& x) {
        const double arg = kPi * (m.k0 * x[0] + m.k1 * x[1]);
        return m.sine ? std::sin(arg) : std::cos(arg);
    });
}

}  // namespace

std::vector<WeakTestFunction> low_mode_vector_tests(const PeriodicGrid& grid, int count, double support_end) {
    if (grid.dims() != 2) throw ConfigError("weak tests: dims == 2 required");
    std::vector<WeakTestFunction> out;
    for (const LowMode& m : low_modes(count)) {
        const ScalarField phi = trig_mode(grid, m);
        VelocityField psi({partial(phi, 1), -1.0 * partial(phi, 0)}, true);
        out.push_back({std::move(psi), std::nullopt, support_end});
    }
    return out;
}

std::vector<WeakTestFunction> low_mode_scalar_tests(const PeriodicGrid& grid, int count, double support_end) {
    if (grid.dims() != 2) throw ConfigError("weak tests: dims == 2 required");
    std::vector<WeakTestFunction> out;
    for (const LowMode& m : low_modes(count)) out.push_back({std::nullopt, trig_mode(grid, m), support_end});
    return out;
}

double weak_residual(const Trajectory& traj, const WeakTestFunction& test) {
    if (traj.states.size() < 2) return 0.0;
    if (test.vector.has_value() == test.scalar.has_value()) {
        throw ConfigError("weak_residual: test must be exactly one of vector or scalar");
    }
    const PeriodicGrid& g = traj.states.front().velocity.grid();
    const std::size_t n = traj.states.size();
    std::vector<double> integrand(n);
    double rhs = 0.0;
    if (test.vector) {
        const VelocityField& psi = *test.vector;
        require_same_grid(g, psi.grid(), "weak_residual");
        if (max_norm(divergence(psi)) > 1e-12 * std::max(1.0, max_norm(psi))) {
            throw ConfigError("weak_residual: vector test function is not divergence-free");
        }
        std::vector<VelocityField> grad;  // grad[i][j] = d_j psi_i
        for (int i = 0; i < 2; ++i) grad.push_back(gradient(psi[i]));
        for (std::size_t s = 0; s < n; ++s) {
            const SolverState& st = traj.states[s];
            const VelocityField& u = st.velocity;
            double flux = 0.0;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) flux += inner(u[i] * u[j], grad[i][j]);
            }
            const double up = inner(u, psi);
            integrand[s] = test.profile_derivative(st.time) * up + test.profile(st.time) * flux;
        }
        const auto& first = traj.states.front();
        const auto& last = traj.states.back();
        rhs = test.profile(last.time) * inner(last.velocity, psi) - test.profile(first.time) * inner(first.velocity, psi);
    } else {
        const ScalarField& phi = *test.scalar;
        require_same_grid(g, phi.grid(), "weak_residual");
        const VelocityField dphi = gradient(phi);
        for (std::size_t s = 0; s < n; ++s) {
            const SolverState& st = traj.states[s];
            integrand[s] = test.profile(st.time) * inner(st.velocity, dphi);
        }
    }
    double lhs = 0.0;
    for (std::size_t s = 1; s < n; ++s) {
        lhs += 0.5 * (traj.states[s].time - traj.states[s - 1].time) * (integrand[s] + integrand[s - 1]);
    }
    return std::abs(lhs - rhs);
}

}  // namespace eulerlab
