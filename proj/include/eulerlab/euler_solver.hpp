#pragma once

#include "eulerlab/field.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace eulerlab {

struct SolverConfig {
    double dt = 1e-3;
    double T = 1.0;
    /// Store every snapshot_stride-th step; the initial and final states are always stored.
    int snapshot_stride = 1;
    double cfl = 0.5;
};

struct SolverState {
    double time;
    VelocityField velocity;  // divergence-free
    ScalarField vorticity;   // d1 u2 - d2 u1
    ScalarField pressure;    // zero mean
};

struct Trajectory {
    std::vector<SolverState> states;
    double dt;
    std::vector<double> energy_ledger;     // 1/2 int |u|^2 per stored state
    std::vector<double> enstrophy_ledger;  // int omega^2 per stored state
    /// max over every step (stored or not) of |E(t) - E(0)|.
    double max_energy_drift = 0.0;
    SolverConfig config;

    std::vector<double> times() const;
};

/// Pseudo-spectral 2D vorticity dynamics d_t w + u.grad w = 0 with classical RK4 in time.
///
/// The state is the vorticity spectrum plus the (conserved) mean velocity. Velocity comes
/// from the streamfunction, psi = w/|k|^2 and u = U + (d2 psi, -d1 psi), so it is
/// divergence-free at every stage. The product u.grad w is formed in physical space and
/// truncated by the 2/3 rule.
class VorticitySolver {
public:
    /// u0 must be 2D and divergence-free (ratio <= 1e-10).
    explicit VorticitySolver(const VelocityField& u0, double cfl = 0.5);

    double time() const noexcept { return time_; }
    const PeriodicGrid& grid() const noexcept { return grid_; }
    /// Advance by dt; StepSizeError if dt exceeds cfl*spacing/max|u|, SolverAbort on NaN.
    void step(double dt);
    /// Admissible step for the current state.
    double max_stable_dt() const;

    VelocityField velocity() const;
    ScalarField vorticity() const;
    SolverState state() const;
    double energy() const;

private:
    PeriodicGrid grid_;
    double cfl_;
    double time_ = 0.0;
    std::array<double, 2> mean_{0.0, 0.0};
    Spectrum omega_;
};

/// One step from a state (pressure recomputed).
SolverState step(const SolverState& state, double dt, double cfl = 0.5);

/// RK4 trajectory from u0; ConfigError unless T is a whole number of steps.
Trajectory solve(const VelocityField& u0, const SolverConfig& config);

/// Zero-mean solution of -Lap p = div div (u (x) u).
ScalarField recover_pressure(const VelocityField& u);

/// Number of RK4 steps for (T, dt); ConfigError unless T/dt is an integer within 1e-9.
long step_count(double T, double dt);

struct AdmissibilityReport {
    bool pass;
    double max_violation;  // max over pairs of E(t2) - E(t1), clipped at 0
    std::optional<std::pair<std::size_t, std::size_t>> first_violation;  // indices (t1, t2)
};

/// Energy must be non-increasing up to tolerance over every ordered pair of ledger entries.
AdmissibilityReport admissibility_check(const std::vector<double>& energy_ledger, double tolerance);
AdmissibilityReport admissibility_check(const Trajectory& traj, double tolerance);

/// Test function chi(t) * spatial(x) with chi(t) = 1 - (t/support_end)^2 on [0, support_end].
struct WeakTestFunction {
    std::optional<VelocityField> vector;  // for the momentum identity
    std::optional<ScalarField> scalar;    // for the incompressibility identity
    double support_end;

    double profile(double t) const;
    double profile_derivative(double t) const;
};

/// Divergence-free low-mode tests psi = perp grad of cos/sin(pi k.x) for small integer k.
std::vector<WeakTestFunction> low_mode_vector_tests(const PeriodicGrid& grid, int count, double support_end);
/// Scalar trig tests cos/sin(pi k.x).
std::vector<WeakTestFunction> low_mode_scalar_tests(const PeriodicGrid& grid, int count, double support_end);

/// |lhs - rhs| of the weak identity between the first and last stored times, trapezoid in t.
/// Vector tests: int int u.d_t psi + u(x)u : grad psi  vs  <u, psi>(t2) - <u, psi>(t1).
/// Scalar tests: int int u.grad phi (right side zero).
double weak_residual(const Trajectory& traj, const WeakTestFunction& test);

}  // namespace eulerlab
