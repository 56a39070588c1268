#pragma once

#include "eulerlab/euler_solver.hpp"
#include "eulerlab/field.hpp"
#include "eulerlab/uniqueness.hpp"

#include <array>
#include <optional>
#include <vector>

namespace eulerlab {

/// Conservative advection d_t rho + div(rho u) = 0 with u frozen over the step: RK4 in time,
/// spectral divergence, 2/3-rule truncation, zero mode untouched. CFL as in the solver.
ScalarField transport_step(const ScalarField& rho, const VelocityField& u, double dt, double cfl = 0.5);

// ---- variable density ----------------------------------------------------------------

struct InhomState {
    double time;
    ScalarField density;
    VelocityField velocity;
    ScalarField pressure;  // zero mean
};

struct InhomTrajectory {
    std::vector<InhomState> states;
    double dt;
    std::vector<double> energy_ledger;  // 1/2 int rho |u|^2
    std::vector<double> mass_ledger;    // int rho
    double max_energy_drift = 0.0;
    int max_pressure_iterations = 0;
    SolverConfig config;

    std::vector<double> times() const;
};

struct PressureSolveOptions {
    double tolerance = 1e-10;  // relative residual
    int max_iterations = 500;
};

/// Solve -div(grad p / rho) = f (f zero mean) by conjugate gradients preconditioned with the
/// constant-coefficient inverse Laplacian scaled by mean(1/rho). Returns the iteration count;
/// SolverAbort (carrying `time`) if the residual does not reach the tolerance.
int solve_variable_poisson(const ScalarField& rho, const ScalarField& f, ScalarField& p,
                           const PressureSolveOptions& options, double time = 0.0);

/// RK4 on (rho, u): d_t u = -mask(u.grad u) - grad p / rho with p from the variable-density
/// Poisson equation keeping div u = 0, and d_t rho = -mask(div(rho u)).
/// SolverAbort on nonpositive density, non-finite data or pressure non-convergence.
InhomTrajectory inhom_solve(const ScalarField& rho0, const VelocityField& u0, const SolverConfig& config,
                            const PressureSolveOptions& pressure = {});

// ---- scalar contraction ----------------------------------------------------------------

struct ContractionReport {
    std::vector<double> times;
    std::vector<double> differences;  // int 1/2 |rho - r|^2
    std::vector<double> budget_rate;  // |int [commutator_A - commutator_B] . grad(rho_e - r_e)|
    std::vector<double> cumulative_budget;
    double epsilon;
    double tolerance;
    double worst_slack;
    std::size_t worst_index1 = 0, worst_index2 = 0;
    std::optional<std::pair<std::size_t, std::size_t>> first_violation;
    bool pass;
};

/// For all ordered pairs: D(t2) <= D(t1) + int_{t1}^{t2} budget_rate + tolerance, where the
/// budget rate uses the transport commutators (rho u)_e - rho_e u_e of both solutions.
/// Fields are given per time slice on one common grid.
ContractionReport scalar_contraction_check(const std::vector<double>& times, const std::vector<ScalarField>& rho_a,
                                           const std::vector<VelocityField>& u_a, const std::vector<ScalarField>& rho_b,
                                           const std::vector<VelocityField>& u_b, double tolerance,
                                           std::optional<double> epsilon = std::nullopt);

/// Trajectories are compared on the coarser grid after spectral truncation.
ContractionReport density_contraction_check(const InhomTrajectory& a, const InhomTrajectory& b, double tolerance,
                                            std::optional<double> epsilon = std::nullopt);

struct InhomUniquenessReport {
    ContractionReport contraction;
    std::vector<double> weighted_energy;  // E1 = 1/2 int rho |u - v|^2 on the comparison grid
    HypothesisCheck hypothesis;           // min fitted alpha over rho, r, rho u, r v, u, v vs 1/3
    double mass_drift_a, mass_drift_b;    // relative
    Verdict verdict;
};

struct InhomUniquenessOptions {
    double p_int = 3.0;
    std::optional<double> tolerance;  // default max(10 * energy drift, 1e-12)
    std::optional<double> epsilon;    // default 4h on the comparison grid
    PressureSolveOptions pressure;
};

InhomUniquenessReport inhom_uniqueness_experiment(const ScalarField& rho0, const VelocityField& u0, const RunSpec& a,
                                                  const RunSpec& b, const InhomUniquenessOptions& options = {});

// ---- Boussinesq --------------------------------------------------------------------------

struct BoussinesqState {
    double time;
    ScalarField theta;
    VelocityField velocity;
    ScalarField vorticity;
};

struct BoussinesqTrajectory {
    std::vector<BoussinesqState> states;
    double dt;
    std::array<double, 2> g;
    std::vector<double> energy_ledger;  // 1/2 int |u|^2
    std::vector<double> theta_ledger;   // int theta
    double max_energy_drift = 0.0;
    SolverConfig config;

    std::vector<double> times() const;
    /// Velocity/vorticity part as a homogeneous trajectory (pressure recovered from u).
    Trajectory velocity_trajectory() const;
};

/// Vorticity form d_t w + u.grad w = d1(theta g2) - d2(theta g1) with theta transported
/// conservatively, one joint RK4 step sharing the homogeneous solver's operators. The mean
/// velocity follows d_t U = g mean(theta).
BoussinesqTrajectory boussinesq_solve(const ScalarField& theta0, const VelocityField& u0, const std::array<double, 2>& g,
                                      const SolverConfig& config);

struct BoussinesqUniquenessReport {
    UniquenessReport velocity;
    ContractionReport theta;
    HypothesisCheck hypothesis;  // min over theta_i, theta_i u_i, u_i vs 1/3
    Verdict verdict;
};

BoussinesqUniquenessReport boussinesq_uniqueness_experiment(const ScalarField& theta0, const VelocityField& u0,
                                                            const std::array<double, 2>& g, const RunSpec& a,
                                                            const RunSpec& b, const UniquenessOptions& options = {});

}  // namespace eulerlab
