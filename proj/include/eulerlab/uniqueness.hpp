#pragma once

#include "eulerlab/euler_solver.hpp"
#include "eulerlab/field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eulerlab {

/// int 1/2 |u - v|^2 dx.
double relative_energy(const VelocityField& u, const VelocityField& v);
/// int 1/2 rho |u - v|^2 dx (rho > 0).
double weighted_relative_energy(const ScalarField& rho, const VelocityField& u, const VelocityField& v);

/// max over grid points of the largest eigenvalue of -sym grad(v_eps): the smallest C with
/// z.grad(v_eps).z >= -C |z|^2 everywhere. Clipped below at 0.
double one_sided_lipschitz(const VelocityField& v, double reg_epsilon);

struct RelativeEnergySeries {
    std::vector<double> times;
    std::vector<double> values;
    std::string pair_id;
};

struct LipschitzSeries {
    std::vector<double> times;
    std::vector<double> c_values;
    double reg_epsilon;
};

struct GronwallCertificate {
    double tau1 = 0.0, tau2 = 0.0;
    std::size_t index1 = 0, index2 = 0;
    double lhs = 0.0;    // E(tau2)
    double bound = 0.0;  // E(tau1) exp(int C) + budget
    double slack = 0.0;  // bound - lhs at the worst pair
    double commutator_budget = 0.0;
    double tolerance = 0.0;
    bool pass = true;  // slack >= -tolerance
};

/// Checks E(t2) <= E(t1) exp(int_{t1}^{t2} C dt) + budget + tolerance for every ordered pair
/// (trapezoid integral of C) and reports the pair with the smallest slack.
GronwallCertificate gronwall_certify(const RelativeEnergySeries& energy, const LipschitzSeries& lipschitz,
                                     double commutator_budget, double certify_tolerance);

/// Cumulative trapezoid integral, result[0] = 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& y);

enum class CertificatePath { trilinear, commutator };
std::string to_string(CertificatePath p);

enum class Verdict { pass, certificate_failure, hypothesis_not_met };
std::string to_string(Verdict v);
/// Process exit status for a verdict: 0, 2 or 3.
int exit_code(Verdict v);

struct RunSpec {
    int grid_n;
    SolverConfig solver;
};

struct UniquenessOptions {
    double p_int = 3.0;
    CertificatePath path = CertificatePath::commutator;
    /// Dyadic sweep for the budget trend; default {32h, 16h, 8h, 4h} on the comparison grid.
    std::vector<double> epsilons;
    /// Working scale for budget and the Lipschitz estimate; default 4h on the comparison grid.
    std::optional<double> working_epsilon;
    /// Exponent in the budget rate; default the hypothesis exponent (clamped below 1).
    std::optional<double> alpha;
    /// Default max(10 * measured energy drift of the two runs, 1e-12).
    std::optional<double> certify_tolerance;
};

struct HypothesisCheck {
    std::optional<double> fitted_alpha;  // empty for fields without translation differences
    double required_alpha;
    bool met;
};

struct UniquenessReport {
    RelativeEnergySeries energy;
    LipschitzSeries lipschitz;
    std::vector<double> slice_alpha;  // per-slice fit (NaN when unavailable)
    std::vector<double> budget_epsilons;
    std::vector<double> budget_values;
    double working_epsilon;
    double working_budget;
    double c_fit;
    double alpha_used;
    double certify_tolerance;
    double energy_drift_a, energy_drift_b;
    int comparison_n;
    CertificatePath path;
    GronwallCertificate certificate;
    HypothesisCheck hypothesis;
    Verdict verdict;
};

/// Runs both configurations from u0 (resampled spectrally to each grid), compares them on the
/// coarser grid, and certifies the relative-energy evolution. v is the higher-resolution run.
UniquenessReport uniqueness_experiment(const VelocityField& u0, const RunSpec& a, const RunSpec& b,
                                       const UniquenessOptions& options = {});

/// Post-processing half of the experiment on already computed trajectories.
UniquenessReport certify_trajectories(const Trajectory& ta, const Trajectory& tb, const UniquenessOptions& options);

/// Spectral resample onto grid n and re-flag as divergence-free when it is.
VelocityField initial_on_grid(const VelocityField& u0, int n);

/// Default budget sweep {32h, 16h, 8h, 4h}, trimmed to epsilons <= 1/2.
std::vector<double> default_epsilons(const PeriodicGrid& g);

}  // namespace eulerlab
