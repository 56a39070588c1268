#pragma once

#include "eulerlab/field.hpp"
#include "eulerlab/mollify.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eulerlab {

/// div(v_e (x) v_e) - (div(v (x) v))_e, products in physical space, derivatives spectral.
VelocityField convective_commutator(const VelocityField& v, const MollifierKernel& kernel);

/// Integral of [(u (x) u)_e - u_e (x) u_e] : grad(v_e - u_e) over the torus.
double cet_trilinear(const VelocityField& u, const VelocityField& v, const MollifierKernel& kernel);

/// Same trilinear integrand with v_e alone in the gradient factor.
double cet_trilinear_v_only(const VelocityField& u, const VelocityField& v, const MollifierKernel& kernel);

enum class ScalingQuantity { convective_commutator_lp, cet_trilinear };
std::string to_string(ScalingQuantity q);

struct ScalingReport {
    ScalingQuantity quantity;
    std::vector<double> epsilons;    // strictly decreasing
    std::vector<double> magnitudes;  // per epsilon
    std::optional<double> fitted_slope;
    double theory_slope;
    double alpha;        // exponent used for the theory slope
    double fitted_alpha; // besov fit of the probed field
    double p_int;
    double seminorm;     // besov seminorm of the probed field at alpha
    /// magnitude / (eps^theory_slope * seminorm^k), k = 2 (commutator) or 3 (trilinear).
    std::vector<double> constants;
    double constant_spread;  // max/min of constants
    double slope_tolerance;
    std::size_t samples = 1;  // realizations averaged (root mean square) per epsilon
    bool vacuous;  // all magnitudes below 1e-14
    bool pass;
};

struct ScalingOptions {
    double p_int = 3.0;
    double slope_tolerance = 0.15;
    /// Exponent for the theory slope; defaults to the besov fit of the probed field.
    std::optional<double> alpha;
};

/// Fields: {v} for the commutator, {u, v} for the trilinear form (u is the probed field).
/// Requires >= 4 dyadic epsilons (each half the previous), all admissible on the grid.
ScalingReport scaling_experiment(const std::vector<VelocityField>& fields, ScalingQuantity quantity,
                                 const std::vector<double>& epsilons, const ScalingOptions& options = {});

/// Same fit on the root-mean-square magnitude over independent samples; alpha is the smallest
/// fitted exponent among the probed fields and the seminorm the largest.
ScalingReport ensemble_scaling_experiment(const std::vector<std::vector<VelocityField>>& samples,
                                          ScalingQuantity quantity, const std::vector<double>& epsilons,
                                          const ScalingOptions& options = {});

/// Throws ConfigError unless the list is >= 4 strictly halving epsilons admissible on grid.
void validate_dyadic_epsilons(const PeriodicGrid& grid, const std::vector<double>& epsilons);

}  // namespace eulerlab
