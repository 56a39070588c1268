#pragma once

#include "eulerlab/field.hpp"

#include <optional>
#include <vector>

namespace eulerlab {

/// Shift vector in domain units; each component must be a whole number of grid steps.
using Shift = std::array<double, kMaxDims>;

/// Which translations probe the seminorm. Magnitudes are spacing*2^j along both axes
/// and both diagonals of the first two axes, up to max_magnitude.
struct ShiftPolicy {
    double max_magnitude = 0.5;
    /// Shifts shorter than fit_min_factor*spacing are excluded from the exponent fit.
    double fit_min_factor = 4.0;
    bool diagonals = true;
};

struct ShiftSample {
    double magnitude;
    double lp_diff_norm;
    double ratio;  // lp_diff_norm / magnitude^alpha
};

struct BesovEstimate {
    double alpha;
    double p_int;
    double seminorm;
    std::vector<ShiftSample> shift_table;  // increasing magnitude
    /// Least-squares log-log slope; empty when fewer than 3 distinct magnitudes are usable.
    std::optional<double> fitted_alpha;
};

/// Lp norm of h(. + xi) - h by exact circular index shift.
double translation_difference_norm(const ScalarField& h, const Shift& xi, double p_int);
double translation_difference_norm(const VelocityField& h, const Shift& xi, double p_int);

BesovEstimate besov_seminorm(const ScalarField& h, double alpha, double p_int, const ShiftPolicy& policy = {});
BesovEstimate besov_seminorm(const VelocityField& h, double alpha, double p_int, const ShiftPolicy& policy = {});

/// fitted_alpha under the given policy; ConfigError when fewer than 3 magnitudes are usable.
double fit_regularity_exponent(const ScalarField& h, double p_int, const ShiftPolicy& policy = {});
double fit_regularity_exponent(const VelocityField& h, double p_int, const ShiftPolicy& policy = {});

/// Unweighted least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Plain CSV with header xi_magnitude,lp_diff_norm,ratio.
std::string shift_table_csv(const BesovEstimate& estimate);

}  // namespace eulerlab
