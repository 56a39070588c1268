#include "eulerlab/commutator.hpp"

#include "eulerlab/besov.hpp"
#include "eulerlab/calculus.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eulerlab {
namespace {

// Row a of div(A (x) B): sum_b d_b (A_a B_b).
VelocityField div_outer(const VelocityField& a, const VelocityField& b) {
    const int d = a.dims();
    std::vector<ScalarField> rows;
    for (int i = 0; i < d; ++i) {
        std::vector<ScalarField> flux;
        for (int j = 0; j < d; ++j) flux.push_back(a[i] * b[j]);
        rows.push_back(divergence(VelocityField(std::move(flux))));
    }
    return VelocityField(std::move(rows));
}

double trilinear(const VelocityField& u, const VelocityField& w, const MollifierKernel& kernel) {
    require_same_grid(u.grid(), w.grid(), "cet_trilinear");
    require_same_grid(u.grid(), kernel.grid(), "cet_trilinear");
    const int d = u.dims();
    const VelocityField ue = mollify(u, kernel);
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const ScalarField m = mollify(u[i] * u[j], kernel) - ue[i] * ue[j];
            total += inner(m, partial(w[i], j));
        }
    }
    return total;
}

}  // namespace

std::string to_string(ScalingQuantity q) {
    return q == ScalingQuantity::cet_trilinear ? "cet_trilinear" : "convective_commutator_lp";
}

VelocityField convective_commutator(const VelocityField& v, const MollifierKernel& kernel) {
    require_same_grid(v.grid(), kernel.grid(), "convective_commutator");
    const VelocityField ve = mollify(v, kernel);
    return div_outer(ve, ve) - mollify(div_outer(v, v), kernel);
}

double cet_trilinear(const VelocityField& u, const VelocityField& v, const MollifierKernel& kernel) {
    require_same_grid(u.grid(), v.grid(), "cet_trilinear");
    return trilinear(u, mollify(v, kernel) - mollify(u, kernel), kernel);
}

double cet_trilinear_v_only(const VelocityField& u, const VelocityField& v, const MollifierKernel& kernel) {
    require_same_grid(u.grid(), v.grid(), "cet_trilinear");
    return trilinear(u, mollify(v, kernel), kernel);
}

void validate_dyadic_epsilons(const PeriodicGrid& grid, const std::vector<double>& epsilons) {
    if (epsilons.size() < 4) throw ConfigError("scaling: at least 4 dyadic epsilons are required");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (i > 0 && std::abs(epsilons[i - 1] / epsilons[i] - 2.0) > 1e-9) {
            throw ConfigError("scaling: epsilons must halve at every step");
        }
        make_kernel(grid, epsilons[i]);  // range check with a grid-size diagnostic
    }
}

ScalingReport scaling_experiment(const std::vector<VelocityField>& fields, ScalingQuantity quantity,
                                 const std::vector<double>& epsilons, const ScalingOptions& options) {
    return ensemble_scaling_experiment({fields}, quantity, epsilons, options);
}

ScalingReport ensemble_scaling_experiment(const std::vector<std::vector<VelocityField>>& samples,
                                          ScalingQuantity quantity, const std::vector<double>& epsilons,
                                          const ScalingOptions& options) {
    if (samples.empty()) throw ConfigError("scaling: at least one sample is required");
    const std::size_t needed = quantity == ScalingQuantity::cet_trilinear ? 2 : 1;
    for (const auto& fields : samples) {
        if (fields.size() != needed) {
            throw ConfigError("scaling: " + to_string(quantity) + " takes " + std::to_string(needed) + " field(s)");
        }
    }
    const PeriodicGrid& grid = samples.front().front().grid();
    for (const auto& fields : samples) {
        for (const auto& f : fields) require_same_grid(grid, f.grid(), "scaling_experiment");
    }
    validate_dyadic_epsilons(grid, epsilons);
    const double p = options.p_int;

    ScalingReport r{};
    r.quantity = quantity;
    r.epsilons = epsilons;
    r.p_int = p;
    r.samples = samples.size();
    r.slope_tolerance = options.slope_tolerance;
    r.fitted_alpha = 1.0;
    for (const auto& fields : samples) {
        r.fitted_alpha = std::min(r.fitted_alpha, besov_seminorm(fields.front(), 0.5, p).fitted_alpha.value_or(1.0));
    }
    r.alpha = options.alpha.value_or(r.fitted_alpha);
    r.seminorm = 0.0;
    for (const auto& fields : samples) {
        r.seminorm = std::max(r.seminorm,
                              besov_seminorm(fields.front(), std::clamp(r.alpha, 1e-6, 1.0 - 1e-6), p).seminorm);
    }
    const bool cet = quantity == ScalingQuantity::cet_trilinear;
    r.theory_slope = cet ? 3.0 * r.alpha - 1.0 : 2.0 * r.alpha - 1.0;

    // Root mean square over samples; a single sample gives the plain magnitude.
    const std::size_t ne = epsilons.size(), ns = samples.size();
    std::vector<double> values(ne * ns, 0.0);
    parallel_for(ne * ns, [&](std::size_t t) {
        const std::size_t i = t / ns, s = t % ns;
        const auto& fields = samples[s];
        const MollifierKernel k = make_kernel(grid, epsilons[i]);
        values[t] = cet ? std::abs(cet_trilinear(fields[0], fields[1], k))
                        : lp_norm(convective_commutator(fields[0], k), std::max(1.0, p / 2.0));
    });
    r.magnitudes.assign(ne, 0.0);
    for (std::size_t i = 0; i < ne; ++i) {
        if (ns == 1) {
            r.magnitudes[i] = values[i];
            continue;
        }
        double sq = 0.0;
        for (std::size_t s = 0; s < ns; ++s) sq += values[i * ns + s] * values[i * ns + s];
        r.magnitudes[i] = std::sqrt(sq / static_cast<double>(ns));
    }

    r.vacuous = std::all_of(r.magnitudes.begin(), r.magnitudes.end(), [](double m) { return m < 1e-14; });
    const double power = cet ? 3.0 : 2.0;
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        const double denom = std::pow(epsilons[i], r.theory_slope) * std::pow(r.seminorm, power);
        const double c = denom > 0.0 ? r.magnitudes[i] / denom : 0.0;
        r.constants.push_back(c);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    r.constant_spread = cmin > 0.0 ? cmax / cmin : 0.0;

    if (r.vacuous) {
        r.pass = true;
        return r;
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(r.magnitudes[i] > 0.0)) continue;
        lx.push_back(std::log(epsilons[i]));
        ly.push_back(std::log(r.magnitudes[i]));
    }
    if (lx.size() >= 2) r.fitted_slope = least_squares_slope(lx, ly);
    r.pass = r.fitted_slope && *r.fitted_slope >= r.theory_slope - r.slope_tolerance;
    return r;
}

}  // namespace eulerlab
