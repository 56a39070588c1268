#include "eulerlab/besov.hpp"

#include "eulerlab/calculus.hpp"
#include "eulerlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace eulerlab {
namespace {

ModeIndex to_steps(const PeriodicGrid& g, const Shift& xi) {
    ModeIndex steps{0, 0, 0};
    for (int a = 0; a < g.dims(); ++a) {
        const double s = xi[a] / g.spacing();
        const double r = std::round(s);
        if (std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s))) {
            std::ostringstream msg;
            msg << "besov: shift component " << xi[a] << " is not a multiple of spacing " << g.spacing();
            throw ConfigError(msg.str());
        }
        steps[a] = static_cast<int>(r);
    }
    return steps;
}

// sum |d|^p over the grid, where d is the pointwise (Euclidean) difference magnitude.
double diff_power_sum(const std::vector<const ScalarField*>& comps, const ModeIndex& steps, double p) {
    const PeriodicGrid& g = comps.front()->grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        ModeIndex idx = g.sample_index(i);
        for (int a = 0; a < g.dims(); ++a) idx[a] += steps[a];
        const std::size_t j = g.flat_index(idx);
        double m2 = 0.0;
        for (const ScalarField* c : comps) {
            const double d = (*c)[j] - (*c)[i];
            m2 += d * d;
        }
        sum += p == 2.0 ? m2 : std::pow(m2, 0.5 * p);
    }
    return sum;
}

double diff_norm(const std::vector<const ScalarField*>& comps, const Shift& xi, double p) {
    if (!(p >= 1.0)) throw ConfigError("besov: p_int must be >= 1");
    const PeriodicGrid& g = comps.front()->grid();
    const ModeIndex steps = to_steps(g, xi);
    return std::pow(diff_power_sum(comps, steps, p) * g.cell_volume(), 1.0 / p);
}

std::vector<ModeIndex> policy_steps(const PeriodicGrid& g, const ShiftPolicy& policy) {
    std::vector<ModeIndex> dirs;
    for (int a = 0; a < g.dims(); ++a) {
        ModeIndex d{0, 0, 0};
        d[a] = 1;
        dirs.push_back(d);
    }
    if (policy.diagonals) {
        dirs.push_back({1, 1, 0});
        dirs.push_back({1, -1, 0});
    }
    std::vector<ModeIndex> out;
    for (int m = 1; m <= g.n_per_axis(); m *= 2) {
        for (const ModeIndex& d : dirs) {
            double len2 = 0.0;
            for (int a = 0; a < g.dims(); ++a) len2 += d[a] * d[a];
            if (m * g.spacing() * std::sqrt(len2) > policy.max_magnitude * (1.0 + 1e-12)) continue;
            out.push_back({d[0] * m, d[1] * m, d[2] * m});
        }
    }
    return out;
}

BesovEstimate estimate(const std::vector<const ScalarField*>& comps, double alpha, double p,
                       const ShiftPolicy& policy) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("besov: alpha must lie in (0,1)");
    if (!(p >= 1.0)) throw ConfigError("besov: p_int must be >= 1");
    const PeriodicGrid& g = comps.front()->grid();
    const double h = g.spacing();

    BesovEstimate est{alpha, p, 0.0, {}, std::nullopt};
    for (const ModeIndex& steps : policy_steps(g, policy)) {
        double len2 = 0.0;
        for (int a = 0; a < g.dims(); ++a) len2 += static_cast<double>(steps[a]) * steps[a];
        const double mag = h * std::sqrt(len2);
        const double norm = std::pow(diff_power_sum(comps, steps, p) * g.cell_volume(), 1.0 / p);
        est.shift_table.push_back({mag, norm, norm / std::pow(mag, alpha)});
    }
    std::stable_sort(est.shift_table.begin(), est.shift_table.end(),
                     [](const ShiftSample& a, const ShiftSample& b) { return a.magnitude < b.magnitude; });
    for (const auto& s : est.shift_table) est.seminorm = std::max(est.seminorm, s.ratio);

    std::vector<double> lx, ly;
    std::set<double> magnitudes;
    for (const auto& s : est.shift_table) {
        if (s.magnitude < policy.fit_min_factor * h * (1.0 - 1e-12) || !(s.lp_diff_norm > 0.0)) continue;
        lx.push_back(std::log(s.magnitude));
        ly.push_back(std::log(s.lp_diff_norm));
        magnitudes.insert(s.magnitude);
    }
    if (magnitudes.size() >= 3) est.fitted_alpha = least_squares_slope(lx, ly);
    return est;
}

std::vector<const ScalarField*> pointers(const VelocityField& u) {
    std::vector<const ScalarField*> out;
    for (const auto& c : u.components()) out.push_back(&c);
    return out;
}

double fit_or_throw(const BesovEstimate& est) {
    if (!est.fitted_alpha) {
        throw ConfigError("besov: fewer than 3 usable shift magnitudes for the exponent fit");
    }
    return *est.fitted_alpha;
}

}  // namespace

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

double translation_difference_norm(const ScalarField& h, const Shift& xi, double p_int) {
    return diff_norm({&h}, xi, p_int);
}

double translation_difference_norm(const VelocityField& h, const Shift& xi, double p_int) {
    return diff_norm(pointers(h), xi, p_int);
}

BesovEstimate besov_seminorm(const ScalarField& h, double alpha, double p_int, const ShiftPolicy& policy) {
    return estimate({&h}, alpha, p_int, policy);
}

BesovEstimate besov_seminorm(const VelocityField& h, double alpha, double p_int, const ShiftPolicy& policy) {
    return estimate(pointers(h), alpha, p_int, policy);
}

double fit_regularity_exponent(const ScalarField& h, double p_int, const ShiftPolicy& policy) {
    return fit_or_throw(besov_seminorm(h, 0.5, p_int, policy));
}

double fit_regularity_exponent(const VelocityField& h, double p_int, const ShiftPolicy& policy) {
    return fit_or_throw(besov_seminorm(h, 0.5, p_int, policy));
}

std::string shift_table_csv(const BesovEstimate& estimate) {
    std::ostringstream out;
    out.precision(17);
    out << "xi_magnitude,lp_diff_norm,ratio\n";
    for (const auto& s : estimate.shift_table) out << s.magnitude << ',' << s.lp_diff_norm << ',' << s.ratio << '\n';
    return out.str();
}

}  // namespace eulerlab
