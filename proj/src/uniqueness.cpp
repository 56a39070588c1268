#include "eulerlab/uniqueness.hpp"

#include "eulerlab/besov.hpp"
#include "eulerlab/calculus.hpp"
#include "eulerlab/commutator.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/mollify.hpp"
#include "eulerlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace eulerlab {
namespace {

// Smallest eigenvalue of a symmetric 3x3 matrix (trigonometric closed form).
double min_eigen_sym3(double a00, double a11, double a22, double a01, double a02, double a12) {
    const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
    const double q = (a00 + a11 + a22) / 3.0;
    if (p1 == 0.0) return std::min({a00, a11, a22});
    const double b00 = a00 - q, b11 = a11 - q, b22 = a22 - q;
    const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const double det = b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02) + a02 * (a01 * a12 - b11 * a02);
    const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    return q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

void require_same_times(const std::vector<double>& a, const std::vector<double>& b, const char* where) {
    if (a.size() != b.size()) throw ConfigError(std::string(where) + ": time axes differ in length");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) {
            std::ostringstream msg;
            msg << where << ": time axes differ at index " << i << " (" << a[i] << " vs " << b[i] << ")";
            throw ConfigError(msg.str());
        }
    }
}

}  // namespace

double relative_energy(const VelocityField& u, const VelocityField& v) {
    require_same_grid(u.grid(), v.grid(), "relative_energy");
    const VelocityField d = u - v;
    return 0.5 * inner(d, d);
}

double weighted_relative_energy(const ScalarField& rho, const VelocityField& u, const VelocityField& v) {
    require_same_grid(u.grid(), v.grid(), "weighted_relative_energy");
    require_same_grid(u.grid(), rho.grid(), "weighted_relative_energy");
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0)) throw ConfigError("weighted_relative_energy: density must be positive");
        double d2 = 0.0;
        for (int a = 0; a < u.dims(); ++a) d2 += (u[a][i] - v[a][i]) * (u[a][i] - v[a][i]);
        s += rho[i] * d2;
    }
    return 0.5 * s * rho.grid().cell_volume();
}

double one_sided_lipschitz(const VelocityField& v, double reg_epsilon) {
    const PeriodicGrid& g = v.grid();
    const VelocityField ve = mollify(v, make_kernel(g, reg_epsilon));
    const int d = g.dims();
    std::vector<VelocityField> grad;  // grad[i][j] = d_j v_i
    for (int i = 0; i < d; ++i) grad.push_back(gradient(ve[i]));
    double c = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
        auto s = [&](int i, int j) { return 0.5 * (grad[i][j][x] + grad[j][i][x]); };
        double lmin;
        if (d == 2) {
            const double a = s(0, 0), b = s(0, 1), e = s(1, 1);
            lmin = 0.5 * (a + e) - std::sqrt(0.25 * (a - e) * (a - e) + b * b);
        } else {
            lmin = min_eigen_sym3(s(0, 0), s(1, 1), s(2, 2), s(0, 1), s(0, 2), s(1, 2));
        }
        c = std::max(c, -lmin);
    }
    return c;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return out;
}

GronwallCertificate gronwall_certify(const RelativeEnergySeries& energy, const LipschitzSeries& lipschitz,
                                     double commutator_budget, double certify_tolerance) {
    if (!(certify_tolerance > 0.0)) throw ConfigError("gronwall_certify: tolerance must be positive");
    if (energy.values.size() != energy.times.size() || lipschitz.c_values.size() != lipschitz.times.size()) {
        throw ConfigError("gronwall_certify: series length does not match its time axis");
    }
    require_same_times(energy.times, lipschitz.times, "gronwall_certify");
    const std::vector<double> cum = cumulative_trapezoid(lipschitz.times, lipschitz.c_values);

    GronwallCertificate best;
    best.commutator_budget = commutator_budget;
    best.tolerance = certify_tolerance;
    best.slack = std::numeric_limits<double>::infinity();
    const auto& t = energy.times;
    const auto& e = energy.values;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = i + 1; j < t.size(); ++j) {
            const double bound = e[i] * std::exp(cum[j] - cum[i]) + commutator_budget;
            const double slack = bound - e[j];
            if (slack < best.slack) {
                best.slack = slack;
                best.tau1 = t[i];
                best.tau2 = t[j];
                best.index1 = i;
                best.index2 = j;
                best.lhs = e[j];
                best.bound = bound;
            }
        }
    }
    if (t.size() < 2) best.slack = commutator_budget;
    best.pass = best.slack >= -certify_tolerance;
    return best;
}

std::string to_string(CertificatePath p) { return p == CertificatePath::trilinear ? "trilinear" : "commutator"; }

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::certificate_failure: return "certificate_failure";
        case Verdict::hypothesis_not_met: return "hypothesis_not_met";
    }
    return "unknown";
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::pass: return 0;
        case Verdict::certificate_failure: return 2;
        case Verdict::hypothesis_not_met: return 3;
    }
    return 1;
}

std::vector<double> default_epsilons(const PeriodicGrid& g) {
    std::vector<double> out;
    for (int m : {32, 16, 8, 4}) {
        const double e = m * g.spacing();
        if (e <= MollifierKernel::kMaxEpsilon) out.push_back(e);
    }
    return out;
}

VelocityField initial_on_grid(const VelocityField& u0, int n) {
    const PeriodicGrid g = make_grid(u0.dims(), n);
    VelocityField u = resample(u0, g);
    u.set_divergence_free(divergence_ratio(u) <= 1e-10);
    return u;
}

UniquenessReport certify_trajectories(const Trajectory& ta, const Trajectory& tb, const UniquenessOptions& options) {
    if (ta.states.empty() || tb.states.empty()) throw ConfigError("uniqueness: empty trajectory");
    require_same_times(ta.times(), tb.times(), "uniqueness");
    const double p = options.p_int;
    if (!(p >= 1.0)) throw ConfigError("uniqueness: p_int must be >= 1");

    const PeriodicGrid& ga = ta.states.front().velocity.grid();
    const PeriodicGrid& gb = tb.states.front().velocity.grid();
    const bool b_finer = gb.n_per_axis() >= ga.n_per_axis();
    const Trajectory& tu = b_finer ? ta : tb;  // coarser run
    const Trajectory& tv = b_finer ? tb : ta;  // higher-resolution run
    const PeriodicGrid gc = b_finer ? ga : gb;

    UniquenessReport r{};
    r.path = options.path;
    r.comparison_n = gc.n_per_axis();
    r.working_epsilon = options.working_epsilon.value_or(MollifierKernel::min_epsilon(gc));
    make_kernel(gc, r.working_epsilon);
    r.budget_epsilons = options.epsilons.empty() ? default_epsilons(gc) : options.epsilons;
    for (double e : r.budget_epsilons) make_kernel(gc, e);
    r.energy_drift_a = ta.max_energy_drift;
    r.energy_drift_b = tb.max_energy_drift;
    r.certify_tolerance =
        options.certify_tolerance.value_or(std::max(10.0 * std::max(r.energy_drift_a, r.energy_drift_b), 1e-12));

    const std::size_t n = tu.states.size();
    const std::vector<double> times = tu.times();
    std::vector<VelocityField> us, vs;
    for (std::size_t s = 0; s < n; ++s) {
        us.push_back(resample(tu.states[s].velocity, gc));
        vs.push_back(resample(tv.states[s].velocity, gc));
    }

    // Relative energy, Lipschitz constant and regularity per slice.
    r.energy = {times, std::vector<double>(n), "A:" + std::to_string(ga.n_per_axis()) + "/B:" + std::to_string(gb.n_per_axis())};
    r.lipschitz = {times, std::vector<double>(n), r.working_epsilon};
    r.slice_alpha.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> alpha_u(n, std::numeric_limits<double>::quiet_NaN());
    parallel_for(n, [&](std::size_t s) {
        r.energy.values[s] = relative_energy(us[s], vs[s]);
        r.lipschitz.c_values[s] = one_sided_lipschitz(vs[s], r.working_epsilon);
        if (auto fa = besov_seminorm(tv.states[s].velocity, 0.5, p).fitted_alpha) r.slice_alpha[s] = *fa;
        if (options.path == CertificatePath::trilinear) {
            if (auto fa = besov_seminorm(tu.states[s].velocity, 0.5, p).fitted_alpha) alpha_u[s] = *fa;
        }
    });

    std::optional<double> min_alpha;
    for (std::size_t s = 0; s < n; ++s) {
        for (double a : {r.slice_alpha[s], alpha_u[s]}) {
            if (!std::isnan(a)) min_alpha = min_alpha ? std::min(*min_alpha, a) : a;
        }
    }
    r.hypothesis.required_alpha = options.path == CertificatePath::commutator ? 0.5 : 1.0 / 3.0;
    r.hypothesis.fitted_alpha = min_alpha;
    r.hypothesis.met = !min_alpha || *min_alpha > r.hypothesis.required_alpha;

    r.alpha_used = std::clamp(options.alpha.value_or(min_alpha.value_or(1.0)), 0.01, 0.99);
    const double alpha = r.alpha_used;

    // Budget: C_fit from the worst ratio of the measured commutator to its epsilon rate.
    std::vector<double> eps_all = r.budget_epsilons;
    eps_all.push_back(r.working_epsilon);
    std::vector<double> semi_u(n), semi_v(n);
    parallel_for(n, [&](std::size_t s) {
        semi_v[s] = besov_seminorm(vs[s], alpha, p).seminorm;
        semi_u[s] = besov_seminorm(us[s], alpha, p).seminorm;
    });
    const bool thm2 = options.path == CertificatePath::commutator;
    const std::size_t m = eps_all.size();
    std::vector<double> ratio(m * n, 0.0), weight(m * n, 0.0);
    parallel_for(m * n, [&](std::size_t idx) {
        const std::size_t e = idx / n, s = idx % n;
        const MollifierKernel k = make_kernel(gc, eps_all[e]);
        if (thm2) {
            const double rate = std::pow(eps_all[e], 2.0 * alpha - 1.0) * semi_v[s] * semi_v[s];
            if (rate <= 0.0) return;
            const double q = lp_norm(convective_commutator(vs[s], k), std::max(1.0, p / 2.0));
            const VelocityField diff = mollify(vs[s], k) - us[s];
            const double dn = p > 2.0 ? lp_norm(diff, p / (p - 2.0)) : max_norm(diff);
            ratio[idx] = q / rate;
            weight[idx] = rate * dn;
        } else {
            const double rate = std::pow(eps_all[e], 3.0 * alpha - 1.0) * semi_u[s] * semi_u[s] * (semi_u[s] + semi_v[s]);
            if (rate <= 0.0) return;
            ratio[idx] = std::abs(cet_trilinear(us[s], vs[s], k)) / rate;
            weight[idx] = rate;
        }
    });
    r.c_fit = *std::max_element(ratio.begin(), ratio.end());
    std::vector<double> budget(m);
    for (std::size_t e = 0; e < m; ++e) {
        std::vector<double> w(weight.begin() + static_cast<long>(e * n), weight.begin() + static_cast<long>((e + 1) * n));
        budget[e] = r.c_fit * trapezoid(times, w);
    }
    r.working_budget = budget.back();
    r.budget_values.assign(budget.begin(), budget.end() - 1);

    r.certificate = gronwall_certify(r.energy, r.lipschitz, r.working_budget, r.certify_tolerance);
    if (!r.hypothesis.met) {
        r.verdict = Verdict::hypothesis_not_met;
    } else if (!r.certificate.pass) {
        r.verdict = Verdict::certificate_failure;
    } else {
        r.verdict = Verdict::pass;
    }
    return r;
}

UniquenessReport uniqueness_experiment(const VelocityField& u0, const RunSpec& a, const RunSpec& b,
                                       const UniquenessOptions& options) {
    const RunSpec* specs[2] = {&a, &b};
    std::vector<std::optional<Trajectory>> runs(2);
    parallel_for(2, [&](std::size_t i) {
        const VelocityField init = initial_on_grid(u0, specs[i]->grid_n);
        runs[i] = solve(init, specs[i]->solver);
    });
    return certify_trajectories(*runs[0], *runs[1], options);
}

}  // namespace eulerlab
