#include "eulerlab/calculus.hpp"

#include "eulerlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace eulerlab {
namespace {

// Per-axis derivative wavenumbers of every stored mode, cached per grid call site.
std::vector<double> derivative_table(const PeriodicGrid& g, int axis) {
    std::vector<double> k(g.spectral_size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        const ModeIndex m = g.mode(i);
        k[i] = g.is_nyquist(m[axis]) ? 0.0 : kPi * m[axis];
    }
    return k;
}

Spectrum derivative_spectrum(const Spectrum& s, int axis) {
    Spectrum out(s.grid);
    const std::vector<double> k = derivative_table(s.grid, axis);
    for (std::size_t i = 0; i < k.size(); ++i) out.coeffs[i] = Complex(0.0, k[i]) * s.coeffs[i];
    return out;
}

}  // namespace

ScalarField partial(const ScalarField& f, int axis) {
    if (axis < 0 || axis >= f.grid().dims()) throw ConfigError("partial: axis out of range");
    return ScalarField::from_spectrum(derivative_spectrum(f.spectrum(), axis));
}

VelocityField gradient(const ScalarField& f) {
    std::vector<ScalarField> comps;
    for (int a = 0; a < f.grid().dims(); ++a) comps.push_back(partial(f, a));
    return VelocityField(std::move(comps));
}

ScalarField divergence(const VelocityField& u) {
    const PeriodicGrid& g = u.grid();
    Spectrum acc(g);
    for (int a = 0; a < g.dims(); ++a) {
        const std::vector<double> k = derivative_table(g, a);
        const Spectrum& s = u[a].spectrum();
        for (std::size_t i = 0; i < k.size(); ++i) acc.coeffs[i] += Complex(0.0, k[i]) * s.coeffs[i];
    }
    return ScalarField::from_spectrum(acc);
}

ScalarField curl2d(const VelocityField& u) {
    if (u.dims() != 2) throw ConfigError("curl2d: requires dims == 2");
    const PeriodicGrid& g = u.grid();
    const std::vector<double> k0 = derivative_table(g, 0);
    const std::vector<double> k1 = derivative_table(g, 1);
    const Spectrum& s0 = u[0].spectrum();
    const Spectrum& s1 = u[1].spectrum();
    Spectrum out(g);
    for (std::size_t i = 0; i < k0.size(); ++i) {
        out.coeffs[i] = Complex(0.0, k0[i]) * s1.coeffs[i] - Complex(0.0, k1[i]) * s0.coeffs[i];
    }
    return ScalarField::from_spectrum(out);
}

VelocityField leray_project(const VelocityField& u) {
    const PeriodicGrid& g = u.grid();
    const int d = g.dims();
    std::vector<Spectrum> s;
    for (int a = 0; a < d; ++a) s.push_back(u[a].spectrum());
    std::vector<std::vector<double>> k;
    for (int a = 0; a < d; ++a) k.push_back(derivative_table(g, a));
    for (std::size_t i = 0; i < g.spectral_size(); ++i) {
        double k2 = 0.0;
        Complex kdotu(0.0, 0.0);
        for (int a = 0; a < d; ++a) {
            k2 += k[a][i] * k[a][i];
            kdotu += k[a][i] * s[a].coeffs[i];
        }
        if (k2 == 0.0) continue;
        for (int a = 0; a < d; ++a) s[a].coeffs[i] -= k[a][i] * kdotu / k2;
    }
    std::vector<ScalarField> comps;
    for (int a = 0; a < d; ++a) comps.push_back(ScalarField::from_spectrum(s[a]));
    return VelocityField(std::move(comps), true);
}

double lp_norm(const ScalarField& f, double p) {
    if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1");
    double sum = 0.0;
    for (double v : f.values()) sum += std::pow(std::abs(v), p);
    return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

double lp_norm(const VelocityField& u, double p) {
    if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1");
    const std::size_t n = u.grid().size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double m2 = 0.0;
        for (int a = 0; a < u.dims(); ++a) m2 += u[a][i] * u[a][i];
        sum += p == 2.0 ? m2 : std::pow(m2, 0.5 * p);
    }
    return std::pow(sum * u.grid().cell_volume(), 1.0 / p);
}

double max_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double max_norm(const VelocityField& u) {
    double m2 = 0.0;
    for (std::size_t i = 0; i < u.grid().size(); ++i) {
        double s = 0.0;
        for (int a = 0; a < u.dims(); ++a) s += u[a][i] * u[a][i];
        m2 = std::max(m2, s);
    }
    return std::sqrt(m2);
}

double integral(const ScalarField& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return sum * f.grid().cell_volume();
}

double mean(const ScalarField& f) { return integral(f) / f.grid().domain_volume(); }

double inner(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid(), "inner");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
    return sum * f.grid().cell_volume();
}

double inner(const VelocityField& u, const VelocityField& v) {
    require_same_grid(u.grid(), v.grid(), "inner");
    double sum = 0.0;
    for (int a = 0; a < u.dims(); ++a) sum += inner(u[a], v[a]);
    return sum;
}

double divergence_ratio(const VelocityField& u) {
    const double m = max_norm(u);
    return m == 0.0 ? 0.0 : max_norm(divergence(u)) / m;
}

bool within_dealias_band(const PeriodicGrid& g, const ModeIndex& k) {
    const int cutoff = g.dealias_cutoff();
    for (int a = 0; a < g.dims(); ++a) {
        if (std::abs(k[a]) > cutoff) return false;
    }
    return true;
}

void dealias(Spectrum& s) {
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        if (!within_dealias_band(s.grid, s.grid.mode(i))) s.coeffs[i] = Complex(0.0, 0.0);
    }
}

ScalarField resample(const ScalarField& f, const PeriodicGrid& target) {
    const PeriodicGrid& src = f.grid();
    if (src.dims() != target.dims()) throw GridMismatchError("resample: dimension mismatch");
    if (src == target) return f;
    const Spectrum& in = f.spectrum();
    const int limit = std::min(src.n_per_axis(), target.n_per_axis()) / 2;
    Spectrum out(target);
    for (std::size_t i = 0; i < target.spectral_size(); ++i) {
        ModeIndex k = target.mode(i);
        bool keep = true;
        for (int a = 0; a < target.dims(); ++a) keep = keep && std::abs(k[a]) < limit;
        if (!keep) continue;
        // Locate the same integer mode in the source half-spectrum.
        std::size_t flat = 0;
        for (int a = 0; a < src.dims(); ++a) {
            const int n = src.n_per_axis();
            const int idx = a + 1 == src.dims() ? k[a] : (k[a] + n) % n;
            const std::size_t extent = a + 1 == src.dims() ? static_cast<std::size_t>(src.half_length())
                                                           : static_cast<std::size_t>(n);
            flat = flat * extent + static_cast<std::size_t>(idx);
        }
        out.coeffs[i] = in.coeffs[flat];
    }
    return ScalarField::from_spectrum(out);
}

VelocityField resample(const VelocityField& u, const PeriodicGrid& target) {
    std::vector<ScalarField> comps;
    for (int a = 0; a < u.dims(); ++a) comps.push_back(resample(u[a], target));
    return VelocityField(std::move(comps), u.divergence_free());
}

ScalarField shift(const ScalarField& f, const ModeIndex& steps) {
    const PeriodicGrid& g = f.grid();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        ModeIndex idx = g.sample_index(i);
        for (int a = 0; a < g.dims(); ++a) idx[a] += steps[a];
        out[i] = f[g.flat_index(idx)];
    }
    return ScalarField(g, std::move(out));
}

}  // namespace eulerlab
