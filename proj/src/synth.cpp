#include "eulerlab/synth.hpp"

#include "eulerlab/calculus.hpp"
#include "eulerlab/error.hpp"
#include "eulerlab/rng.hpp"

#include <cmath>
#include <set>
#include <utility>

namespace eulerlab {
namespace {

void require_2d(const PeriodicGrid& g, const char* what) {
    if (g.dims() != 2) throw ConfigError(std::string(what) + ": requires dims == 2");
}

using Wave = std::pair<int, int>;

Wave canonical(int k0, int k1) {
    if (k0 < 0 || (k0 == 0 && k1 < 0)) return {-k0, -k1};
    return {k0, k1};
}

Wave rounded_wave(int j, double theta) {
    const double r = std::ldexp(1.0, j);
    return canonical(static_cast<int>(std::lround(r * std::cos(theta))),
                     static_cast<int>(std::lround(r * std::sin(theta))));
}

// Every canonical wave vector the octave could produce, for the collision fallback.
std::vector<Wave> octave_candidates(int j) {
    std::vector<Wave> out;
    const int steps = 64 << j;
    for (int s = 0; s < steps; ++s) {
        const Wave k = rounded_wave(j, kPi * s / steps);
        if (out.empty() || out.back() != k) out.push_back(k);
    }
    return out;
}

}  // namespace

std::string to_string(SynthKind kind) {
    switch (kind) {
        case SynthKind::lacunary: return "lacunary";
        case SynthKind::taylor_green: return "taylor_green";
        case SynthKind::shear: return "shear";
        case SynthKind::random_divfree: return "random_divfree";
        case SynthKind::constant: return "constant";
    }
    return "unknown";
}

SynthKind synth_kind_from_string(const std::string& name) {
    for (SynthKind k : {SynthKind::lacunary, SynthKind::taylor_green, SynthKind::shear, SynthKind::random_divfree,
                        SynthKind::constant}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("synth: unknown kind '" + name +
                      "' (expected lacunary, taylor_green, shear, random_divfree or constant)");
}

int max_lacunary_octave(const PeriodicGrid& grid) {
    int j = 0;
    while ((1 << (j + 1)) <= grid.dealias_cutoff()) ++j;
    return j;
}

VelocityField lacunary_field(const SynthSpec& spec, const PeriodicGrid& grid) {
    require_2d(grid, "lacunary_field");
    if (!spec.alpha || !(*spec.alpha > 0.0 && *spec.alpha < 1.0)) {
        throw ConfigError("lacunary_field: alpha must lie in (0,1)");
    }
    if (!spec.j_max || *spec.j_max < 0) throw ConfigError("lacunary_field: j_max must be >= 0");
    const double alpha = *spec.alpha;
    const int j_max = *spec.j_max;
    if (j_max > max_lacunary_octave(grid)) {
        throw ConfigError("lacunary_field: j_max " + std::to_string(j_max) + " exceeds the dealiased band of a " +
                          std::to_string(grid.n_per_axis()) + "-per-axis grid (max " +
                          std::to_string(max_lacunary_octave(grid)) + ")");
    }

    struct Mode {
        Wave k;
        double amp;
        double phase;
        double e0, e1;
    };
    std::vector<Mode> modes;
    std::set<Wave> used;
    constexpr int kDirections = 4;
    for (int j = 0; j <= j_max; ++j) {
        CounterRng rng(spec.seed, static_cast<std::uint64_t>(j));
        double w2 = 1.0;
        if (j == 0) w2 /= 1.0 - std::pow(2.0, -2.0 * (1.0 - alpha));
        if (j == j_max) w2 /= 1.0 - std::pow(2.0, -2.0 * alpha);
        const double theta0 = rng.uniform(0.0, kPi);
        for (int m = 0; m < kDirections; ++m) {
            double theta = theta0 + m * kPi / kDirections;
            Wave k = rounded_wave(j, theta);
            for (int attempt = 0; attempt < 64 && (k == Wave{0, 0} || used.count(k)); ++attempt) {
                theta = rng.uniform(0.0, kPi);
                k = rounded_wave(j, theta);
            }
            if (k == Wave{0, 0} || used.count(k)) {
                bool found = false;
                for (const Wave& c : octave_candidates(j)) {
                    if (c != Wave{0, 0} && !used.count(c)) {
                        k = c;
                        found = true;
                        break;
                    }
                }
                if (!found) throw ConfigError("lacunary_field: octave " + std::to_string(j) + " has no free wave vector");
            }
            used.insert(k);
            const double phase = rng.uniform(0.0, 2.0 * kPi);
            // Random unit vector projected onto the plane orthogonal to K.
            const double kn = std::hypot(k.first, k.second);
            double g0 = rng.normal();
            double g1 = rng.normal();
            const double dot = (g0 * k.first + g1 * k.second) / (kn * kn);
            g0 -= dot * k.first;
            g1 -= dot * k.second;
            const double gn = std::hypot(g0, g1);
            if (gn > 0.0) {
                g0 /= gn;
                g1 /= gn;
            } else {
                g0 = -k.second / kn;
                g1 = k.first / kn;
            }
            modes.push_back({k, std::pow(kn, -alpha) * std::sqrt(w2), phase, g0, g1});
        }
    }

    std::vector<double> u0(grid.size(), 0.0), u1(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.point(i);
        for (const Mode& md : modes) {
            const double c = md.amp * std::cos(kPi * (md.k.first * x[0] + md.k.second * x[1]) + md.phase);
            u0[i] += c * md.e0;
            u1[i] += c * md.e1;
        }
    }
    VelocityField raw({ScalarField(grid, std::move(u0)), ScalarField(grid, std::move(u1))});
    VelocityField out = leray_project(raw);
    out *= spec.amplitude;
    out.set_divergence_free(true);
    return out;
}

VelocityField taylor_green(const PeriodicGrid& grid, double amplitude) {
    require_2d(grid, "taylor_green");
    VelocityField u = VelocityField::sample(grid, [amplitude](const Point& x) {
        return Point{amplitude * std::sin(kPi * x[0]) * std::cos(kPi * x[1]),
                     -amplitude * std::cos(kPi * x[0]) * std::sin(kPi * x[1]), 0.0};
    });
    u.set_divergence_free(true);
    return u;
}

ScalarField taylor_green_pressure(const PeriodicGrid& grid, double amplitude) {
    require_2d(grid, "taylor_green_pressure");
    const double c = 0.25 * amplitude * amplitude;
    return ScalarField::sample(grid, [c](const Point& x) {
        return c * (std::cos(2.0 * kPi * x[0]) + std::cos(2.0 * kPi * x[1]));
    });
}

VelocityField shear_flow(const PeriodicGrid& grid, const ScalarField& profile) {
    require_2d(grid, "shear_flow");
    require_same_grid(grid, profile.grid(), "shear_flow");
    const int n = grid.n_per_axis();
    for (int i0 = 1; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
            if (profile[static_cast<std::size_t>(i0) * n + i1] != profile[static_cast<std::size_t>(i1)]) {
                throw ConfigError("shear_flow: profile must depend on x2 only");
            }
        }
    }
    VelocityField u({profile, ScalarField(grid)});
    u.set_divergence_free(true);
    return u;
}

VelocityField random_divfree(const PeriodicGrid& grid, double slope, std::uint64_t seed, double amplitude) {
    const int d = grid.dims();
    const int last = d - 1;
    std::vector<ScalarField> comps;
    for (int a = 0; a < d; ++a) {
        CounterRng rng(seed, static_cast<std::uint64_t>(a));
        Spectrum s(grid);
        for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
            const ModeIndex k = grid.mode(i);
            // Draw for every stored mode so the stream layout is independent of the band.
            const double re = rng.normal();
            const double im = rng.normal();
            if (!within_dealias_band(grid, k)) continue;
            double k2 = 0.0;
            bool nyquist = false;
            for (int b = 0; b < d; ++b) {
                k2 += static_cast<double>(k[b]) * k[b];
                nyquist = nyquist || grid.is_nyquist(k[b]);
            }
            if (k2 == 0.0 || nyquist) continue;
            s.coeffs[i] = Complex(re, im) * std::pow(k2, -0.5 * slope);
        }
        // Enforce Hermitian symmetry on the self-conjugate plane k_last = 0 by keeping the
        // lexicographically positive half and mirroring it.
        for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
            const ModeIndex k = grid.mode(i);
            if (k[last] != 0) continue;
            bool positive = false, decided = false;
            for (int b = 0; b < d && !decided; ++b) {
                if (k[b] != 0) {
                    positive = k[b] > 0;
                    decided = true;
                }
            }
            if (!decided || positive) continue;
            ModeIndex neg{0, 0, 0};
            for (int b = 0; b < d; ++b) neg[b] = -k[b];
            std::size_t flat = 0;
            for (int b = 0; b < d; ++b) {
                const int n = grid.n_per_axis();
                const std::size_t extent = b == last ? static_cast<std::size_t>(grid.half_length())
                                                     : static_cast<std::size_t>(n);
                const int idx = b == last ? neg[b] : (neg[b] + n) % n;
                flat = flat * extent + static_cast<std::size_t>(idx);
            }
            s.coeffs[i] = std::conj(s.coeffs[flat]);
        }
        comps.push_back(ScalarField::from_spectrum(s));
    }
    VelocityField u = leray_project(VelocityField(std::move(comps)));
    const double energy = 0.5 * inner(u, u);
    if (energy > 0.0) u *= amplitude / std::sqrt(energy);
    u.set_divergence_free(true);
    return u;
}

VelocityField synthesize(const SynthSpec& spec, const PeriodicGrid& grid) {
    switch (spec.kind) {
        case SynthKind::lacunary: return lacunary_field(spec, grid);
        case SynthKind::taylor_green: return taylor_green(grid, spec.amplitude);
        case SynthKind::shear: {
            const double a = spec.amplitude;
            return shear_flow(grid, ScalarField::sample(grid, [a](const Point& x) { return a * std::sin(kPi * x[1]); }));
        }
        case SynthKind::random_divfree:
            if (!spec.slope) throw ConfigError("random_divfree: slope is required");
            return random_divfree(grid, *spec.slope, spec.seed, spec.amplitude);
        case SynthKind::constant: {
            Point c{0.0, 0.0, 0.0};
            c[0] = spec.amplitude;
            return VelocityField::constant(grid, c);
        }
    }
    throw ConfigError("synth: unhandled kind");
}

}  // namespace eulerlab
