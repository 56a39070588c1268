#include "eulerlab/detail/vorticity.hpp"

#include "eulerlab/calculus.hpp"
#include "eulerlab/error.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace eulerlab::detail {

SpectralOps::SpectralOps(const PeriodicGrid& g) : grid(g) {
    if (g.dims() != 2) throw ConfigError("solver: only dims == 2 is supported");
    const std::size_t m = g.spectral_size();
    k0.resize(m);
    k1.resize(m);
    inv_k2.resize(m);
    keep.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const ModeIndex k = g.mode(i);
        k0[i] = g.is_nyquist(k[0]) ? 0.0 : kPi * k[0];
        k1[i] = g.is_nyquist(k[1]) ? 0.0 : kPi * k[1];
        const double k2 = k0[i] * k0[i] + k1[i] * k1[i];
        inv_k2[i] = k2 > 0.0 ? 1.0 / k2 : 0.0;
        keep[i] = within_dealias_band(g, k) ? 1 : 0;
    }
}

const SpectralOps& spectral_ops(const PeriodicGrid& g) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<SpectralOps>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[g.n_per_axis()];
    if (!slot) slot = std::make_unique<SpectralOps>(g);
    return *slot;
}

VelocityField velocity_from_vorticity(const Spectrum& omega, const std::array<double, 2>& mean) {
    const SpectralOps& ops = spectral_ops(omega.grid);
    Spectrum u0(omega.grid), u1(omega.grid);
    for (std::size_t i = 0; i < omega.coeffs.size(); ++i) {
        const Complex psi = omega.coeffs[i] * ops.inv_k2[i];
        u0.coeffs[i] = Complex(0.0, ops.k1[i]) * psi;
        u1.coeffs[i] = -Complex(0.0, ops.k0[i]) * psi;
    }
    u0.coeffs[0] = mean[0];
    u1.coeffs[0] = mean[1];
    return VelocityField({ScalarField::from_spectrum(u0), ScalarField::from_spectrum(u1)}, true);
}

Spectrum advection_rhs(const Spectrum& omega, const VelocityField& u) {
    const SpectralOps& ops = spectral_ops(omega.grid);
    Spectrum d0(omega.grid), d1(omega.grid);
    for (std::size_t i = 0; i < omega.coeffs.size(); ++i) {
        d0.coeffs[i] = Complex(0.0, ops.k0[i]) * omega.coeffs[i];
        d1.coeffs[i] = Complex(0.0, ops.k1[i]) * omega.coeffs[i];
    }
    const std::vector<double> w0 = inverse_transform(d0);
    const std::vector<double> w1 = inverse_transform(d1);
    std::vector<double> prod(w0.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = u[0][i] * w0[i] + u[1][i] * w1[i];
    Spectrum out = forward_transform(omega.grid, prod);
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = ops.keep[i] ? -out.coeffs[i] : Complex(0.0);
    out.coeffs[0] = 0.0;
    return out;
}

Spectrum transport_rhs(const ScalarField& theta, const VelocityField& u) {
    const SpectralOps& ops = spectral_ops(theta.grid());
    std::vector<double> f0(theta.size()), f1(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        f0[i] = theta[i] * u[0][i];
        f1[i] = theta[i] * u[1][i];
    }
    const Spectrum s0 = forward_transform(theta.grid(), f0);
    const Spectrum s1 = forward_transform(theta.grid(), f1);
    Spectrum out(theta.grid());
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
        if (!ops.keep[i]) continue;
        out.coeffs[i] = -(Complex(0.0, ops.k0[i]) * s0.coeffs[i] + Complex(0.0, ops.k1[i]) * s1.coeffs[i]);
    }
    out.coeffs[0] = 0.0;
    return out;
}

Spectrum axpy(const Spectrum& a, double s, const Spectrum& b) {
    Spectrum out(a.grid);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) out.coeffs[i] = a.coeffs[i] + s * b.coeffs[i];
    return out;
}

Spectrum rk4_combine(const Spectrum& a, double dt, const Spectrum& k1, const Spectrum& k2, const Spectrum& k3,
                     const Spectrum& k4) {
    Spectrum out(a.grid);
    const double c = dt / 6.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        out.coeffs[i] = a.coeffs[i] + c * (k1.coeffs[i] + 2.0 * k2.coeffs[i] + 2.0 * k3.coeffs[i] + k4.coeffs[i]);
    }
    return out;
}

bool all_finite(const Spectrum& s) {
    for (const Complex& c : s.coeffs) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

void check_cfl(const VelocityField& u, double dt, double cfl) {
    if (!(dt > 0.0)) throw ConfigError("solver: dt must be positive");
    const double umax = max_norm(u);
    if (umax == 0.0) return;
    const double bound = cfl * u.grid().spacing() / umax;
    if (dt > bound) {
        std::ostringstream msg;
        msg << "solver: dt " << dt << " violates the CFL bound; admissible dt <= " << bound;
        throw StepSizeError(msg.str(), bound);
    }
}

}  // namespace eulerlab::detail
