#include "eulerlab/fft.hpp"

#include "eulerlab/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace eulerlab {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new arrays is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(const PeriodicGrid& g, bool forward) {
        const auto key = std::make_tuple(g.dims(), g.n_per_axis(), forward);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        int shape[kMaxDims];
        for (int a = 0; a < g.dims(); ++a) shape[a] = g.n_per_axis();
        auto* real = static_cast<double*>(fftw_malloc(sizeof(double) * g.size()));
        auto* cplx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * g.spectral_size()));
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = forward ? fftw_plan_dft_r2c(g.dims(), shape, real, cplx, flags)
                                 : fftw_plan_dft_c2r(g.dims(), shape, cplx, real, flags);
        fftw_free(real);
        fftw_free(cplx);
        if (plan == nullptr) throw Error("fft: FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

}  // namespace

Spectrum forward_transform(const PeriodicGrid& grid, std::span<const double> values) {
    if (values.size() != grid.size()) throw GridMismatchError("fft: value count does not match grid");
    fftw_plan plan = PlanCache::instance().get(grid, true);
    Spectrum out(grid);
    // r2c does not modify its input, but the FFTW signature is non-const.
    fftw_execute_dft_r2c(plan, const_cast<double*>(values.data()),
                         reinterpret_cast<fftw_complex*>(out.coeffs.data()));
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (auto& c : out.coeffs) c *= scale;
    return out;
}

std::vector<double> inverse_transform(const Spectrum& spectrum) {
    const PeriodicGrid& grid = spectrum.grid;
    if (spectrum.coeffs.size() != grid.spectral_size()) {
        throw GridMismatchError("fft: coefficient count does not match grid");
    }
    fftw_plan plan = PlanCache::instance().get(grid, false);
    std::vector<Complex> scratch = spectrum.coeffs;  // c2r destroys its input
    std::vector<double> out(grid.size());
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    return out;
}

}  // namespace eulerlab
