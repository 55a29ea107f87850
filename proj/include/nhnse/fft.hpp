#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "nhnse/grid.hpp"

namespace nhnse {

namespace detail {
// The FFTW planner is not re-entrant; plan execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Owns a forward/backward pair of complex FFTW plans of size n. Plans are
/// built with FFTW_ESTIMATE so the selected algorithm (and therefore every
/// rounding) is identical from run to run.
class FFT {
public:
    explicit FFT(std::size_t n) : n_(n) {
        in_ = fftw_alloc_complex(n_);
        out_ = fftw_alloc_complex(n_);
        std::lock_guard lock(detail::fftw_planner_mutex());
        fwd_ = fftw_plan_dft_1d(static_cast<int>(n_), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(static_cast<int>(n_), in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    FFT(const FFT&) = delete;
    FFT& operator=(const FFT&) = delete;
    ~FFT() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(in_);
        fftw_free(out_);
    }

    std::size_t size() const { return n_; }

    /// out[k] = sum_j in[j] exp(-2 pi i jk/n)
    void forward(std::span<const cplx> in, std::span<cplx> out) { run(fwd_, in, out, 1.0); }
    /// Normalized inverse: out[j] = (1/n) sum_k in[k] exp(+2 pi i jk/n)
    void inverse(std::span<const cplx> in, std::span<cplx> out) {
        run(bwd_, in, out, 1.0 / static_cast<double>(n_));
    }

    CField forward(std::span<const cplx> in) {
        CField out(n_);
        forward(in, out);
        return out;
    }
    CField inverse(std::span<const cplx> in) {
        CField out(n_);
        inverse(in, out);
        return out;
    }

private:
    void run(fftw_plan p, std::span<const cplx> in, std::span<cplx> out, double scale) {
        if (in.size() != n_ || out.size() != n_) throw InputError("FFT size mismatch");
        std::memcpy(in_, in.data(), n_ * sizeof(fftw_complex));
        fftw_execute(p);
        const auto* src = reinterpret_cast<const cplx*>(out_);
        if (scale == 1.0)
            std::copy(src, src + n_, out.begin());
        else
            std::transform(src, src + n_, out.begin(), [scale](cplx v) { return v * scale; });
    }

    std::size_t n_;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

/// Pseudo-spectral derivatives on a periodic grid.
class SpectralDiff {
public:
    explicit SpectralDiff(const Grid& g) : grid_(g), fft_(g.n), k_(g.wavenumbers()) {}

    const Grid& grid() const { return grid_; }

    /// d^order/dx^order of f. The Nyquist mode is zeroed for odd orders.
    CField derivative(std::span<const cplx> f, int order) {
        auto fh = fft_.forward(f);
        apply(fh, order);
        return fft_.inverse(fh);
    }

    /// Returns {f_x, f_xx, f_xxx} from a single forward transform.
    std::array<CField, 3> derivatives3(std::span<const cplx> f) {
        const auto fh = fft_.forward(f);
        std::array<CField, 3> out;
        for (int order = 1; order <= 3; ++order) {
            CField g = fh;
            apply(g, order);
            out[static_cast<std::size_t>(order - 1)] = fft_.inverse(g);
        }
        return out;
    }

    /// Largest |f_hat| among the top `fraction` of resolved wavenumbers,
    /// relative to the spectral peak.
    double spectral_tail(std::span<const cplx> f, double fraction = 0.1) {
        const auto fh = fft_.forward(f);
        double peak = 0.0, tail = 0.0;
        const double kcut = (1.0 - fraction) * grid_.max_wavenumber();
        for (std::size_t j = 0; j < fh.size(); ++j) {
            const double a = std::abs(fh[j]);
            peak = std::max(peak, a);
            if (std::abs(k_[j]) >= kcut) tail = std::max(tail, a);
        }
        return peak > 0.0 ? tail / peak : 0.0;
    }

private:
    void apply(CField& fh, int order) const {
        const std::size_t nyq = grid_.n / 2;
        for (std::size_t j = 0; j < fh.size(); ++j) {
            if (order % 2 == 1 && j == nyq) {
                fh[j] = 0.0;
                continue;
            }
            const cplx ik = I * k_[j];
            cplx m = 1.0;
            for (int p = 0; p < order; ++p) m *= ik;
            fh[j] *= m;
        }
    }

    Grid grid_;
    FFT fft_;
    std::vector<double> k_;
};

}  // namespace nhnse
