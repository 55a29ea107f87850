#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nhnse/errors.hpp"

namespace nhnse {

using cplx = std::complex<double>;
using CField = std::vector<cplx>;

inline constexpr cplx I{0.0, 1.0};

/// Uniform periodic grid x_j = origin + j * length / n, j = 0..n-1.
/// `origin` defaults to -length/2, i.e. the symmetric window [-L/2, L/2).
struct Grid {
    std::size_t n = 0;
    double length = 0.0;
    double origin = 0.0;

    Grid() = default;
    Grid(std::size_t n_, double length_) : Grid(n_, length_, -0.5 * length_) {}
    Grid(std::size_t n_, double length_, double origin_) : n(n_), length(length_), origin(origin_) {
        if (n < 8 || (n & (n - 1)) != 0)
            throw InputError("grid size must be a power of two >= 8, got " + std::to_string(n));
        if (!(length > 0.0) || !std::isfinite(length))
            throw InputError("grid length must be positive and finite");
        if (!std::isfinite(origin)) throw InputError("grid origin must be finite");
    }

    double spacing() const { return length / static_cast<double>(n); }
    double x(std::size_t j) const { return origin + static_cast<double>(j) * spacing(); }

    std::vector<double> coordinates() const {
        std::vector<double> xs(n);
        for (std::size_t j = 0; j < n; ++j) xs[j] = x(j);
        return xs;
    }

    /// Angular wavenumber of FFT bin j in standard FFT ordering.
    double wavenumber(std::size_t j) const {
        const auto nn = static_cast<std::ptrdiff_t>(n);
        auto jj = static_cast<std::ptrdiff_t>(j);
        if (jj >= nn / 2) jj -= nn;
        return 2.0 * std::numbers::pi * static_cast<double>(jj) / length;
    }

    std::vector<double> wavenumbers() const {
        std::vector<double> ks(n);
        for (std::size_t j = 0; j < n; ++j) ks[j] = wavenumber(j);
        return ks;
    }

    double max_wavenumber() const { return std::numbers::pi / spacing(); }

    bool same_as(const Grid& o) const {
        return n == o.n && std::abs(length - o.length) <= 1e-12 * length &&
               std::abs(origin - o.origin) <= 1e-12 * std::max(1.0, std::abs(origin));
    }
};

}  // namespace nhnse
