#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "nhnse/errors.hpp"
#include "nhnse/grid.hpp"

namespace nhnse {

namespace detail {
// Lanczos approximation, g = 607/128, 15 terms (Godfrey).
inline constexpr double lanczos_g = 607.0 / 128.0;
inline constexpr std::array<double, 15> lanczos_c{
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

// log Gamma(w) for Re w >= 1/2 (principal-ish branch, continuous in w).
inline cplx log_gamma_right(cplx w) {
    const cplx z = w - 1.0;
    cplx acc = lanczos_c[0];
    for (std::size_t i = 1; i < lanczos_c.size(); ++i) acc += lanczos_c[i] / (z + static_cast<double>(i));
    const cplx t = z + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(acc);
}
}  // namespace detail

/// Complex Gamma function. Throws InputError at the poles w = 0, -1, -2, ...
inline cplx complex_gamma(cplx w) {
    if (w.imag() == 0.0 && w.real() <= 0.0 && w.real() == std::floor(w.real()))
        throw InputError("complex_gamma: pole at nonpositive integer");
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) throw InputError("complex_gamma: non-finite argument");
    if (w.real() < 0.5) {
        // Reflection: Gamma(w) Gamma(1-w) = pi / sin(pi w)
        const cplx s = std::sin(std::numbers::pi * w);
        return std::numbers::pi / (s * std::exp(detail::log_gamma_right(1.0 - w)));
    }
    return std::exp(detail::log_gamma_right(w));
}

}  // namespace nhnse
