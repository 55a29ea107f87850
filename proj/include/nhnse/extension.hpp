#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "nhnse/errors.hpp"
#include "nhnse/rh_delta.hpp"

namespace nhnse {

/// Real-axis boundary value -conj(r(s)) / (1 - |r(s)|^2) on (z1, inf).
inline cplx p11(double s, const NuProfile& p) {
    const cplx r = p.r(s);
    return -std::conj(r) / (1.0 - std::norm(r));
}

/// d/ds of p11 from the interpolant of r.
inline cplx p11_prime(double s, const NuProfile& p) {
    const cplx r = p.r(s), dr = p.r.derivative(s);
    const cplx a = std::conj(r), da = std::conj(dr);
    const double b = 1.0 - std::norm(r);
    const double db = -2.0 * (std::conj(r) * dr).real();
    return -(da * b - a * db) / (b * b);
}

/// Analytic continuation of the boundary data along the ray z1 + e^{i pi/4} R+:
/// p11(z1) e^{2i lambda_1(z1)} (z1 - z)^{-2i nu1} delta(z)^{-2}.
inline cplx f11(cplx z, const NuProfile& p, double lambda11) {
    const double z1 = p.ctx.z1;
    if (z == cplx(z1)) return p11(z1, p);
    const cplx d = delta(z, p, Side::plus).value;
    return p11(z1, p) * std::exp(2.0 * I * lambda11) * std::exp(-2.0 * I * p.nu1 * std::log(cplx(z1) - z)) / (d * d);
}

namespace detail {
inline void polar_about(cplx z, double z1, double& rho, double& phi) {
    rho = std::abs(z - z1);
    phi = rho == 0.0 ? 0.0 : std::arg(z - z1);
}
inline void require_sector(cplx z, double z1) {
    double rho, phi;
    polar_about(z, z1, rho, phi);
    if (rho > 0.0 && (phi < -1e-14 || phi > std::numbers::pi / 4.0 + 1e-14))
        throw InputError("extension_R11: z outside the sector 0 <= arg(z - z1) <= pi/4");
}
}  // namespace detail

/// R11(z) = cos(2 phi) p11(Re z) + (1 - cos(2 phi)) f11(z), z = z1 + rho e^{i phi}.
inline cplx extension_R11(cplx z, const NuProfile& p, double lambda11) {
    const double z1 = p.ctx.z1;
    detail::require_sector(z, z1);
    double rho, phi;
    detail::polar_about(z, z1, rho, phi);
    if (rho == 0.0) return p11(z1, p);
    const double c = std::cos(2.0 * phi);
    cplx out = c * p11(z.real(), p);
    if (c != 1.0) out += (1.0 - c) * f11(z, p, lambda11);
    return out;
}

inline cplx extension_R11(cplx z, const NuProfile& p) { return extension_R11(z, p, lambda_at_stationary(1, p)); }

/// Closed-form dbar R11 in polar coordinates:
/// -i (p11(Re z) - f11(z)) sin(2 phi) e^{i phi} / rho + cos(2 phi) p11'(Re z) / 2.
inline cplx dbar_R11(cplx z, const NuProfile& p, double lambda11) {
    const double z1 = p.ctx.z1;
    detail::require_sector(z, z1);
    double rho, phi;
    detail::polar_about(z, z1, rho, phi);
    if (rho == 0.0) throw InputError("dbar_R11: undefined at z1");
    const cplx jump = p11(z.real(), p) - f11(z, p, lambda11);
    return -I * jump * std::sin(2.0 * phi) * std::polar(1.0, phi) / rho +
           0.5 * std::cos(2.0 * phi) * p11_prime(z.real(), p);
}

/// dbar = (d/dx + i d/dy)/2 by centered differences.
template <typename F>
cplx dbar_fd(F&& f, cplx z, double h) {
    const cplx fx = (f(z + h) - f(z - h)) / (2.0 * h);
    const cplx fy = (f(z + I * h) - f(z - I * h)) / (2.0 * h);
    return 0.5 * (fx + I * fy);
}

struct DbarReport {
    std::size_t samples = 0;
    double max_dbar_ratio = 0.0;         // |dbar R11| / (|z-z1|^{-1/2} + |p11'(Re z)|)
    double max_scaled_dbar = 0.0;        // |dbar R11| |z - z1|^{1/2}
    double max_amplitude_ratio = 0.0;    // |R11| / (sin^2 arg + <Re z>^{-1})
    double max_formula_mismatch = 0.0;   // |dbar_fd - dbar_R11|
    double boundary_derivative_error = 0.0;  // tangential FD along the axis vs p11'
};

/// Samples the sector 0 < arg(z - z1) < pi/4, 0 < |z - z1| <= rho_max.
inline DbarReport dbar_bound_check(const NuProfile& p, std::size_t samples, std::uint64_t seed = 1,
                                   double rho_max = 2.0) {
    DbarReport rep;
    rep.samples = samples;
    if (p.is_zero()) return rep;
    const double z1 = p.ctx.z1;
    const double lam = lambda_at_stationary(1, p);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    constexpr double h = 1e-5;
    auto R = [&](cplx w) { return extension_R11(w, p, lam); };
    for (std::size_t i = 0; i < samples; ++i) {
        const double rho = rho_max * (0.02 + 0.98 * U(rng));
        // keep the finite-difference stencil inside the closed sector
        const double phi = (0.05 + 0.9 * U(rng)) * std::numbers::pi / 4.0;
        const cplx z = z1 + std::polar(rho, phi);
        const cplx d_fd = dbar_fd(R, z, h);
        const cplx d_an = dbar_R11(z, p, lam);
        const double mag = std::abs(d_fd);
        rep.max_dbar_ratio = std::max(rep.max_dbar_ratio, mag / (1.0 / std::sqrt(rho) + std::abs(p11_prime(z.real(), p))));
        rep.max_scaled_dbar = std::max(rep.max_scaled_dbar, mag * std::sqrt(rho));
        const double s2 = std::sin(phi) * std::sin(phi);
        const double bracket = 1.0 / std::sqrt(1.0 + z.real() * z.real());
        rep.max_amplitude_ratio = std::max(rep.max_amplitude_ratio, std::abs(R(z)) / (s2 + bracket));
        rep.max_formula_mismatch = std::max(rep.max_formula_mismatch, std::abs(d_fd - d_an));
    }
    for (double x : {z1 + 0.3, z1 + 0.9, z1 + 1.7}) {
        const cplx fd = (R(cplx(x + h)) - R(cplx(x - h))) / (2.0 * h);
        rep.boundary_derivative_error = std::max(rep.boundary_derivative_error, std::abs(fd - p11_prime(x, p)));
    }
    return rep;
}

}  // namespace nhnse
