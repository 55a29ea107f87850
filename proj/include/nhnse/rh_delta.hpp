#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nhnse/errors.hpp"
#include "nhnse/interp.hpp"
#include "nhnse/phase.hpp"
#include "nhnse/quadrature.hpp"
#include "nhnse/scattering.hpp"

namespace nhnse {

/// nu(s) = -ln(1 - |r(s)|^2) / (2 pi).
inline double nu_of(cplx r) {
    const double m = std::norm(r);
    if (!(m < 1.0)) throw NumericalGuardError("nu: |r| >= 1");
    return -std::log1p(-m) / (2.0 * std::numbers::pi);
}

/// Samples of nu over the whole scattering grid together with the contour
/// geometry. The contour is (-inf, z2) U (z1, inf); nu is also sampled in the
/// gap (z2, z1) so that the 4-point interpolant is smooth through z1 and z2.
struct NuProfile {
    PhaseContext ctx;
    LocalCubic<double> nu;
    LocalCubic<cplx> r;
    double nu1 = 0.0, nu2 = 0.0;
    cplx r1, r2;
    double rho = 0.0;                       // sup |r|
    double tail_left = 0.0, tail_right = 0.0;  // C in nu ~ C / s^2 beyond the grid

    double s_min() const { return nu.lo(); }
    double s_max() const { return nu.hi(); }
    double nu_at_stationary(int j) const { return j == 1 ? nu1 : nu2; }
    cplx r_at_stationary(int j) const { return j == 1 ? r1 : r2; }
    bool on_contour(double s) const { return s < ctx.z2 || s > ctx.z1; }
    bool is_zero() const { return rho == 0.0; }
};

inline NuProfile nu_profile(const ScatteringData& data, const PhaseContext& ctx) {
    ctx.require_valid("nu_profile");
    if (data.size() < 4) throw InputError("nu_profile: scattering grid too small");
    std::vector<double> v(data.size());
    double rho = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!(std::abs(data.r[i]) < 1.0))
            throw NumericalGuardError("nu_profile: |r| >= 1 at z = " + std::to_string(data.z[i]));
        v[i] = nu_of(data.r[i]);
        rho = std::max(rho, std::abs(data.r[i]));
    }
    NuProfile p;
    p.ctx = ctx;
    p.nu = LocalCubic<double>(data.z, v, 0.0);
    p.r = LocalCubic<cplx>(data.z, data.r, cplx{});
    if (!(p.s_min() < ctx.z2 - 1.0 && p.s_max() > ctx.z1 + 1.0))
        throw InputError("nu_profile: scattering grid must cover [z2 - 1, z1 + 1]");
    p.nu1 = p.nu(ctx.z1);
    p.nu2 = p.nu(ctx.z2);
    p.r1 = p.r(ctx.z1);
    p.r2 = p.r(ctx.z2);
    p.rho = rho;
    p.tail_left = v.front() * data.z.front() * data.z.front();
    p.tail_right = v.back() * data.z.back() * data.z.back();
    return p;
}

enum class Side { none, plus, minus };

inline int side_sign(Side s) { return s == Side::plus ? 1 : (s == Side::minus ? -1 : 0); }

struct DeltaValue {
    cplx z;
    cplx value;
    Side boundary_side = Side::none;
};

struct DeltaOptions {
    QuadOptions quad{1e-14, 1e-12, 50};
};

namespace detail {

// Principal log; on the negative real axis `side` selects the limit from
// above (+1, arg = pi) or below (-1, arg = -pi).
inline cplx log_side(cplx w, int side) {
    if (w.imag() == 0.0 && w.real() < 0.0 && side < 0) return {std::log(-w.real()), -std::numbers::pi};
    return std::log(w);
}

// Integral over [Z, inf) of C / (s^2 (s - z)).
inline cplx tail_integral(double C, double Z, cplx z) {
    if (C == 0.0) return 0.0;
    if (std::abs(z) < 0.5 * Z) {
        cplx sum = 0.0, zn = 1.0;
        double Zn = Z * Z;
        for (int n = 0; n < 200; ++n) {
            const cplx term = zn / (static_cast<double>(n + 2) * Zn);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            zn *= z;
            Zn *= Z;
        }
        return C * sum;
    }
    return C * (std::log(Z / (Z - z)) / (z * z) - 1.0 / (z * Z));
}

struct Piece {
    double a, b;
    double offset;  // constant subtracted from nu on this piece
};

struct CauchyAccumulator {
    cplx value = 0.0;
    double error = 0.0;
    bool converged = true;
};

// Adds the integral over [a, b] of (nu(s) - c)/(s - z) to acc. Near-singular
// behaviour is removed by subtracting nu(x0) - c, x0 = Re z clamped to [a, b].
// For real z inside (a, b) the principal value plus side * i pi (nu(z) - c)
// is returned.
inline void cauchy_piece(const NuProfile& p, const Piece& pc, cplx z, int side, const DeltaOptions& opt,
                         CauchyAccumulator& acc) {
    const double a = pc.a, b = pc.b, c = pc.offset;
    const double x0 = std::clamp(z.real(), a, b);
    const double v0 = p.nu(x0) - c;
    const bool real_inside = z.imag() == 0.0 && z.real() > a && z.real() < b;
    const bool at_end = z.imag() == 0.0 && (z.real() == a || z.real() == b);

    if (real_inside && side == 0)
        throw InputError("delta: real evaluation point on the contour needs a boundary side");
    if (at_end && v0 != 0.0) throw InputError("delta: evaluation point at a logarithmic endpoint");

    // breakpoints: interpolation nodes inside (a, b), plus x0
    const auto& nodes = p.nu.nodes();
    std::vector<double> cuts{a};
    for (auto it = std::upper_bound(nodes.begin(), nodes.end(), a); it != nodes.end() && *it < b; ++it)
        cuts.push_back(*it);
    cuts.push_back(b);
    if (x0 > a && x0 < b) {
        cuts.insert(std::upper_bound(cuts.begin(), cuts.end(), x0), x0);
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    }
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        if (!(hi > lo)) continue;
        const std::size_t cell = p.nu.cell(0.5 * (lo + hi));
        QuadOptions q = opt.quad;
        QuadResult r;
        if (lo == x0 || hi == x0) {
            // next to x0 the numerator vanishes linearly; factor it out so that
            // rounding in nu(s) - nu(x0) is not amplified by 1/(s - z)
            const double mismatch = p.nu.eval_cell(x0, cell) - c - v0;
            auto f = [&](double s) -> cplx {
                return ((s - x0) * p.nu.slope_cell(s, x0, cell) + mismatch) / (s - z);
            };
            r = integrate(f, lo, hi, q);
        } else {
            auto f = [&](double s) -> cplx { return (p.nu.eval_cell(s, cell) - c - v0) / (s - z); };
            r = integrate(f, lo, hi, q);
        }
        acc.value += r.value;
        acc.error += r.error;
        acc.converged = acc.converged && r.converged;
    }
    if (v0 != 0.0) {
        if (real_inside)
            acc.value += v0 * (std::log((b - x0) / (x0 - a)) + cplx(0.0, side * std::numbers::pi));
        else
            acc.value += v0 * (std::log(cplx(b) - z) - std::log(cplx(a) - z));
    }
}

// Pieces of the contour for the plain Cauchy integral (j = 0) or for the
// regularized phase at z_j, where nu(z_j) is subtracted on the unit interval
// adjacent to z_j inside the contour.
inline std::vector<Piece> contour_pieces(const NuProfile& p, int j) {
    const double z1 = p.ctx.z1, z2 = p.ctx.z2, lo = p.s_min(), hi = p.s_max();
    switch (j) {
        case 0: return {{lo, z2, 0.0}, {z1, hi, 0.0}};
        case 2: return {{lo, z2 - 1.0, 0.0}, {z2 - 1.0, z2, p.nu2}, {z1, hi, 0.0}};
        case 1: return {{lo, z2, 0.0}, {z1, z1 + 1.0, p.nu1}, {z1 + 1.0, hi, 0.0}};
        default: throw InputError("stationary point index must be 1 or 2");
    }
}

inline cplx contour_integral(const NuProfile& p, int j, cplx z, Side side, const DeltaOptions& opt) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InputError("delta: non-finite point");
    if (p.is_zero()) return 0.0;
    CauchyAccumulator acc;
    const int sg = side_sign(side);
    for (const auto& pc : contour_pieces(p, j)) cauchy_piece(p, pc, z, sg, opt, acc);
    if (!acc.converged)
        throw NumericalGuardError("delta: Cauchy quadrature did not converge (error estimate " +
                                  std::to_string(acc.error) + ")");
    // analytic tails beyond the grid ends, nu ~ C / s^2
    acc.value += tail_integral(p.tail_right, p.s_max(), z);
    acc.value -= tail_integral(p.tail_left, -p.s_min(), -z);
    return acc.value;
}

}  // namespace detail

/// Cauchy integral of nu over the contour, i.e. -i log delta(z).
inline cplx delta_exponent(cplx z, const NuProfile& p, Side side = Side::none, const DeltaOptions& opt = {}) {
    if (z.imag() != 0.0) side = Side::none;
    return detail::contour_integral(p, 0, z, side, opt);
}

/// delta(z) = exp(i * integral of nu(s)/(s - z) over the contour). For real z
/// on the contour `side` selects the boundary value from above (plus) or
/// below (minus).
inline DeltaValue delta(cplx z, const NuProfile& p, Side side = Side::none, const DeltaOptions& opt = {}) {
    if (z.imag() != 0.0) side = Side::none;
    const bool on = z.imag() == 0.0 && p.on_contour(z.real());
    if (on && side == Side::none)
        throw InputError("delta: z = " + std::to_string(z.real()) + " lies on the contour; choose a side");
    if (!on) side = Side::none;
    return {z, std::exp(I * detail::contour_integral(p, 0, z, side, opt)), side};
}

/// Regularized phase at stationary point j. With chi_2 the indicator of
/// (z2 - 1, z2) and chi_1 that of (z1, z1 + 1):
///   lambda_2(z) = int (nu - chi_2 nu2)/(s - z) ds - nu2 Log(z - z2 + 1),
///   lambda_1(z) = int (nu - chi_1 nu1)/(s - z) ds + nu1 Log(z1 + 1 - z),
/// so that delta = (z - z2)^{i nu2} e^{i lambda_2} = (z1 - z)^{-i nu1} e^{i lambda_1}
/// with principal branches. Both are bounded at their own stationary point.
inline cplx lambda_reg(cplx z, int j, const NuProfile& p, Side side = Side::none, const DeltaOptions& opt = {}) {
    if (j != 1 && j != 2) throw InputError("lambda_reg: j must be 1 or 2");
    if (z.imag() != 0.0) side = Side::none;
    if (z.imag() == 0.0 && z.real() == (j == 2 ? p.ctx.z2 - 1.0 : p.ctx.z1 + 1.0))
        throw InputError("lambda_reg: logarithmic singularity at the end of the subtraction interval");
    const cplx body = detail::contour_integral(p, j, z, side, opt);
    const int sg = side_sign(side);
    if (j == 2) return body - p.nu2 * detail::log_side(z - p.ctx.z2 + 1.0, sg);
    return body + p.nu1 * detail::log_side(p.ctx.z1 + 1.0 - z, -sg);
}

/// lambda_j(z_j): real-valued, the integrand on the subtraction interval has
/// a removable singularity at z_j.
inline double lambda_at_stationary(int j, const NuProfile& p, const DeltaOptions& opt = {}) {
    return lambda_reg(cplx(p.ctx.z(j)), j, p, Side::none, opt).real();
}

/// delta rebuilt from the regularized phase.
inline cplx delta_from_lambda(cplx z, int j, const NuProfile& p, Side side = Side::none,
                              const DeltaOptions& opt = {}) {
    if (z.imag() != 0.0) side = Side::none;
    const cplx lam = lambda_reg(z, j, p, side, opt);
    const int sg = side_sign(side);
    if (j == 2) return std::exp(I * p.nu2 * detail::log_side(z - p.ctx.z2, sg) + I * lam);
    return std::exp(-I * p.nu1 * detail::log_side(p.ctx.z1 - z, -sg) + I * lam);
}

/// lambda_j(z_j) recovered from the raw Cauchy integral at the off-axis point
/// z_j + rho e^{i angle}, stripping the local power by hand.
inline double lambda_from_raw_delta(int j, const NuProfile& p, double rho = 1e-7,
                                    double angle = std::numbers::pi / 2.0, const DeltaOptions& opt = {}) {
    const double zj = p.ctx.z(j);
    const cplx z = zj + std::polar(rho, angle);
    const cplx body = detail::contour_integral(p, 0, z, Side::none, opt);
    if (j == 2) return (body - p.nu2 * std::log(z - zj)).real();
    return (body + p.nu1 * std::log(zj - z)).real();
}

/// Modulus bounds sqrt(1 - rho^2) <= |delta| <= 1/sqrt(1 - rho^2).
inline bool within_modulus_bounds(const DeltaValue& d, double rho, double slack = 1e-12) {
    const double lo = std::sqrt(1.0 - rho * rho);
    const double m = std::abs(d.value);
    return m >= lo - slack && m <= 1.0 / lo + slack;
}

}  // namespace nhnse
