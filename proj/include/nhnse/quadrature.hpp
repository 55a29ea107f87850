#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "nhnse/grid.hpp"

namespace nhnse {

struct QuadResult {
    cplx value{};
    double error = 0.0;
    bool converged = true;
    std::size_t evaluations = 0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        converged = converged && o.converged;
        evaluations += o.evaluations;
        return *this;
    }
};

struct QuadOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    int max_depth = 40;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> gk15_x{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_wk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk15_wg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
QuadResult gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx k = fc * gk15_wk[7];
    cplx g = fc * gk15_wg[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = h * gk15_x[j];
        const cplx f1 = f(c - dx), f2 = f(c + dx);
        k += (f1 + f2) * gk15_wk[j];
        if (j % 2 == 1) g += (f1 + f2) * gk15_wg[j / 2];
    }
    QuadResult r;
    r.value = k * h;
    r.error = std::abs((k - g) * h);
    r.evaluations = 15;
    return r;
}

template <typename F>
QuadResult adapt(F& f, double a, double b, const QuadResult& whole, const QuadOptions& opt, int depth) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(whole.value));
    if (whole.error <= tol || b - a <= 1e-14 * std::max(1.0, std::abs(a))) return whole;
    if (depth >= opt.max_depth) {
        QuadResult r = whole;
        r.converged = false;
        return r;
    }
    const double m = 0.5 * (a + b);
    QuadResult left = gk15(f, a, m), right = gk15(f, m, b);
    QuadOptions sub = opt;
    sub.abs_tol = 0.5 * opt.abs_tol;
    QuadResult out = adapt(f, a, m, left, sub, depth + 1);
    out += adapt(f, m, b, right, sub, depth + 1);
    out.evaluations += whole.evaluations;
    return out;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature of a complex-valued integrand on
/// a finite interval. `converged` is false if the bisection depth limit was
/// reached before the local error estimate met the tolerance.
template <typename F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    if (a == b) return {};
    if (a > b) {
        QuadResult r = integrate(f, b, a, opt);
        r.value = -r.value;
        return r;
    }
    QuadResult whole = detail::gk15(f, a, b);
    return detail::adapt(f, a, b, whole, opt, 0);
}

}  // namespace nhnse
