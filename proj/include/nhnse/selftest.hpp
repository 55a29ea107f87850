#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nhnse/akns.hpp"
#include "nhnse/asymptotics.hpp"
#include "nhnse/datum.hpp"
#include "nhnse/gamma.hpp"
#include "nhnse/pde.hpp"
#include "nhnse/phase.hpp"
#include "nhnse/rh_delta.hpp"
#include "nhnse/scattering.hpp"

namespace nhnse {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

namespace detail {

inline CheckResult run_check(const std::string& name, double tol, const std::function<double()>& f) {
    CheckResult c{name, false, 0.0, tol, {}};
    try {
        c.value = f();
        c.pass = std::isfinite(c.value) && c.value <= tol;
    } catch (const std::exception& e) {
        c.detail = e.what();
    }
    return c;
}

inline double max_abs(const CField& v) {
    double m = 0.0;
    for (auto x : v) m = std::max(m, std::abs(x));
    return m;
}

template <class F>
double soliton_residual(Reduction k, F exact) {
    const Grid g(1024, 60.0);
    const double dt = 2e-5, t = 0.3;
    auto sample = [&](double tt) {
        CField q(g.n);
        for (std::size_t j = 0; j < g.n; ++j) q[j] = exact(g.x(j), tt);
        return q;
    };
    ScalarStencil s{g, sample(t - dt), sample(t), sample(t + dt), dt};
    return max_abs(residual_reduced(k, s));
}

}  // namespace detail

/// A fast invariant suite covering every numerical module. Each check reports
/// a measured value against a fixed tolerance.
inline std::vector<CheckResult> run_selftest(unsigned threads = 1) {
    using detail::run_check;
    constexpr double pi = std::numbers::pi;
    std::vector<CheckResult> out;

    out.push_back(run_check("gamma: reflection modulus on the imaginary axis", 1e-13, [] {
        double worst = 0.0;
        for (double y : {0.1, 0.7, 2.5}) {
            const double exact = pi / (y * std::sinh(pi * y));
            worst = std::max(worst, std::abs(std::norm(complex_gamma({0.0, y})) - exact) / exact);
        }
        return worst;
    }));
    out.push_back(run_check("gamma: integer and half-integer values", 1e-13, [] {
        return std::max(std::abs(complex_gamma(5.0) - 24.0) / 24.0,
                        std::abs(complex_gamma(0.5) - std::sqrt(pi)) / std::sqrt(pi));
    }));

    out.push_back(run_check("kdv soliton residual", 1e-6, [] {
        return detail::soliton_residual(Reduction::kdv, [](double x, double t) {
            const double s = 1.0 / std::cosh(x - 4.0 * t);
            return cplx(2.0 * s * s);
        });
    }));
    out.push_back(run_check("mkdv soliton residual", 1e-6, [] {
        return detail::soliton_residual(Reduction::mkdv,
                                        [](double x, double t) { return cplx(1.0 / std::cosh(x - t)); });
    }));
    out.push_back(run_check("nls soliton residual", 1e-6, [] {
        return detail::soliton_residual(Reduction::nls,
                                        [](double x, double t) { return std::polar(1.0 / std::cosh(x), t); });
    }));

    out.push_back(run_check("plane wave dispersion", 1e-8, [] {
        const Grid g(64, 2.0 * pi);
        const double A = 0.3, k = 2.0, T = 0.1;
        const double w = k * k * k / 4.0 + k * k / 2.0 + k - 2.0 + A * A * (1.5 * k + 1.0);
        CField q0(g.n);
        for (std::size_t j = 0; j < g.n; ++j) q0[j] = std::polar(A, k * g.x(j));
        EvolutionConfig cfg;
        cfg.grid = g;
        cfg.dt = 1e-3;
        cfg.t_final = T;
        cfg.edge_tol = 0.0;
        cfg.snapshot_times = {T};
        cfg.keep_snapshots = true;
        const auto res = evolve_periodic(q0, cfg);
        double err = 0.0;
        for (std::size_t j = 0; j < g.n; ++j)
            err = std::max(err, std::abs(res.snapshots.back().q[j] - std::polar(A, k * g.x(j) - w * T)));
        return err;
    }));

    out.push_back(run_check("stationary points solve theta' = 0", 1e-12, [] {
        double worst = 0.0;
        for (double xi : {0.7, 1.0, 1.2, 3.0, 10.0}) {
            const auto c = stationary_points(xi);
            worst = std::max({worst, std::abs(theta_prime(c.z1, xi)), std::abs(theta_prime(c.z2, xi))});
        }
        return worst;
    }));
    out.push_back(run_check("phase trichotomy", 0.0, [] {
        const bool ok = stationary_points(1.0).status == PhaseStatus::valid &&
                        stationary_points(critical_xi).status == PhaseStatus::degenerate &&
                        stationary_points(0.5).status == PhaseStatus::invalid;
        return ok ? 0.0 : 1.0;
    }));

    // shared scattering data for the spectral checks
    const InitialDatum datum(Grid(8192, 64.0), ProfileSpec{ProfileKind::sech, 0.3, 1.0, 0.0, 0.0});
    ReflectionOptions ro;
    ro.threads = threads;
    std::optional<ScatteringData> data;
    out.push_back(run_check("scattering unimodularity", 1e-8, [&] {
        data = reflection_coefficient(datum, uniform_z_grid(8.0, 801), ro);
        return data->max_unimodularity_defect;
    }));
    out.push_back(run_check("scattering thread independence", 0.0, [&] {
        if (!data) throw Error("scattering unavailable");
        ReflectionOptions one = ro;
        one.threads = threads > 1 ? 1 : 2;
        const auto again = reflection_coefficient(datum, uniform_z_grid(8.0, 801), one);
        double d = 0.0;
        for (std::size_t i = 0; i < again.size(); ++i) d = std::max(d, std::abs(again.r[i] - data->r[i]));
        return d;
    }));
    out.push_back(run_check("scattering symmetries", 1e-8, [&] {
        if (!data) throw Error("scattering unavailable");
        return check_symmetries(*data, datum, threads).max_deviation();
    }));

    const auto ctx = stationary_points(1.2);
    std::optional<NuProfile> prof;
    auto profile = [&]() -> const NuProfile& {
        if (!data) throw Error("scattering unavailable");
        if (!prof) prof = nu_profile(*data, ctx);
        return *prof;
    };
    out.push_back(run_check("delta Schwarz symmetry", 1e-8, [&] {
        double worst = 0.0;
        for (cplx z : {cplx(0.3, 0.7), cplx(-1.2, 0.2), cplx(2.0, -0.5)})
            worst = std::max(worst,
                             std::abs(delta(z, profile()).value * std::conj(delta(std::conj(z), profile()).value) - 1.0));
        return worst;
    }));
    out.push_back(run_check("delta jump across the contour", 1e-6, [&] {
        double worst = 0.0;
        for (double s : {-1.5, 2.0}) {
            const cplx ratio = delta(s, profile(), Side::plus).value / delta(s, profile(), Side::minus).value;
            worst = std::max(worst, std::abs(ratio - (1.0 - std::norm(profile().r(s)))));
        }
        return worst;
    }));
    out.push_back(run_check("delta reconstruction from lambda", 1e-6, [&] {
        double worst = 0.0;
        for (cplx z : {cplx(0.5, 0.4), cplx(-0.2, -0.3)})
            for (int j : {1, 2})
                worst = std::max(worst, std::abs(delta_from_lambda(z, j, profile()) - delta(z, profile()).value));
        return worst;
    }));
    out.push_back(run_check("parabolic-cylinder modulus |beta12|^2 = nu", 1e-10, [] {
        double worst = 0.0;
        for (double nu : {0.01, 0.1, 0.3, 0.5}) {
            const double r = std::sqrt(1.0 - std::exp(-2.0 * pi * nu));
            const cplx b = beta12(std::polar(r, 0.4), nu);
            worst = std::max(worst, std::abs(std::norm(b) - nu));
        }
        return worst;
    }));
    out.push_back(run_check("asymptotic evaluation is deterministic", 0.0, [&] {
        if (!data) throw Error("scattering unavailable");
        const RayAsymptotics a(*data, 1.2), b(*data, 1.2);
        const cplx u = a.value(40.0, Convention::a).q, v = b.value(40.0, Convention::a).q;
        return u == v ? 0.0 : std::abs(u - v) + 1e-300;
    }));
    return out;
}

}  // namespace nhnse
