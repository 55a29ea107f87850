#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "nhnse/errors.hpp"
#include "nhnse/gamma.hpp"
#include "nhnse/mat2.hpp"
#include "nhnse/phase.hpp"
#include "nhnse/rh_delta.hpp"

namespace nhnse {

/// How the stationary point with theta'' < 0 enters the leading term.
///  a: reflected frame at z1. The local variable is taken along -(z - z1), so
///     the model uses |theta''(z1)| and conj(r), and the z1 contribution is
///     -i conj(beta12^1) / sqrt(2 t |theta''(z1)|).
///  b: literal principal branch sqrt(2 theta''(z1)) = i sqrt(2 |theta''(z1)|)
///     with beta12^1 unconjugated.
enum class Convention { a, b };

inline std::string to_string(Convention c) { return c == Convention::a ? "a" : "b"; }

inline Convention convention_from(const std::string& s) {
    if (s == "a") return Convention::a;
    if (s == "b") return Convention::b;
    throw InputError("convention must be 'a' or 'b', got '" + s + "'");
}

/// Which route produces lambda_j(z_j).
enum class LambdaPath { regularized, raw_delta };

struct StationaryConstants {
    double nu = 0.0;
    double lambda = 0.0;  // lambda_j(z_j)
    double theta = 0.0;
    double theta_pp = 0.0;
    cplx r_at_zj;
    cplx r_mod;
    cplx beta12;
    cplx beta21;
};

struct AsymptoticConstants {
    double xi = 0.0, t = 0.0;
    Convention convention = Convention::a;
    std::array<StationaryConstants, 2> point;  // index 0 -> z1, 1 -> z2

    const StationaryConstants& at(int j) const { return point[static_cast<std::size_t>(j - 1)]; }
};

/// Modified reflection at z_j. With a = |theta''(z_j)|:
///   j = 2: r(z2) exp(-2i lambda + 2i t theta + i nu log(2 t a))
///   j = 1: conj(r(z1)) exp(2i lambda - 2i t theta + i nu log(2 t a))
/// Modulus is |r(z_j)| in both cases.
inline cplx modified_reflection(int j, cplx r_at_zj, double nu, double lambda, double theta_j, double theta_pp_j,
                                double t) {
    if (!(t > 0.0)) throw InputError("modified_reflection: t must be positive");
    if (theta_pp_j == 0.0 || !std::isfinite(theta_pp_j)) throw ValidityError("modified_reflection: degenerate theta''");
    if (r_at_zj == cplx{}) return 0.0;
    const double lg = nu * std::log(2.0 * t * std::abs(theta_pp_j));
    if (j == 2) return r_at_zj * std::polar(1.0, -2.0 * lambda + 2.0 * t * theta_j + lg);
    if (j == 1) return std::conj(r_at_zj) * std::polar(1.0, 2.0 * lambda - 2.0 * t * theta_j + lg);
    throw InputError("modified_reflection: j must be 1 or 2");
}

/// beta12 = sqrt(2 pi) e^{i pi/4} e^{-pi nu/2} / (r_mod Gamma(-i nu)); zero if nu = 0.
inline cplx beta12(cplx r_mod, double nu) {
    if (nu < 0.0 || !std::isfinite(nu)) throw InputError("beta12: nu must be finite and non-negative");
    if (nu == 0.0 || r_mod == cplx{}) return 0.0;
    const double pre = std::sqrt(2.0 * std::numbers::pi) * std::exp(-std::numbers::pi * nu / 2.0);
    return pre * std::polar(1.0, std::numbers::pi / 4.0) / (r_mod * complex_gamma(cplx(0.0, -nu)));
}

/// beta21 from beta12 * beta21 = nu.
inline cplx beta21(cplx b12, double nu) { return b12 == cplx{} ? cplx{} : nu / b12; }

/// Residue-sum coefficient M1 of the local model solution (z-independent).
inline Mat2 m1_lo(const AsymptoticConstants& c) {
    if (!(c.t > 0.0)) throw InputError("m1_lo: t must be positive");
    const auto& p1 = c.at(1);
    const auto& p2 = c.at(2);
    if (p1.theta_pp == 0.0 || p2.theta_pp == 0.0) throw ValidityError("m1_lo: degenerate theta''");
    const double s1 = std::sqrt(2.0 * c.t * std::abs(p1.theta_pp));
    const double s2 = std::sqrt(2.0 * c.t * std::abs(p2.theta_pp));
    cplx m12 = -I * p2.beta12 / s2;
    cplx m21 = I * p2.beta21 / s2;
    if (c.convention == Convention::a) {
        m12 += -I * std::conj(p1.beta12) / s1;
        m21 += I * std::conj(p1.beta21) / s1;
    } else {
        m12 += -I * p1.beta12 / (I * s1);
        m21 += I * p1.beta21 / (I * s1);
    }
    return Mat2(0.0, m12, m21, 0.0);
}

struct AsymptoticOptions {
    double t_min = 10.0;
    double ray_margin = 0.05;
    LambdaPath lambda_path = LambdaPath::regularized;
    DeltaOptions delta{};
};

struct AsymptoticValue {
    double x = 0.0, t = 0.0, xi = 0.0;
    cplx q;
    double leading_magnitude = 0.0;  // upper bound on |q| from |beta12|^2 = nu
    const char* error_order = "O(t^-3/4)";
};

/// The t-independent part of the long-time formula along one ray.
class RayAsymptotics {
public:
    RayAsymptotics(const ScatteringData& data, double xi, const AsymptoticOptions& opt = {})
        : opt_(opt), ctx_(stationary_points(xi)) {
        if (ctx_.status != PhaseStatus::valid || !(xi > critical_xi + opt.ray_margin))
            throw ValidityError("ray xi = " + std::to_string(xi) + " is outside the region xi > 2/3 + " +
                                std::to_string(opt.ray_margin) + " (" + to_string(ctx_.status) + ")");
        nu_ = nu_profile(data, ctx_);
        for (int j : {1, 2}) {
            double lam = 0.0;
            if (!nu_.is_zero())
                lam = opt.lambda_path == LambdaPath::regularized ? lambda_at_stationary(j, nu_, opt.delta)
                                                                 : lambda_from_raw_delta(j, nu_, 1e-7,
                                                                                         std::numbers::pi / 2.0,
                                                                                         opt.delta);
            lambda_[static_cast<std::size_t>(j - 1)] = lam;
        }
    }

    const PhaseContext& context() const { return ctx_; }
    const NuProfile& profile() const { return nu_; }
    double lambda(int j) const { return lambda_[static_cast<std::size_t>(j - 1)]; }
    const AsymptoticOptions& options() const { return opt_; }

    AsymptoticConstants constants(double t, Convention conv) const {
        if (!(t > 0.0)) throw InputError("asymptotics: t must be positive");
        AsymptoticConstants c;
        c.xi = ctx_.xi;
        c.t = t;
        c.convention = conv;
        for (int j : {1, 2}) {
            auto& s = c.point[static_cast<std::size_t>(j - 1)];
            // nu taken from r(z_j) itself so that |beta12|^2 = nu holds to rounding
            s.r_at_zj = nu_.r_at_stationary(j);
            s.nu = nu_of(s.r_at_zj);
            s.lambda = lambda(j);
            s.theta = ctx_.theta_at(j);
            s.theta_pp = ctx_.theta_pp(j);
            s.r_mod = modified_reflection(j, s.r_at_zj, s.nu, s.lambda, s.theta, s.theta_pp, t);
            s.beta12 = beta12(s.r_mod, s.nu);
            s.beta21 = beta21(s.beta12, s.nu);
        }
        return c;
    }

    double magnitude_bound(double t) const {
        double b = 0.0;
        for (int j : {1, 2}) b += std::sqrt(nu_of(nu_.r_at_stationary(j)) / (2.0 * std::abs(ctx_.theta_pp(j))));
        return 2.0 * b / std::sqrt(t);
    }

    AsymptoticValue value(double t, Convention conv) const {
        if (t < opt_.t_min)
            throw ValidityError("asymptotics: t = " + std::to_string(t) + " below t_min = " + std::to_string(opt_.t_min));
        const auto c = constants(t, conv);
        AsymptoticValue v;
        v.t = t;
        v.xi = ctx_.xi;
        v.x = ctx_.xi * t;
        v.q = 2.0 * I * m1_lo(c)(0, 1);
        v.leading_magnitude = magnitude_bound(t);
        return v;
    }

private:
    AsymptoticOptions opt_;
    PhaseContext ctx_;
    NuProfile nu_;
    std::array<double, 2> lambda_{};
};

/// q(x, t) ~ 2i (M1)_12 along the ray xi = x / t.
inline AsymptoticValue q_asymptotic(double x, double t, const ScatteringData& data, Convention conv = Convention::a,
                                    const AsymptoticOptions& opt = {}) {
    if (!(t > 0.0)) throw ValidityError("asymptotics: t must be positive");
    return RayAsymptotics(data, x / t, opt).value(t, conv);
}

inline void write_asymptotic_csv_header(std::ostream& os) { os << "x,t,xi,Re q,Im q,|q|,bound\n"; }

inline void write_asymptotic_csv_row(std::ostream& os, const AsymptoticValue& v) {
    const auto old = os.precision(17);
    os << v.x << ',' << v.t << ',' << v.xi << ',' << v.q.real() << ',' << v.q.imag() << ',' << std::abs(v.q) << ','
       << v.leading_magnitude << '\n';
    os.precision(old);
}

}  // namespace nhnse
