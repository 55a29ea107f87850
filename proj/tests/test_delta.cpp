#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "common.hpp"

using namespace nhnse;
using nhnse::testing::sech_data;
using nhnse::testing::sech_profile;

namespace {

constexpr double pi = std::numbers::pi;

NuProfile zero_profile() { return nu_profile(ScatteringData::zero(uniform_z_grid(8.0, 401)), stationary_points(1.2)); }

std::vector<cplx> random_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-3.0, 4.0), im(0.05, 2.0);
    std::bernoulli_distribution flip(0.5);
    std::vector<cplx> z;
    for (std::size_t i = 0; i < n; ++i) z.push_back({re(rng), flip(rng) ? im(rng) : -im(rng)});
    return z;
}

// Simpson on [a, b] with n (even) panels
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
    return s * h / 3.0;
}

// lambda_j(z_j) by brute-force quadrature of the subtracted integrand (the
// log term vanishes at z = z_j); h scales the panel width
double brute_lambda(const NuProfile& p, int j, int panels_per_unit) {
    const double zj = p.ctx.z(j), nuj = p.nu_at_stationary(j);
    auto nu = [&](double s) { return p.nu(s); };
    auto plain = [&](double s) { return nu(s) / (s - zj); };
    auto sub = [&](double s) { return s == zj ? p.nu.derivative(s) : (nu(s) - nuj) / (s - zj); };
    const double lo = p.s_min(), hi = p.s_max();
    auto panels = [&](double a, double b) { return 2 * std::max(1, static_cast<int>((b - a) * panels_per_unit / 2)); };
    double v = 0.0;
    if (j == 2) {
        const double c = zj - 1.0;
        v += simpson(plain, lo, c, panels(lo, c));
        v += simpson(sub, c, zj, panels(c, zj));
        v += simpson(plain, p.ctx.z1, hi, panels(p.ctx.z1, hi));
    } else {
        const double c = zj + 1.0;
        v += simpson(plain, lo, p.ctx.z2, panels(lo, p.ctx.z2));
        v += simpson(sub, zj, c, panels(zj, c));
        v += simpson(plain, c, hi, panels(c, hi));
    }
    return v;
}

}  // namespace

TEST(Nu, ClosedFormValues) {
    EXPECT_EQ(nu_of(0.0), 0.0);
    EXPECT_NEAR(nu_of(std::sqrt(1.0 - std::exp(-2.0 * pi))), 1.0, 1e-12);
    EXPECT_NEAR(nu_of(0.5), 0.0457860238696217, 1e-15);
    EXPECT_THROW(nu_of(1.0), NumericalGuardError);
}

TEST(Nu, ProfileIsNonNegativeAndDecays) {
    const auto& p = sech_profile();
    for (double v : p.nu.values()) EXPECT_GE(v, 0.0);
    EXPECT_LT(p.nu.values().front(), 1e-6);
    EXPECT_LT(p.nu.values().back(), 1e-6);
    EXPECT_GT(p.nu1, 0.0);
    EXPECT_GT(p.nu2, 0.0);
    EXPECT_NEAR(p.nu2, nu_of(p.r(p.ctx.z2)), 1e-7);
}

TEST(Nu, ProfileNeedsCoverage) {
    const auto narrow = ScatteringData::zero(uniform_z_grid(0.5, 11));
    EXPECT_THROW(nu_profile(narrow, stationary_points(1.2)), InputError);
    EXPECT_THROW(nu_profile(sech_data(), stationary_points(0.5)), ValidityError);
}

TEST(Delta, TrivialForZeroReflection) {
    const auto p = zero_profile();
    for (cplx z : random_points(10, 1)) {
        EXPECT_EQ(delta(z, p).value, cplx(1.0));
        EXPECT_EQ(lambda_reg(z, 1, p), cplx(0.0));
        EXPECT_EQ(lambda_reg(z, 2, p), cplx(0.0));
    }
    EXPECT_EQ(lambda_at_stationary(1, p), 0.0);
}

TEST(Delta, SchwarzSymmetry) {
    const auto& p = sech_profile();
    for (cplx z : random_points(100, 2))
        EXPECT_LT(std::abs(delta(z, p).value * std::conj(delta(std::conj(z), p).value) - 1.0), 1e-8) << z;
}

TEST(Delta, ModulusBounds) {
    const auto& p = sech_profile();
    for (cplx z : random_points(100, 3)) EXPECT_TRUE(within_modulus_bounds(delta(z, p), p.rho)) << z;
    for (double s : {-2.0, -0.5, 1.5, 3.0}) {
        EXPECT_TRUE(within_modulus_bounds(delta(s, p, Side::plus), p.rho));
        EXPECT_TRUE(within_modulus_bounds(delta(s, p, Side::minus), p.rho));
    }
}

TEST(Delta, JumpAcrossContour) {
    const auto& p = sech_profile();
    for (double s : sech_data().z) {
        if (std::abs(s) > 6.0 || !p.on_contour(s) || std::abs(s - p.ctx.z1) < 1e-3 || std::abs(s - p.ctx.z2) < 1e-3)
            continue;
        const cplx ratio = delta(s, p, Side::plus).value / delta(s, p, Side::minus).value;
        EXPECT_LT(std::abs(ratio - (1.0 - std::norm(p.r(s)))), 1e-6) << s;
    }
    for (double s : {0.0, 0.3, 0.6}) {
        ASSERT_FALSE(p.on_contour(s));
        EXPECT_LT(std::abs(delta(s, p).value - delta(cplx(s, 1e-12), p).value), 1e-8);
    }
    EXPECT_THROW(delta(2.0, p), InputError);
}

TEST(Delta, ReconstructionFromLambda) {
    const auto& p = sech_profile();
    for (cplx z : random_points(50, 4))
        for (int j : {1, 2}) EXPECT_LT(std::abs(delta_from_lambda(z, j, p) - delta(z, p).value), 1e-6) << z << ' ' << j;
}

TEST(Delta, ReconstructionOnTheContour) {
    const auto& p = sech_profile();
    for (double s : {-1.5, 2.5})
        for (Side side : {Side::plus, Side::minus})
            for (int j : {1, 2})
                EXPECT_LT(std::abs(delta_from_lambda(s, j, p, side) - delta(s, p, side).value), 1e-6);
}

TEST(Delta, LambdaHolderEstimate) {
    const auto& p = sech_profile();
    for (int j : {1, 2}) {
        const double l0 = lambda_at_stationary(j, p);
        double worst = 0.0;
        for (double rho : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
            const cplx z = p.ctx.z(j) + std::polar(rho, pi / 3.0);
            worst = std::max(worst, std::abs(lambda_reg(z, j, p) - l0) / std::sqrt(rho));
        }
        EXPECT_LT(worst, 1.0) << j;
    }
}

TEST(Delta, LambdaAtStationaryAgainstBruteForce) {
    const auto& p = sech_profile();
    for (int j : {1, 2}) {
        const double coarse = brute_lambda(p, j, 4000), fine = brute_lambda(p, j, 8000);
        EXPECT_LT(std::abs(coarse - fine), 1e-8) << j;
        EXPECT_LT(std::abs(lambda_at_stationary(j, p) - fine), 1e-6) << j;
    }
}

TEST(Delta, LambdaFromRawDelta) {
    const auto& p = sech_profile();
    for (int j : {1, 2}) {
        EXPECT_LT(std::abs(lambda_from_raw_delta(j, p) - lambda_at_stationary(j, p)), 1e-4) << j;
        EXPECT_LT(std::abs(lambda_from_raw_delta(j, p, 1e-7, 2.0) - lambda_at_stationary(j, p)), 1e-4) << j;
    }
}

TEST(Delta, LambdaErrors) {
    const auto& p = sech_profile();
    EXPECT_THROW(lambda_reg(p.ctx.z2 - 1.0, 2, p), InputError);
    EXPECT_THROW(lambda_reg(p.ctx.z1 + 1.0, 1, p), InputError);
    EXPECT_THROW(lambda_reg(cplx(0.0, 1.0), 3, p), InputError);
}

TEST(Delta, LocalPowerModulus) {
    // |(z - z_j)^{i nu}| = exp(-nu arg(z - z_j)), unit on the real axis right of z_j
    const auto& p = sech_profile();
    const double nu = p.nu2, zj = p.ctx.z2;
    for (double phi : {0.0, 0.5, 2.0, -1.0}) {
        const cplx z = zj + std::polar(0.7, phi);
        EXPECT_NEAR(std::abs(std::exp(I * nu * std::log(z - zj))), std::exp(-nu * phi), 1e-15);
    }
}
