#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "nhnse/gamma.hpp"

using nhnse::cplx;
using nhnse::complex_gamma;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Gamma, ClassicalValues) {
    EXPECT_LT(rel(complex_gamma(1.0), 1.0), 1e-14);
    EXPECT_LT(rel(complex_gamma(0.5), std::sqrt(std::numbers::pi)), 1e-14);
    EXPECT_LT(rel(complex_gamma(6.0), 120.0), 1e-14);
}

TEST(Gamma, ModulusOnImaginaryAxis) {
    // |Gamma(iy)|^2 = pi / (y sinh(pi y))
    const double expect = std::sqrt(std::numbers::pi / std::sinh(std::numbers::pi));
    EXPECT_NEAR(std::abs(complex_gamma(cplx(0.0, -1.0))), expect, 1e-14);
    EXPECT_NEAR(expect, 0.521564, 1e-6);
}

TEST(Gamma, HighPrecisionReferenceValues) {
    // reference values computed with 30-digit arithmetic
    const struct {
        cplx w, g;
    } ref[] = {
        {{0.0, -1.0}, {-0.15494982830181068512, 0.49801566811835604271}},
        {{0.3, 7.0}, {0.000028487579955011350965, 7.7289635745084296675e-7}},
        {{-2.5, 0.5}, {-0.3338752035224323374, -0.20645730796360841492}},
        {{10.0, 10.0}, {1423.851941789183074, -3496.081973307944589}},
        {{0.0, -0.1}, {-0.56823808753712092351, 9.9020662958838438695}},
        {{4.2, -9.5}, {-0.0010332071399860605556, 0.003605772892524271943}},
    };
    for (const auto& r : ref) EXPECT_LT(rel(complex_gamma(r.w), r.g), 1e-12) << r.w;
}

TEST(Gamma, RecurrenceAndReflectionOnStrip) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(-4.5, 4.5), im(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const cplx w(re(rng), im(rng));
        EXPECT_LT(rel(complex_gamma(w + 1.0), w * complex_gamma(w)), 1e-12) << w;
        const cplx lhs = complex_gamma(w) * complex_gamma(1.0 - w);
        EXPECT_LT(rel(lhs, std::numbers::pi / std::sin(std::numbers::pi * w)), 1e-11) << w;
    }
}

TEST(Gamma, PolesAreRejected) {
    EXPECT_THROW(complex_gamma(0.0), nhnse::InputError);
    EXPECT_THROW(complex_gamma(-3.0), nhnse::InputError);
    EXPECT_THROW(complex_gamma(cplx(NAN, 0.0)), nhnse::InputError);
}
