#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "common.hpp"

using namespace nhnse;
using nhnse::testing::sech;
using nhnse::testing::sech_data;

namespace {

constexpr double pi = std::numbers::pi;

// |int sech(y) e^{-2izy} dy| by composite Simpson on [-40, 40]
double born_integral(double z) {
    const int n = 200000;
    const double a = -40.0, h = 80.0 / n;
    cplx s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double y = a + h * i;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w / std::cosh(y) * std::exp(cplx(0.0, -2.0 * z * y));
    }
    return std::abs(s * h / 3.0);
}

const Grid wide(8192, 64.0);

}  // namespace

TEST(Datum, EdgeDecayIsEnforced) {
    EXPECT_THROW(InitialDatum(Grid(4096, 40.0), sech(1.0)), InputError);
    EXPECT_NO_THROW(InitialDatum(Grid(4096, 64.0), sech(1.0)));
    EXPECT_NO_THROW(InitialDatum(Grid(4096, 40.0), ProfileSpec{ProfileKind::gaussian, 0.3, 1.0, 0.0, 0.0}));
}

TEST(Datum, SurrogateNorms) {
    const InitialDatum d(Grid(4096, 64.0), sech(0.5));
    const auto n = d.norms();
    // int sech^2 = 2, int (sech')^2 = 2/3, int x^2 sech^2 = pi^2/6
    EXPECT_NEAR(n.l2, 0.5 * std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(n.derivative_l2, 0.5 * std::sqrt(2.0 / 3.0), 1e-8);
    EXPECT_NEAR(n.weighted_l2, 0.5 * std::sqrt(pi * pi / 6.0), 1e-8);
}

TEST(Datum, MidpointsMatchClosedFormForCustomData) {
    const Grid g(1024, 64.0);
    const InitialDatum closed(g, sech(0.3, 0.4));
    const InitialDatum custom(g, closed.samples());
    const CField a = closed.midpoint_samples(), b = custom.midpoint_samples();
    double worst = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    EXPECT_LT(worst, 1e-12);
}

TEST(Scattering, ZeroDatumIsTrivial) {
    const InitialDatum d(Grid(256, 64.0), sech(0.0));
    for (double z : {-3.0, 0.0, 0.5, 7.0}) {
        const auto c = jost_scattering(d, z);
        EXPECT_EQ(c.s11, cplx(1.0));
        EXPECT_EQ(c.s21, cplx(0.0));
    }
    const auto data = reflection_coefficient(d, uniform_z_grid(8.0, 401));
    EXPECT_EQ(data.sup_norm_r, 0.0);
    const auto sym = check_symmetries(data, d);
    EXPECT_EQ(sym.max_s12_deviation, 0.0);
    EXPECT_EQ(sym.max_s22_deviation, 0.0);
}

TEST(Scattering, BornApproximation) {
    const double eps = 1e-3, z = 0.5;
    const double F = born_integral(z);
    EXPECT_NEAR(F, pi / std::cosh(pi * z), 1e-10);
    const auto c = jost_scattering(InitialDatum(wide, sech(eps)), z);
    EXPECT_NEAR(std::abs(c.s21) / eps / F, 1.0, 1e-4);
}

TEST(Scattering, UnimodularityForUnitSech) {
    const auto m = jost_matrix(InitialDatum(wide, sech(1.0)), 1.0);
    EXPECT_NEAR(std::norm(m.s11()) - std::norm(m.s21()), 1.0, 1e-8);
}

TEST(Scattering, SechReflectionProfile) {
    const auto& d = sech_data();
    EXPECT_LT(d.max_unimodularity_defect, 1e-8);
    EXPECT_LT(d.sup_norm_r, 1.0);
    EXPECT_LT(d.max_det_drift, 1e-6);
    EXPECT_LT(std::abs(d.s21.front()) + std::abs(d.s21.back()), 1e-3);
    EXPECT_LT(std::abs(d.r.front()) + std::abs(d.r.back()), 1e-3);
}

TEST(Scattering, TransmissionApproachesOneLikeInverseZ) {
    // s11 - 1 ~ -i ||q||^2 / (2z): at z = 8 this is 1.1e-2 for eps = 0.3, so
    // only the reflection entries are below 1e-3 at the grid ends
    const auto& d = sech_data();
    const double mass = 2.0 * 0.3 * 0.3;
    for (std::size_t i : {std::size_t{0}, d.size() - 1}) {
        const double z = d.z[i];
        EXPECT_NEAR(std::abs(d.s11[i] - 1.0) * 2.0 * std::abs(z) / mass, 1.0, 0.02) << z;
    }
}

TEST(Scattering, GaussianReflectionDecays) {
    const InitialDatum q0(wide, ProfileSpec{ProfileKind::gaussian, 0.3, 1.0, 0.0, 0.0});
    ReflectionOptions o;
    o.threads = 2;
    const auto d = reflection_coefficient(q0, uniform_z_grid(8.0, 201), o);
    EXPECT_LT(d.sup_norm_r, 1.0);
    EXPECT_LT(std::abs(d.r.front()), 1e-3);
    EXPECT_LT(std::abs(d.r.back()), 1e-3);
    EXPECT_LT(d.max_unimodularity_defect, 1e-8);
}

TEST(Scattering, BornLinearity) {
    const auto zs = uniform_z_grid(8.0, 201);
    ReflectionOptions o;
    o.threads = 2;
    const auto a = reflection_coefficient(InitialDatum(wide, sech(5e-4)), zs, o);
    const auto b = reflection_coefficient(InitialDatum(wide, sech(1e-3)), zs, o);
    for (std::size_t i = 0; i < zs.size(); i += 10) {
        if (std::abs(b.r[i]) < 1e-12) continue;
        EXPECT_NEAR(std::abs(b.r[i]) / std::abs(a.r[i]), 2.0, 2e-3) << zs[i];
        // linear in eps up to relative 10 eps^2
        EXPECT_LT(std::abs(b.r[i] - 2.0 * a.r[i]) / std::abs(b.r[i]), 10.0 * 1e-6) << zs[i];
    }
}

TEST(Scattering, Symmetries) {
    const InitialDatum q0(wide, sech(1.0));
    ReflectionOptions o;
    o.threads = 2;
    const auto d = reflection_coefficient(q0, uniform_z_grid(8.0, 1601), o);
    const auto s = check_symmetries(d, q0, 2);
    EXPECT_LT(s.max_s22_deviation, 1e-8);
    EXPECT_LT(s.max_s12_deviation, 1e-8);
    ASSERT_GE(s.max_parity_deviation, 0.0);
    EXPECT_LT(s.max_parity_deviation, 1e-8);
}

TEST(Scattering, ParityNotClaimedForOddPhase) {
    const InitialDatum q0(wide, sech(0.3, 0.5));
    const auto d = reflection_coefficient(q0, uniform_z_grid(8.0, 801));
    EXPECT_LT(check_symmetries(d, q0).max_parity_deviation, 0.0);
}

TEST(Scattering, FourthOrderGridConvergence) {
    const InitialDatum fine(Grid(8192, 64.0), sech(0.3)), coarse(Grid(4096, 64.0), sech(0.3));
    for (double z : {-2.0, 0.0, 0.7, 3.0}) {
        const auto a = jost_scattering(fine, z), b = jost_scattering(coarse, z);
        EXPECT_LT(std::abs(a.s11 - b.s11), 1e-8) << z;
        EXPECT_LT(std::abs(a.s21 - b.s21), 1e-8) << z;
    }
}

TEST(Scattering, GridRequirements) {
    const InitialDatum q0(wide, sech(0.3));
    EXPECT_THROW(reflection_coefficient(q0, uniform_z_grid(4.0, 201)), InputError);
    EXPECT_THROW(reflection_coefficient(q0, uniform_z_grid(8.0, 11)), InputError);
    std::vector<double> bad = uniform_z_grid(8.0, 401);
    std::swap(bad[3], bad[4]);
    EXPECT_THROW(reflection_coefficient(q0, bad), InputError);
}

TEST(Scattering, CoarseStepTripsDeterminantGuard) {
    const InitialDatum q0(Grid(64, 64.0), sech(1.0));
    EXPECT_THROW(jost_matrix(q0, 6.0), NumericalGuardError);
}

TEST(Scattering, CsvRoundTrip) {
    const auto& d = sech_data();
    std::ostringstream os;
    d.write_csv(os, true);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
              "z,Re s11,Im s11,Re s21,Im s21,Re r,Im r,|s11|^2-|s21|^2-1");
    std::istringstream is(os.str());
    const auto e = ScatteringData::read_csv(is);
    ASSERT_EQ(e.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_EQ(e.z[i], d.z[i]);
        EXPECT_EQ(e.r[i], d.r[i]);
    }
}
