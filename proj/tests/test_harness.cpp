#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "common.hpp"

using namespace nhnse;
namespace fs = std::filesystem;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nhnse-harness-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small grids: the run takes a couple of seconds. The short domain lets fast,
// weak radiation wrap around, so the edge guard is set to 1e-4.
RunConfig small_config(double amplitude) {
    std::ostringstream os;
    os << R"({"schema_version": 1, "datum": {"amplitude": )" << amplitude << R"(},
        "scattering": {"n": 4096, "length": 64, "z_nodes": 801},
        "evolution": {"n": 8192, "length": 1600, "origin": -150, "dt": 0.02, "t_final": 40,
                      "edge_tol": 1e-4},
        "rays": [{"xi": 1.2, "t_start": 20, "t_end": 40, "t_step": 0.5}],
        "signmap": {"nx": 21, "ny": 17}})";
    return parse_config_text(os.str());
}

const Experiment& small_run() {
    static const Experiment ex = run_experiment(small_config(0.3));
    return ex;
}

}  // namespace

TEST(Fit, ExactPowerLaw) {
    const auto t = linspace(20.0, 160.0, 50);
    std::vector<double> v;
    for (double x : t) v.push_back(2.5 / std::sqrt(x));
    const auto f = fit_decay(t, v);
    EXPECT_NEAR(f.slope, -0.5, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 2.5, 1e-10);
    EXPECT_LT(f.ci, 1e-10);
    EXPECT_EQ(f.points, 50u);
}

TEST(Fit, OscillatingPowerLaw) {
    const auto t = linspace(20.0, 160.0, 281);
    std::vector<double> v;
    for (double x : t) v.push_back(3.0 * std::pow(x, -0.75) * (1.0 + 0.05 * std::sin(x)));
    const auto f = fit_decay(t, v);
    EXPECT_NEAR(f.slope, -0.75, 0.02);
    EXPECT_GT(f.ci, 0.0);
    EXPECT_LT(std::abs(f.slope + 0.75), f.ci * 3.0);
}

TEST(Fit, ConstantHasZeroSlope) {
    const auto t = linspace(1.0, 10.0, 10);
    const auto f = fit_decay(t, std::vector<double>(10, 4.0));
    EXPECT_NEAR(f.slope, 0.0, 1e-14);
}

TEST(Fit, ConfidenceIntervalMatchesStudentQuantile) {
    // residuals +-e alternating on 6 points: se and the t(4) quantile 2.776445 are known
    const std::vector<double> t{1, 2, 3, 4, 5, 6};
    std::vector<double> v;
    for (std::size_t i = 0; i < t.size(); ++i) v.push_back(std::exp(0.01 * (i % 2 ? 1.0 : -1.0)) / t[i]);
    const auto f = fit_decay(t, v);
    const auto g = fit_decay(t, v, 0.99);
    EXPECT_GT(g.ci, f.ci);
    EXPECT_NEAR(g.ci / f.ci, 4.604095 / 2.776445, 1e-5);
}

TEST(Fit, Errors) {
    EXPECT_THROW(fit_decay({1, 2, 3}, {1, 2, 3}), InputError);
    EXPECT_THROW(fit_decay({1, 2, 3, 4, 5}, {1, 2, 0, 4, 5}), InputError);
    EXPECT_THROW(fit_decay({1, 1, 1, 1, 1}, {1, 2, 3, 4, 5}), InputError);
    EXPECT_THROW(fit_decay({1, 2, 3, 4, 5}, {1, 2, 3, 4}), InputError);
    EXPECT_THROW(fit_decay({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, 1.0), InputError);
    EXPECT_FALSE(try_fit({1, 2}, {1, 2}).available);
    EXPECT_FALSE(try_fit({1, 2}, {1, 2}).note.empty());
}

TEST(Envelope, SlidingMaximum) {
    const auto t = linspace(0.0, 9.0, 10);
    const std::vector<double> v{1, 5, 2, 2, 7, 1, 1, 1, 3, 1};
    const auto e = sliding_max_envelope(t, v, 3.0);
    EXPECT_EQ(e.t, (std::vector<double>{1, 4, 5, 8}));
    EXPECT_EQ(e.v, (std::vector<double>{5, 7, 1, 3}));
    EXPECT_TRUE(sliding_max_envelope({}, {}, 1.0).t.empty());
    EXPECT_THROW(sliding_max_envelope(t, v, 0.0), InputError);
}

TEST(Envelope, RecoversDecayOfOscillatingSignal) {
    const auto t = linspace(20.0, 160.0, 561);
    std::vector<double> v;
    for (double x : t) v.push_back(std::pow(x, -0.75) * std::abs(std::cos(0.8 * x)));
    const auto e = sliding_max_envelope(t, v, 10.0);
    EXPECT_NEAR(fit_decay(e.t, e.v).slope, -0.75, 0.03);
}

TEST(FitRay, PassRule) {
    RayReport r;
    for (double t : linspace(20.0, 160.0, 141)) {
        RayRow row;
        row.t = t;
        row.q_num = std::polar(0.5 / std::sqrt(t), 0.3 * t);
        row.q_asym_a = row.q_num + std::polar(std::pow(t, -1.0), t);
        row.q_asym_b = row.q_num + 0.2 * std::polar(std::pow(t, -0.5), t);
        r.rows.push_back(row);
    }
    HarnessParams h;
    fit_ray(r, h);
    ASSERT_TRUE(r.q_fit.available);
    EXPECT_NEAR(r.q_fit.fit.slope, -0.5, 1e-12);
    EXPECT_TRUE(r.passes[0]);
    EXPECT_FALSE(r.passes[1]);
    h.q_slope_target = -0.2;
    fit_ray(r, h);
    EXPECT_FALSE(r.passes[0]);
}

TEST(CompareAlongRay, RowsCarryBothConventions) {
    const RayAsymptotics asym(nhnse::testing::sech_data(), 1.2);
    const RayExperiment e{1.2, {20.0, 30.0}, Convention::a};
    const std::vector<RaySample> s{{20.0, 24.0, cplx(0.01)}, {30.0, 36.0, cplx(0.02)}};
    const auto rows = compare_along_ray(e, s, asym);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].q_asym_a, asym.value(30.0, Convention::a).q);
    EXPECT_EQ(rows[1].q_asym_b, asym.value(30.0, Convention::b).q);
    EXPECT_DOUBLE_EQ(rows[0].error(Convention::a), std::abs(0.01 - rows[0].q_asym_a));
    EXPECT_THROW(compare_along_ray(e, {s[0]}, asym), InputError);
    EXPECT_THROW(compare_along_ray(e, {s[0], {31.0, 36.0, 0.0}}, asym), InputError);
}

TEST(Pipeline, ExperimentOnSmallGrids) {
    const auto& ex = small_run();
    ASSERT_EQ(ex.rays.size(), 1u);
    const auto& r = ex.rays[0];
    EXPECT_EQ(r.rows.size(), 41u);
    EXPECT_TRUE(ex.evolution.ran);
    EXPECT_EQ(ex.evolution.steps, 2000u);
    EXPECT_LT(ex.evolution.max_mass_drift, 1e-8);
    // leading-order agreement is already visible on this short window
    for (const auto& row : r.rows) {
        EXPECT_LT(row.error(Convention::a), 0.25 * std::abs(row.q_num)) << "t=" << row.t;
        EXPECT_DOUBLE_EQ(row.x, 1.2 * row.t);
    }
    ASSERT_TRUE(r.q_fit.available);
    EXPECT_NEAR(r.q_fit.fit.slope, -0.5, 0.15);
}

TEST(Pipeline, ReportFilesAndSchema) {
    const fs::path dir = scratch("report");
    const auto files = emit_report(small_run(), dir, "tag");
    EXPECT_EQ(files.csv.size(), 3u);
    EXPECT_EQ(files.svg.size(), 4u);
    EXPECT_EQ(files.report.filename(), "report-tag.json");
    for (const auto& p : files.csv) EXPECT_TRUE(fs::exists(p)) << p;
    for (const auto& p : files.svg) EXPECT_EQ(slurp(p).rfind("<svg", 0), 0u) << p;
    const json j = json::parse(slurp(files.report));
    EXPECT_EQ(j["schema"], "nhnse-report/1");
    EXPECT_EQ(j["config_hash"], small_run().hash);
    EXPECT_EQ(j["rays"].size(), 1u);
    EXPECT_EQ(j["rays"][0]["rows"].size(), 41u);
    for (const char* k : {"abs_q_num", "error_envelope_a", "error_envelope_b"})
        EXPECT_TRUE(j["rays"][0]["fits"].contains(k)) << k;
    EXPECT_TRUE(j["passing_conventions"].is_array());
    std::ifstream rays(dir / "rays-tag.csv");
    std::string head;
    std::getline(rays, head);
    EXPECT_EQ(head, "xi,t,x,Re q_num,Im q_num,Re q_asym_a,Im q_asym_a,Re q_asym_b,Im q_asym_b,error_a,error_b");
    fs::remove_all(dir);
}

TEST(Pipeline, ReportIsDeterministicApartFromTimestamp) {
    const auto again = run_experiment(small_config(0.3));
    json a = report_json(small_run(), "x"), b = report_json(again, "x");
    EXPECT_EQ(a.dump(), b.dump());
    const fs::path d1 = scratch("det1"), d2 = scratch("det2");
    const auto f1 = emit_report(small_run(), d1), f2 = emit_report(again, d2);
    for (std::size_t i = 0; i < f1.csv.size(); ++i) EXPECT_EQ(slurp(f1.csv[i]), slurp(f2.csv[i]));
    for (std::size_t i = 0; i < f1.svg.size(); ++i) EXPECT_EQ(slurp(f1.svg[i]), slurp(f2.svg[i]));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(Pipeline, ZeroDatumGivesValidEmptyFits) {
    const auto ex = run_experiment(small_config(0.0));
    ASSERT_EQ(ex.rays.size(), 1u);
    for (const auto& row : ex.rays[0].rows) {
        EXPECT_EQ(row.q_num, cplx{});
        EXPECT_EQ(row.q_asym_a, cplx{});
    }
    EXPECT_FALSE(ex.rays[0].q_fit.available);
    EXPECT_FALSE(ex.rays[0].passes[0]);
    const json j = report_json(ex, "t");
    EXPECT_FALSE(j["rays"][0]["fits"]["abs_q_num"]["available"].get<bool>());
    EXPECT_TRUE(j["passing_conventions"].empty());
    EXPECT_NO_THROW(j.dump());
}

TEST(Pipeline, NoRaysStillReports) {
    auto c = small_config(0.3);
    c.rays.clear();
    c.scattering.z_nodes = 401;
    c.scattering.z_max = 8.0;
    const auto ex = run_experiment(c);
    EXPECT_FALSE(ex.evolution.ran);
    const fs::path dir = scratch("empty");
    const auto files = emit_report(ex, dir);
    EXPECT_EQ(files.report.filename(), "report.json");
    EXPECT_TRUE(json::parse(slurp(files.report))["rays"].empty());
    fs::remove_all(dir);
}

TEST(Pipeline, RequestsOutsideTheComputedRange) {
    auto c = small_config(0.3);
    c.rays[0].t_end = 60.0;
    EXPECT_THROW(run_experiment(c), ValidityError);
    c = small_config(0.3);
    c.rays[0].t_start = 20.01;
    c.rays[0].t_end = 30.01;
    EXPECT_THROW(run_experiment(c), ConfigError);
    c = small_config(0.3);
    c.rays[0].xi = 40.0;  // leaves the window
    EXPECT_THROW(run_experiment(c), ValidityError);
    c = small_config(0.3);
    c.rays[0].xi = 0.5;
    EXPECT_THROW(run_experiment(c), ValidityError);
}

TEST(Pipeline, ScatteringCacheIsWriteOnce) {
    const fs::path dir = scratch("cache");
    auto c = small_config(0.3);
    c.scattering.z_nodes = 401;
    PipelineOptions o;
    o.cache_dir = dir.string();
    std::vector<std::string> log;
    o.log = [&](const std::string& s) { log.push_back(s); };
    const auto first = scattering_for(c, o);
    const fs::path entry = dir / ("scattering-" + scattering_key(c) + ".csv");
    ASSERT_TRUE(fs::exists(entry));
    const auto stamp = fs::last_write_time(entry);
    const std::string content = slurp(entry);
    const auto second = scattering_for(c, o);
    EXPECT_EQ(slurp(entry), content);
    EXPECT_EQ(fs::last_write_time(entry), stamp);
    EXPECT_EQ(first.r, second.r);
    EXPECT_EQ(first.s11, second.s11);
    EXPECT_NE(log.back().find("cache hit"), std::string::npos);
    fs::remove_all(dir);
}
