#include <gtest/gtest.h>

#include "common.hpp"

using namespace nhnse;

namespace {

std::string key_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<accepted>";
}

}  // namespace

TEST(Config, MinimalDocumentTakesDefaults) {
    const auto c = parse_config_text(R"({"schema_version": 1})");
    EXPECT_EQ(c.datum.kind, ProfileKind::sech);
    EXPECT_EQ(c.datum.amplitude, 0.3);
    EXPECT_EQ(c.evolution.n, 32768u);
    EXPECT_EQ(c.convention, Convention::a);
    ASSERT_EQ(c.rays.size(), 1u);
    EXPECT_EQ(c.rays[0].times().size(), 281u);
}

TEST(Config, SchemaVersionIsRequired) {
    EXPECT_EQ(key_of("{}"), "schema_version");
    EXPECT_EQ(key_of(R"({"schema_version": 2})"), "schema_version");
}

TEST(Config, UnknownKeysAreRejectedByName) {
    EXPECT_EQ(key_of(R"({"schema_version": 1, "bogus": 3})"), "bogus");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "datum": {"amplitud": 0.3}})"), "datum.amplitud");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "rays": [{"xi": 1.2}, {"zeta": 1}]})"), "rays[1].zeta");
    try {
        parse_config_text(R"({"schema_version": 1, "evolution": {"stepsize": 1}})");
        FAIL() << "accepted an unknown key";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("evolution.stepsize"), std::string::npos);
    }
}

TEST(Config, TypeAndRangeErrorsNameTheKey) {
    EXPECT_EQ(key_of(R"({"schema_version": 1, "datum": {"amplitude": "big"}})"), "datum.amplitude");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "datum": {"kind": "lorentz"}})"), "datum.kind");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "datum": {"width": -1}})"), "datum.width");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "evolution": {"n": 1000}})"), "evolution.n");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "evolution": {"dt": 0.01, "t_final": 1.005}})"), "evolution.t_final");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "evolution": {"kind": "kp"}})"), "evolution.kind");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "evolution": {"snapshots": [1.0, 200.0]}})"), "evolution.snapshots[1]");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "scattering": {"z_max": 4}})"), "scattering.z_max");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "convention": "c"})"), "convention");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "harness": {"sampling": "linear"}})"), "harness.sampling");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "rays": [{"t_start": 20.005}]})"), "rays[0].t_step");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "seed": 1.5})"), "seed");
    EXPECT_EQ(key_of(R"({"schema_version": 1, "signmap": {"re_min": 3}})"), "signmap.re_max");
}

TEST(Config, DatumMustDecayOnTheGrids) {
    EXPECT_EQ(key_of(R"({"schema_version": 1, "datum": {"width": 5}})"), "datum");
}

TEST(Config, MalformedJson) {
    EXPECT_EQ(key_of("{\"schema_version\": 1,"), "<document>");
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, RoundTripIsStable) {
    const auto c = parse_config_text(R"({"schema_version": 1, "datum": {"amplitude": 0.25, "phase": 0.4},
        "rays": [{"xi": 1.5, "t_start": 30, "t_end": 60, "t_step": 1}], "convention": "b"})");
    const auto again = parse_config(to_json(c));
    EXPECT_EQ(to_json(again), to_json(c));
    EXPECT_EQ(config_hash(again), config_hash(c));
    EXPECT_EQ(again.convention, Convention::b);
    EXPECT_EQ(again.rays[0].xi, 1.5);
}

TEST(Config, HashIgnoresOutputDirOnly) {
    auto c = parse_config_text(R"({"schema_version": 1})");
    const std::string h = config_hash(c);
    EXPECT_EQ(h.size(), 16u);
    c.output_dir = "elsewhere";
    EXPECT_EQ(config_hash(c), h);
    c.datum.amplitude = 0.31;
    EXPECT_NE(config_hash(c), h);
}

TEST(Config, ScatteringKeyDependsOnDatumAndGridOnly) {
    auto c = parse_config_text(R"({"schema_version": 1})");
    const std::string k = scattering_key(c);
    c.evolution.t_final = 60.0;
    c.rays[0].xi = 1.4;
    EXPECT_EQ(scattering_key(c), k);
    c.scattering.z_nodes = 801;
    EXPECT_NE(scattering_key(c), k);
}

TEST(Config, Fnv1aReferenceValues) {
    EXPECT_EQ(fnv1a64(""), 14695981039346656037ull);
    EXPECT_EQ(hex16(fnv1a64("a")), "af63dc4c8601ec8c");
    EXPECT_EQ(hex16(fnv1a64("foobar")), "85944171f73967e8");
}

TEST(Config, DerivedObjects) {
    const auto c = parse_config_text(R"({"schema_version": 1, "evolution": {"n": 1024, "length": 200, "dt": 0.02,
        "t_final": 2}})");
    const auto g = evolution_grid(c);
    EXPECT_EQ(g.n, 1024u);
    EXPECT_EQ(g.origin, -100.0);
    const auto e = evolution_config(c);
    EXPECT_EQ(e.total_steps(), 100u);
    EXPECT_EQ(scattering_z_grid(c).size(), c.scattering.z_nodes);
    EXPECT_EQ(asymptotic_options(c).t_min, 10.0);
}

TEST(Config, ReductionNames) {
    for (auto k : {Reduction::nhnse, Reduction::kdv, Reduction::mkdv, Reduction::nls})
        EXPECT_EQ(reduction_from(to_string(k)), k);
    EXPECT_THROW(reduction_from("kp"), InputError);
}
