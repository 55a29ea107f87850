#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "nhnse/akns.hpp"
#include "nhnse/asymptotics.hpp"
#include "nhnse/datum.hpp"
#include "nhnse/errors.hpp"
#include "nhnse/pde.hpp"
#include "nhnse/phase.hpp"
#include "nhnse/scattering.hpp"

namespace nhnse {

using json = nlohmann::json;

inline constexpr int config_schema_version = 1;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex16(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct ScatterParams {
    std::size_t n = 8192;
    double length = 64.0;
    double z_max = 8.0;
    std::size_t z_nodes = 1601;
};

struct EvolveParams {
    std::size_t n = 32768;
    double length = 8192.0;
    double origin = -512.0;
    double dt = 0.01;
    double t_final = 160.0;
    Reduction kind = Reduction::nhnse;
    double dealias = 2.0 / 3.0;
    double mass_tol = 1e-8;
    double edge_tol = 1e-6;
    double tail_tol = 1e-6;
    std::vector<double> snapshots;  // written by the evolve subcommand; empty -> t_final only
};

struct AsymParams {
    double t_min = 10.0;
    double ray_margin = 0.05;
    LambdaPath lambda_path = LambdaPath::regularized;
};

struct RaySpec {
    double xi = 1.2;
    double t_start = 20.0;
    double t_end = 160.0;
    double t_step = 0.5;

    std::vector<double> times() const {
        std::vector<double> t;
        const auto n = static_cast<std::size_t>(std::llround((t_end - t_start) / t_step));
        for (std::size_t i = 0; i <= n; ++i) t.push_back(t_start + static_cast<double>(i) * t_step);
        return t;
    }
};

enum class Sampling { spectral, cubic };

struct HarnessParams {
    double envelope_window = 10.0;
    Sampling sampling = Sampling::spectral;
    double q_slope_target = -0.5;
    double q_slope_tol = 0.05;
    double error_slope_bound = -0.65;
};

struct SignmapParams {
    double xi = 1.0;
    Window window{-1.5, 2.0, -1.5, 1.5};
    std::size_t nx = 141, ny = 121;
};

struct RunConfig {
    int schema_version = config_schema_version;
    ProfileSpec datum{ProfileKind::sech, 0.3, 1.0, 0.0, 0.0};
    ScatterParams scattering;
    EvolveParams evolution;
    AsymParams asymptotics;
    std::vector<RaySpec> rays{RaySpec{}};
    HarnessParams harness;
    SignmapParams signmap;
    std::string output_dir = "out";
    Convention convention = Convention::a;
    std::uint64_t seed = 1;
};

namespace detail {

// Reads an object, records which keys were consumed and rejects the rest.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    bool has(const std::string& k) const { return j_.contains(k); }

    double number(const std::string& k, double def) {
        if (!take(k)) return def;
        const auto& v = j_.at(k);
        if (!v.is_number()) throw ConfigError(key(k), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(key(k), "must be finite");
        return d;
    }

    std::size_t count(const std::string& k, std::size_t def) {
        if (!take(k)) return def;
        const auto& v = j_.at(k);
        if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(key(k), "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    std::string string(const std::string& k, const std::string& def) {
        if (!take(k)) return def;
        const auto& v = j_.at(k);
        if (!v.is_string()) throw ConfigError(key(k), "expected a string");
        return v.get<std::string>();
    }

    const json* sub(const std::string& k) {
        if (!take(k)) return nullptr;
        return &j_.at(k);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
    }

private:
    bool take(const std::string& k) {
        if (!j_.contains(k)) return false;
        seen_.insert(k);
        return true;
    }
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename F>
void guard(const std::string& key, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key, e.what());
    }
}

inline void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

inline bool is_pow2(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

inline bool multiple_of(double t, double dt) {
    const double s = t / dt;
    return std::abs(s - std::round(s)) < 1e-6;
}

}  // namespace detail

inline Reduction reduction_from(const std::string& s) {
    if (s == "nhnse") return Reduction::nhnse;
    if (s == "kdv") return Reduction::kdv;
    if (s == "mkdv") return Reduction::mkdv;
    if (s == "nls") return Reduction::nls;
    throw InputError("unknown equation kind '" + s + "'");
}

/// Parses and validates a configuration document. Missing keys take their
/// defaults; unknown keys and type errors raise ConfigError naming the key.
inline RunConfig parse_config(const json& j) {
    using detail::guard;
    using detail::require;
    RunConfig c;
    detail::ObjectReader root(j, "");
    require(root.has("schema_version"), "schema_version", "missing");
    {
        const double v = root.number("schema_version", 0);
        require(v == config_schema_version, "schema_version",
                "unsupported version (expected " + std::to_string(config_schema_version) + ")");
    }
    if (const json* d = root.sub("datum")) {
        detail::ObjectReader r(*d, "datum");
        guard("datum.kind", [&] { c.datum.kind = profile_kind_from(r.string("kind", "sech")); });
        require(c.datum.kind != ProfileKind::custom, "datum.kind", "custom profiles cannot be given in a config");
        c.datum.amplitude = r.number("amplitude", c.datum.amplitude);
        c.datum.width = r.number("width", c.datum.width);
        c.datum.center = r.number("center", c.datum.center);
        c.datum.phase = r.number("phase", c.datum.phase);
        r.finish();
        require(c.datum.width > 0.0, "datum.width", "must be positive");
    }
    if (const json* s = root.sub("scattering")) {
        detail::ObjectReader r(*s, "scattering");
        auto& p = c.scattering;
        p.n = r.count("n", p.n);
        p.length = r.number("length", p.length);
        p.z_max = r.number("z_max", p.z_max);
        p.z_nodes = r.count("z_nodes", p.z_nodes);
        r.finish();
        require(detail::is_pow2(p.n), "scattering.n", "must be a power of two >= 8");
        require(p.length > 0.0, "scattering.length", "must be positive");
        require(p.z_max >= 8.0, "scattering.z_max", "must be at least 8");
        require(p.z_nodes >= 4, "scattering.z_nodes", "must be at least 4");
    }
    if (const json* e = root.sub("evolution")) {
        detail::ObjectReader r(*e, "evolution");
        auto& p = c.evolution;
        p.n = r.count("n", p.n);
        p.length = r.number("length", p.length);
        p.origin = r.has("origin") ? r.number("origin", 0.0) : -0.5 * p.length;
        p.dt = r.number("dt", p.dt);
        p.t_final = r.number("t_final", p.t_final);
        guard("evolution.kind", [&] { p.kind = reduction_from(r.string("kind", "nhnse")); });
        p.dealias = r.number("dealias", p.dealias);
        p.mass_tol = r.number("mass_tol", p.mass_tol);
        p.edge_tol = r.number("edge_tol", p.edge_tol);
        p.tail_tol = r.number("tail_tol", p.tail_tol);
        if (const json* sn = r.sub("snapshots")) {
            require(sn->is_array(), "evolution.snapshots", "expected an array of times");
            p.snapshots.clear();
            for (std::size_t i = 0; i < sn->size(); ++i) {
                const auto& v = (*sn)[i];
                const std::string k = "evolution.snapshots[" + std::to_string(i) + "]";
                require(v.is_number(), k, "expected a number");
                p.snapshots.push_back(v.get<double>());
            }
        }
        r.finish();
        require(detail::is_pow2(p.n), "evolution.n", "must be a power of two >= 8");
        require(p.length > 0.0, "evolution.length", "must be positive");
        require(p.dt > 0.0, "evolution.dt", "must be positive");
        require(p.t_final >= 0.0, "evolution.t_final", "must be non-negative");
        require(detail::multiple_of(p.t_final, p.dt), "evolution.t_final", "must be a multiple of dt");
        require(p.dealias >= 0.5 - 1e-12 && p.dealias <= 2.0 / 3.0 + 1e-12, "evolution.dealias",
                "must lie in [1/2, 2/3]");
        require(p.mass_tol > 0.0, "evolution.mass_tol", "must be positive");
        for (std::size_t i = 0; i < p.snapshots.size(); ++i) {
            const std::string k = "evolution.snapshots[" + std::to_string(i) + "]";
            require(p.snapshots[i] >= 0.0 && p.snapshots[i] <= p.t_final + 1e-9, k, "must lie in [0, t_final]");
            require(detail::multiple_of(p.snapshots[i], p.dt), k, "must be a multiple of dt");
        }
    }
    if (const json* a = root.sub("asymptotics")) {
        detail::ObjectReader r(*a, "asymptotics");
        auto& p = c.asymptotics;
        p.t_min = r.number("t_min", p.t_min);
        p.ray_margin = r.number("ray_margin", p.ray_margin);
        const std::string path = r.string("lambda_path", "regularized");
        require(path == "regularized" || path == "raw_delta", "asymptotics.lambda_path",
                "must be 'regularized' or 'raw_delta'");
        p.lambda_path = path == "regularized" ? LambdaPath::regularized : LambdaPath::raw_delta;
        r.finish();
        require(p.t_min > 0.0, "asymptotics.t_min", "must be positive");
        require(p.ray_margin >= 0.0, "asymptotics.ray_margin", "must be non-negative");
    }
    if (const json* rs = root.sub("rays")) {
        require(rs->is_array(), "rays", "expected an array");
        c.rays.clear();
        for (std::size_t i = 0; i < rs->size(); ++i) {
            const std::string base = "rays[" + std::to_string(i) + "]";
            detail::ObjectReader r((*rs)[i], base);
            RaySpec s;
            s.xi = r.number("xi", s.xi);
            s.t_start = r.number("t_start", s.t_start);
            s.t_end = r.number("t_end", s.t_end);
            s.t_step = r.number("t_step", s.t_step);
            r.finish();
            require(s.t_start > 0.0, base + ".t_start", "must be positive");
            require(s.t_end >= s.t_start, base + ".t_end", "must be >= t_start");
            require(s.t_step > 0.0, base + ".t_step", "must be positive");
            require(detail::multiple_of(s.t_end - s.t_start, s.t_step), base + ".t_step",
                    "must divide t_end - t_start");
            require(detail::multiple_of(s.t_start, c.evolution.dt) && detail::multiple_of(s.t_step, c.evolution.dt),
                    base + ".t_step", "ray times must be multiples of evolution.dt");
            c.rays.push_back(s);
        }
    }
    if (const json* h = root.sub("harness")) {
        detail::ObjectReader r(*h, "harness");
        auto& p = c.harness;
        p.envelope_window = r.number("envelope_window", p.envelope_window);
        const std::string s = r.string("sampling", "spectral");
        require(s == "spectral" || s == "cubic", "harness.sampling", "must be 'spectral' or 'cubic'");
        p.sampling = s == "spectral" ? Sampling::spectral : Sampling::cubic;
        p.q_slope_target = r.number("q_slope_target", p.q_slope_target);
        p.q_slope_tol = r.number("q_slope_tol", p.q_slope_tol);
        p.error_slope_bound = r.number("error_slope_bound", p.error_slope_bound);
        r.finish();
        require(p.envelope_window > 0.0, "harness.envelope_window", "must be positive");
        require(p.q_slope_tol > 0.0, "harness.q_slope_tol", "must be positive");
    }
    if (const json* s = root.sub("signmap")) {
        detail::ObjectReader r(*s, "signmap");
        auto& p = c.signmap;
        p.xi = r.number("xi", p.xi);
        p.window.re_min = r.number("re_min", p.window.re_min);
        p.window.re_max = r.number("re_max", p.window.re_max);
        p.window.im_min = r.number("im_min", p.window.im_min);
        p.window.im_max = r.number("im_max", p.window.im_max);
        p.nx = r.count("nx", p.nx);
        p.ny = r.count("ny", p.ny);
        r.finish();
        require(p.window.re_max > p.window.re_min, "signmap.re_max", "must exceed re_min");
        require(p.window.im_max > p.window.im_min, "signmap.im_max", "must exceed im_min");
        require(p.nx >= 2, "signmap.nx", "must be at least 2");
        require(p.ny >= 2, "signmap.ny", "must be at least 2");
    }
    c.output_dir = root.string("output_dir", c.output_dir);
    guard("convention", [&] { c.convention = convention_from(root.string("convention", "a")); });
    {
        const double s = root.number("seed", 1);
        require(s >= 0 && s == std::floor(s), "seed", "must be a non-negative integer");
        c.seed = static_cast<std::uint64_t>(s);
    }
    root.finish();
    // the profile must decay on both grids
    guard("datum", [&] {
        InitialDatum(Grid(c.scattering.n, c.scattering.length), c.datum);
        InitialDatum(Grid(c.evolution.n, c.evolution.length, c.evolution.origin), c.datum);
    });
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline json datum_json(const ProfileSpec& d) {
    return {{"kind", to_string(d.kind)},
            {"amplitude", d.amplitude},
            {"width", d.width},
            {"center", d.center},
            {"phase", d.phase}};
}

inline json scattering_json(const ScatterParams& p) {
    return {{"n", p.n}, {"length", p.length}, {"z_max", p.z_max}, {"z_nodes", p.z_nodes}};
}

/// Fully expanded configuration (every key present).
inline json to_json(const RunConfig& c) {
    json rays = json::array();
    for (const auto& r : c.rays)
        rays.push_back({{"xi", r.xi}, {"t_start", r.t_start}, {"t_end", r.t_end}, {"t_step", r.t_step}});
    const auto& e = c.evolution;
    return {{"schema_version", c.schema_version},
            {"datum", datum_json(c.datum)},
            {"scattering", scattering_json(c.scattering)},
            {"evolution",
             {{"n", e.n},
              {"length", e.length},
              {"origin", e.origin},
              {"dt", e.dt},
              {"t_final", e.t_final},
              {"kind", to_string(e.kind)},
              {"dealias", e.dealias},
              {"mass_tol", e.mass_tol},
              {"edge_tol", e.edge_tol},
              {"tail_tol", e.tail_tol},
              {"snapshots", e.snapshots}}},
            {"asymptotics",
             {{"t_min", c.asymptotics.t_min},
              {"ray_margin", c.asymptotics.ray_margin},
              {"lambda_path", c.asymptotics.lambda_path == LambdaPath::regularized ? "regularized" : "raw_delta"}}},
            {"rays", rays},
            {"harness",
             {{"envelope_window", c.harness.envelope_window},
              {"sampling", c.harness.sampling == Sampling::spectral ? "spectral" : "cubic"},
              {"q_slope_target", c.harness.q_slope_target},
              {"q_slope_tol", c.harness.q_slope_tol},
              {"error_slope_bound", c.harness.error_slope_bound}}},
            {"signmap",
             {{"xi", c.signmap.xi},
              {"re_min", c.signmap.window.re_min},
              {"re_max", c.signmap.window.re_max},
              {"im_min", c.signmap.window.im_min},
              {"im_max", c.signmap.window.im_max},
              {"nx", c.signmap.nx},
              {"ny", c.signmap.ny}}},
            {"output_dir", c.output_dir},
            {"convention", to_string(c.convention)},
            {"seed", c.seed}};
}

/// Hash of everything that affects numerical output (output_dir excluded).
inline std::string config_hash(const RunConfig& c) {
    json j = to_json(c);
    j.erase("output_dir");
    return hex16(fnv1a64(j.dump()));
}

/// Key of the scattering cache entry: depends only on the datum and the
/// scattering discretization.
inline std::string scattering_key(const RunConfig& c) {
    const json j = {{"datum", datum_json(c.datum)}, {"scattering", scattering_json(c.scattering)}};
    return hex16(fnv1a64(j.dump()));
}

inline Grid scattering_grid(const RunConfig& c) {
    return Grid(c.scattering.n, c.scattering.length);
}

inline Grid evolution_grid(const RunConfig& c) {
    return Grid(c.evolution.n, c.evolution.length, c.evolution.origin);
}

inline std::vector<double> scattering_z_grid(const RunConfig& c) {
    return uniform_z_grid(c.scattering.z_max, c.scattering.z_nodes);
}

inline EvolutionConfig evolution_config(const RunConfig& c) {
    EvolutionConfig e;
    e.grid = evolution_grid(c);
    e.dt = c.evolution.dt;
    e.t_final = c.evolution.t_final;
    e.kind = c.evolution.kind;
    e.dealias = c.evolution.dealias;
    e.mass_tol = c.evolution.mass_tol;
    e.edge_tol = c.evolution.edge_tol;
    e.tail_tol = c.evolution.tail_tol;
    return e;
}

inline AsymptoticOptions asymptotic_options(const RunConfig& c) {
    AsymptoticOptions o;
    o.t_min = c.asymptotics.t_min;
    o.ray_margin = c.asymptotics.ray_margin;
    o.lambda_path = c.asymptotics.lambda_path;
    return o;
}

}  // namespace nhnse
