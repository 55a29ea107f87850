#pragma once

#include <chrono>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nhnse/asymptotics.hpp"
#include "nhnse/config.hpp"
#include "nhnse/fit.hpp"
#include "nhnse/interp.hpp"
#include "nhnse/pde.hpp"
#include "nhnse/phase.hpp"
#include "nhnse/scattering.hpp"
#include "nhnse/svg.hpp"

namespace nhnse {

struct RayExperiment {
    double xi = 1.2;
    std::vector<double> t_list;
    Convention convention = Convention::a;
};

struct RaySample {
    double t = 0.0, x = 0.0;
    cplx q_num;
};

struct RayRow {
    double t = 0.0, x = 0.0;
    cplx q_num, q_asym_a, q_asym_b;

    cplx q_asym(Convention c) const { return c == Convention::a ? q_asym_a : q_asym_b; }
    double error(Convention c) const { return std::abs(q_num - q_asym(c)); }
};

/// Rows (t, q_num, q_asym, |diff|) along one ray for both conventions.
inline std::vector<RayRow> compare_along_ray(const RayExperiment& e, const std::vector<RaySample>& samples,
                                             const RayAsymptotics& asym) {
    if (samples.size() != e.t_list.size()) throw InputError("compare_along_ray: sample count differs from t_list");
    std::vector<RayRow> rows;
    rows.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (std::abs(samples[i].t - e.t_list[i]) > 1e-9) throw InputError("compare_along_ray: sample times differ");
        RayRow r;
        r.t = samples[i].t;
        r.x = samples[i].x;
        r.q_num = samples[i].q_num;
        r.q_asym_a = asym.value(r.t, Convention::a).q;
        r.q_asym_b = asym.value(r.t, Convention::b).q;
        rows.push_back(r);
    }
    return rows;
}

struct FitSummary {
    bool available = false;
    DecayFit fit;
    std::string note;
};

inline FitSummary try_fit(const std::vector<double>& t, const std::vector<double>& v) {
    FitSummary s;
    try {
        s.fit = fit_decay(t, v);
        s.available = true;
    } catch (const InputError& e) {
        s.note = e.what();
    }
    return s;
}

struct RayReport {
    double xi = 0.0;
    PhaseContext ctx;
    double nu1 = 0.0, nu2 = 0.0, lambda1 = 0.0, lambda2 = 0.0;
    std::vector<RayRow> rows;
    FitSummary q_fit;
    std::array<FitSummary, 2> error_fit;  // conventions a, b
    std::array<Envelope, 2> error_envelope;
    std::array<bool, 2> passes{false, false};
};

/// Fits log|q_num| pointwise and the sliding-max envelope of log|q_num - q_asym|
/// for both conventions, and applies the acceptance thresholds.
inline void fit_ray(RayReport& r, const HarnessParams& h) {
    std::vector<double> t, q;
    for (const auto& row : r.rows) {
        t.push_back(row.t);
        q.push_back(std::abs(row.q_num));
    }
    r.q_fit = try_fit(t, q);
    for (Convention c : {Convention::a, Convention::b}) {
        const auto k = static_cast<std::size_t>(c);
        std::vector<double> err;
        for (const auto& row : r.rows) err.push_back(row.error(c));
        r.error_envelope[k] = sliding_max_envelope(t, err, h.envelope_window);
        r.error_fit[k] = try_fit(r.error_envelope[k].t, r.error_envelope[k].v);
        r.passes[k] = r.q_fit.available && r.error_fit[k].available &&
                      std::abs(r.q_fit.fit.slope - h.q_slope_target) <= h.q_slope_tol &&
                      r.error_fit[k].fit.slope <= h.error_slope_bound;
    }
}

struct EvolutionSummary {
    bool ran = false;
    std::size_t steps = 0;
    double max_mass_drift = 0.0;
    double max_edge_amplitude = 0.0;
    double max_spectral_tail = 0.0;
};

struct Experiment {
    RunConfig config;
    std::string hash;
    ScatteringData scattering;
    EvolutionSummary evolution;
    std::vector<RayReport> rays;
    SignMap signmap;
};

struct PipelineOptions {
    unsigned threads = 1;
    std::string cache_dir;
    std::function<void(const std::string&)> log;
};

namespace detail {

inline void say(const PipelineOptions& o, const std::string& s) {
    if (o.log) o.log(s);
}

inline void write_once(const std::filesystem::path& dst, const std::string& content) {
    namespace fs = std::filesystem;
    if (fs::exists(dst)) return;
    fs::create_directories(dst.parent_path());
    const fs::path tmp = dst.string() + ".tmp" + std::to_string(std::hash<std::string>{}(content) & 0xffff);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write '" + tmp.string() + "': " + std::strerror(errno));
        out << content;
        if (!out) throw Error("write failed for '" + tmp.string() + "': " + std::strerror(errno));
    }
    std::error_code ec;
    if (fs::exists(dst)) {
        fs::remove(tmp, ec);
        return;
    }
    fs::rename(tmp, dst, ec);
    if (ec) throw Error("cannot move '" + tmp.string() + "' to '" + dst.string() + "': " + ec.message());
}

}  // namespace detail

/// Reflection data for the configured datum. With a cache directory the
/// result is stored under its content key and reused on later runs.
inline ScatteringData scattering_for(const RunConfig& cfg, const PipelineOptions& o = {}) {
    namespace fs = std::filesystem;
    std::optional<fs::path> entry;
    if (!o.cache_dir.empty()) {
        entry = fs::path(o.cache_dir) / ("scattering-" + scattering_key(cfg) + ".csv");
        if (fs::exists(*entry)) {
            std::ifstream in(*entry);
            if (!in) throw Error("cannot read cache entry '" + entry->string() + "'");
            detail::say(o, "scattering: cache hit " + entry->string());
            return ScatteringData::read_csv(in);
        }
    }
    const InitialDatum datum(scattering_grid(cfg), cfg.datum);
    ReflectionOptions ro;
    ro.threads = o.threads;
    detail::say(o, "scattering: " + std::to_string(cfg.scattering.z_nodes) + " nodes");
    ScatteringData d = reflection_coefficient(datum, scattering_z_grid(cfg), ro);
    if (entry) {
        std::ostringstream os;
        d.write_csv(os);
        detail::write_once(*entry, os.str());
        // re-read so that cached and fresh runs see identical (round-tripped) values
        std::istringstream is(os.str());
        d = ScatteringData::read_csv(is);
    }
    return d;
}

/// Scattering, asymptotics along every ray, one shared evolution, and the fits.
inline Experiment run_experiment(const RunConfig& cfg, const PipelineOptions& o = {}) {
    Experiment ex;
    ex.config = cfg;
    ex.hash = config_hash(cfg);
    ex.signmap = sign_map(cfg.signmap.xi, cfg.signmap.window, cfg.signmap.nx, cfg.signmap.ny);

    const Grid eg = evolution_grid(cfg);
    std::vector<RayExperiment> exps;
    for (const auto& r : cfg.rays) {
        RayExperiment e{r.xi, r.times(), cfg.convention};
        if (e.t_list.back() > cfg.evolution.t_final + 1e-9)
            throw ValidityError("ray xi = " + std::to_string(r.xi) + " needs t = " + std::to_string(e.t_list.back()) +
                                " beyond the evolution horizon t_final = " + std::to_string(cfg.evolution.t_final));
        for (double t : e.t_list) {
            const double steps = t / cfg.evolution.dt;
            if (std::abs(steps - std::round(steps)) > 1e-6)
                throw ConfigError("rays", "ray time " + std::to_string(t) + " is not a multiple of evolution.dt");
            const double x = r.xi * t;
            if (x < eg.origin + 0.05 * eg.length || x > eg.origin + 0.95 * eg.length)
                throw ValidityError("ray xi = " + std::to_string(r.xi) + " leaves the trusted window at t = " +
                                    std::to_string(t));
        }
        exps.push_back(std::move(e));
    }

    ex.scattering = scattering_for(cfg, o);

    std::vector<RayAsymptotics> asym;
    for (const auto& e : exps) asym.emplace_back(ex.scattering, e.xi, asymptotic_options(cfg));

    if (exps.empty()) return ex;

    // one evolution, sampled at the union of requested times
    EvolutionConfig ec = evolution_config(cfg);
    std::map<long long, std::vector<std::pair<std::size_t, std::size_t>>> wanted;  // step -> (ray, index)
    for (std::size_t r = 0; r < exps.size(); ++r)
        for (std::size_t i = 0; i < exps[r].t_list.size(); ++i)
            wanted[std::llround(exps[r].t_list[i] / ec.dt)].push_back({r, i});
    for (const auto& [step, _] : wanted) ec.snapshot_times.push_back(static_cast<double>(step) * ec.dt);
    ec.keep_snapshots = false;

    std::vector<std::vector<RaySample>> samples(exps.size());
    for (std::size_t r = 0; r < exps.size(); ++r) samples[r].resize(exps[r].t_list.size());
    const InitialDatum datum(eg, cfg.datum);
    detail::say(o, "evolution: N = " + std::to_string(eg.n) + ", dt = " + std::to_string(ec.dt) +
                       ", T = " + std::to_string(ec.t_final));
    const auto res = evolve(datum, ec, [&](double t, const CField& q, const CField& qh) {
        const auto it = wanted.find(std::llround(t / ec.dt));
        if (it == wanted.end()) return;
        for (const auto& [r, i] : it->second) {
            const double tt = exps[r].t_list[i];
            const double x = exps[r].xi * tt;
            const cplx v = cfg.harness.sampling == Sampling::spectral ? spectral_eval(qh, eg, x)
                                                                      : periodic_cubic(q, eg, x);
            samples[r][i] = {tt, x, v};
        }
    });
    ex.evolution.ran = true;
    ex.evolution.steps = res.steps;
    ex.evolution.max_mass_drift = res.max_mass_drift();
    ex.evolution.max_edge_amplitude = res.max_edge_amplitude();
    for (double v : res.spectral_tail) ex.evolution.max_spectral_tail = std::max(ex.evolution.max_spectral_tail, v);

    for (std::size_t r = 0; r < exps.size(); ++r) {
        RayReport rep;
        rep.xi = exps[r].xi;
        rep.ctx = asym[r].context();
        rep.nu1 = asym[r].profile().nu1;
        rep.nu2 = asym[r].profile().nu2;
        rep.lambda1 = asym[r].lambda(1);
        rep.lambda2 = asym[r].lambda(2);
        rep.rows = compare_along_ray(exps[r], samples[r], asym[r]);
        fit_ray(rep, cfg.harness);
        ex.rays.push_back(std::move(rep));
    }
    return ex;
}

namespace detail {

inline json fit_json(const FitSummary& f) {
    if (!f.available) return {{"available", false}, {"note", f.note}};
    return {{"available", true},
            {"slope", f.fit.slope},
            {"intercept", f.fit.intercept},
            {"ci_halfwidth", f.fit.ci},
            {"confidence", f.fit.confidence},
            {"points", f.fit.points}};
}

inline json cjson(cplx v) { return json::array({v.real(), v.imag()}); }

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "': " + std::strerror(errno));
    out << s;
    out.close();
    if (!out) throw Error("write failed for '" + p.string() + "': " + std::strerror(errno));
}

inline std::string tagged(const std::string& stem, const std::string& tag, const std::string& ext) {
    return tag.empty() ? stem + ext : stem + "-" + tag + ext;
}

}  // namespace detail

/// Machine-readable report. Only "timestamp" varies between identical runs.
inline json report_json(const Experiment& ex, const std::string& timestamp) {
    json rays = json::array();
    json passing = json::array();
    bool any[2] = {!ex.rays.empty(), !ex.rays.empty()};
    for (const auto& r : ex.rays) {
        json rows = json::array();
        for (const auto& row : r.rows)
            rows.push_back({{"t", row.t},
                            {"x", row.x},
                            {"q_num", detail::cjson(row.q_num)},
                            {"q_asym_a", detail::cjson(row.q_asym_a)},
                            {"q_asym_b", detail::cjson(row.q_asym_b)},
                            {"error_a", row.error(Convention::a)},
                            {"error_b", row.error(Convention::b)}});
        rays.push_back({{"xi", r.xi},
                        {"z1", r.ctx.z1},
                        {"z2", r.ctx.z2},
                        {"theta_pp_1", r.ctx.theta_pp_1},
                        {"theta_pp_2", r.ctx.theta_pp_2},
                        {"nu1", r.nu1},
                        {"nu2", r.nu2},
                        {"lambda1", r.lambda1},
                        {"lambda2", r.lambda2},
                        {"rows", rows},
                        {"fits",
                         {{"abs_q_num", detail::fit_json(r.q_fit)},
                          {"error_envelope_a", detail::fit_json(r.error_fit[0])},
                          {"error_envelope_b", detail::fit_json(r.error_fit[1])}}},
                        {"passes", {{"a", r.passes[0]}, {"b", r.passes[1]}}}});
        any[0] = any[0] && r.passes[0];
        any[1] = any[1] && r.passes[1];
    }
    if (any[0]) passing.push_back("a");
    if (any[1]) passing.push_back("b");
    const auto& s = ex.scattering;
    json cfg = to_json(ex.config);
    cfg.erase("output_dir");  // where the files go is not part of the result
    return {{"schema", "nhnse-report/1"},
            {"timestamp", timestamp},
            {"config_hash", ex.hash},
            {"config", cfg},
            {"convention", to_string(ex.config.convention)},
            {"scattering",
             {{"nodes", s.size()},
              {"sup_norm_r", s.sup_norm_r},
              {"max_unimodularity_defect", s.max_unimodularity_defect},
              {"max_det_drift", s.max_det_drift},
              {"end_triviality", s.end_triviality}}},
            {"evolution",
             {{"ran", ex.evolution.ran},
              {"steps", ex.evolution.steps},
              {"max_mass_drift", ex.evolution.max_mass_drift},
              {"max_edge_amplitude", ex.evolution.max_edge_amplitude},
              {"max_spectral_tail", ex.evolution.max_spectral_tail}}},
            {"rays", rays},
            {"passing_conventions", passing}};
}

struct EmittedFiles {
    std::filesystem::path report;
    std::vector<std::filesystem::path> csv, svg;
};

/// Writes report[-tag].json, three CSV tables and four SVG plots into out_dir.
inline EmittedFiles emit_report(const Experiment& ex, const std::filesystem::path& out_dir, const std::string& tag = "") {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create '" + out_dir.string() + "': " + ec.message());
    EmittedFiles files;
    using detail::tagged;
    using detail::write_file;

    // tables
    {
        std::ostringstream os;
        ex.scattering.write_csv(os, true);
        files.csv.push_back(out_dir / tagged("scattering", tag, ".csv"));
        write_file(files.csv.back(), os.str());
    }
    {
        std::ostringstream os;
        os.precision(17);
        os << "xi,t,x,Re q_num,Im q_num,Re q_asym_a,Im q_asym_a,Re q_asym_b,Im q_asym_b,error_a,error_b\n";
        for (const auto& r : ex.rays)
            for (const auto& row : r.rows)
                os << r.xi << ',' << row.t << ',' << row.x << ',' << row.q_num.real() << ',' << row.q_num.imag() << ','
                   << row.q_asym_a.real() << ',' << row.q_asym_a.imag() << ',' << row.q_asym_b.real() << ','
                   << row.q_asym_b.imag() << ',' << row.error(Convention::a) << ',' << row.error(Convention::b)
                   << '\n';
        files.csv.push_back(out_dir / tagged("rays", tag, ".csv"));
        write_file(files.csv.back(), os.str());
    }
    {
        std::ostringstream os;
        ex.signmap.write_csv(os);
        files.csv.push_back(out_dir / tagged("signmap", tag, ".csv"));
        write_file(files.csv.back(), os.str());
    }

    // plots
    const auto sp = stationary_points(ex.signmap.xi);
    std::vector<double> marks;
    if (sp.valid()) marks = {sp.z2, sp.z1};
    else if (sp.status == PhaseStatus::degenerate) marks = {sp.z1};
    files.svg.push_back(out_dir / tagged("signmap", tag, ".svg"));
    write_file(files.svg.back(), svg::render_sign_map(ex.signmap, marks));

    {
        svg::LinePlot p;
        p.title = "|r(z)|";
        p.xlabel = "z";
        p.ylabel = "|r|";
        svg::Series s{"|r(z)|", ex.scattering.z, {}, "#1f77b4"};
        for (auto v : ex.scattering.r) s.y.push_back(std::abs(v));
        p.series.push_back(std::move(s));
        for (const auto& r : ex.rays) {
            p.vlines.push_back(r.ctx.z1);
            p.vlines.push_back(r.ctx.z2);
        }
        files.svg.push_back(out_dir / tagged("reflection", tag, ".svg"));
        write_file(files.svg.back(), svg::render(p));
    }
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    {
        svg::LinePlot p;
        p.title = "|q| along rays x = xi t";
        p.xlabel = "t";
        p.ylabel = "|q|";
        std::size_t c = 0;
        for (const auto& r : ex.rays) {
            svg::Series num{"direct, xi = " + svg::detail::num(r.xi), {}, {}, palette[c++ % 6]};
            svg::Series asy{"asymptotic (" + to_string(ex.config.convention) + "), xi = " + svg::detail::num(r.xi),
                            {}, {}, num.color, true};
            for (const auto& row : r.rows) {
                num.x.push_back(row.t);
                num.y.push_back(std::abs(row.q_num));
                asy.x.push_back(row.t);
                asy.y.push_back(std::abs(row.q_asym(ex.config.convention)));
            }
            p.series.push_back(std::move(num));
            p.series.push_back(std::move(asy));
        }
        files.svg.push_back(out_dir / tagged("rays", tag, ".svg"));
        write_file(files.svg.back(), svg::render(p));
    }
    {
        svg::LinePlot p;
        p.title = "error decay";
        p.xlabel = "t";
        p.ylabel = "|q_num - q_asym|";
        p.logx = p.logy = true;
        std::size_t c = 0;
        for (const auto& r : ex.rays) {
            const std::string xs = svg::detail::num(r.xi);
            svg::Series qa{"|q_num|, xi = " + xs, {}, {}, "#7f7f7f"};
            for (const auto& row : r.rows) {
                qa.x.push_back(row.t);
                qa.y.push_back(std::abs(row.q_num));
            }
            p.series.push_back(std::move(qa));
            for (Convention cv : {Convention::a, Convention::b}) {
                const auto k = static_cast<std::size_t>(cv);
                svg::Series e{"envelope " + to_string(cv) + ", xi = " + xs, r.error_envelope[k].t,
                              r.error_envelope[k].v, palette[c++ % 6]};
                e.markers = true;
                e.dashed = cv == Convention::b;
                p.series.push_back(std::move(e));
            }
        }
        files.svg.push_back(out_dir / tagged("error-decay", tag, ".svg"));
        write_file(files.svg.back(), svg::render(p));
    }

    files.report = out_dir / tagged("report", tag, ".json");
    write_file(files.report, report_json(ex, detail::utc_timestamp()).dump(2) + "\n");
    return files;
}

}  // namespace nhnse
