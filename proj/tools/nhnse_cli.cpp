#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nhnse/nhnse.hpp"

namespace fs = std::filesystem;
using namespace nhnse;

namespace {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, guard_error = 3, validity_error = 4 };

struct Globals {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 1;
    std::string convention;
    std::string cache_dir;
    bool verbose = false;
};

struct Context {
    RunConfig cfg;
    std::string hash;
    fs::path out;
    PipelineOptions pipe;
};

Context make_context(const Globals& g) {
    Context c;
    c.cfg = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
    if (!g.convention.empty()) {
        try {
            c.cfg.convention = convention_from(g.convention);
        } catch (const InputError& e) {
            throw ConfigError("--convention", e.what());
        }
    }
    if (!g.out_dir.empty()) c.cfg.output_dir = g.out_dir;
    c.hash = config_hash(c.cfg);
    c.out = c.cfg.output_dir;
    fs::create_directories(c.out);
    c.pipe.threads = std::max(1u, g.threads);
    c.pipe.cache_dir = g.cache_dir;
    if (g.verbose) c.pipe.log = [](const std::string& s) { std::cerr << "[nhnse] " << s << '\n'; };
    return c;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "': " + std::strerror(errno));
    out << s;
    out.close();
    if (!out) throw Error("write failed for '" + p.string() + "'");
    std::cout << p.string() << '\n';
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

int cmd_scatter(const Context& c) {
    const ScatteringData data = scattering_for(c.cfg, c.pipe);
    const InitialDatum datum(scattering_grid(c.cfg), c.cfg.datum);
    const SymmetryReport sym = check_symmetries(data, datum, c.pipe.threads);
    std::ostringstream csv;
    data.write_csv(csv, true);
    write_text(c.out / ("scatter-" + c.hash + ".csv"), csv.str());

    const bool unimodular = data.max_unimodularity_defect < 1e-8;
    const bool symmetric = sym.max_deviation() < 1e-8;
    const bool subunit = data.sup_norm_r < 1.0;
    const json diag = {{"config_hash", c.hash},
                       {"nodes", data.size()},
                       {"sup_norm_r", data.sup_norm_r},
                       {"max_unimodularity_defect", data.max_unimodularity_defect},
                       {"max_det_drift", data.max_det_drift},
                       {"end_triviality", data.end_triviality},
                       {"max_s22_deviation", sym.max_s22_deviation},
                       {"max_s12_deviation", sym.max_s12_deviation},
                       {"max_parity_deviation", sym.max_parity_deviation},
                       {"checks", {{"unimodularity", unimodular}, {"symmetries", symmetric}, {"sup_r_below_one", subunit}}},
                       {"all_pass", unimodular && symmetric && subunit}};
    write_text(c.out / ("scatter-diagnostics-" + c.hash + ".json"), diag.dump(2) + "\n");
    return unimodular && symmetric && subunit ? ok : failure;
}

int cmd_asym(const Context& c) {
    const ScatteringData data = scattering_for(c.cfg, c.pipe);
    std::ostringstream csv;
    write_asymptotic_csv_header(csv);
    for (const auto& ray : c.cfg.rays) {
        const RayAsymptotics a(data, ray.xi, asymptotic_options(c.cfg));
        for (double t : ray.times()) write_asymptotic_csv_row(csv, a.value(t, c.cfg.convention));
    }
    write_text(c.out / ("asym-" + c.hash + ".csv"), csv.str());
    return ok;
}

int cmd_evolve(const Context& c) {
    EvolutionConfig ec = evolution_config(c.cfg);
    ec.snapshot_times = c.cfg.evolution.snapshots.empty() ? std::vector<double>{ec.t_final} : c.cfg.evolution.snapshots;
    ec.keep_snapshots = false;
    const Grid g = evolution_grid(c.cfg);
    const InitialDatum datum(g, c.cfg.datum);
    if (c.pipe.log) c.pipe.log("evolution: " + std::to_string(ec.total_steps()) + " steps");
    const auto res = evolve(datum, ec, [&](double t, const CField& q, const CField&) {
        const std::string stem = "evolve-" + c.hash + "-t" + time_tag(t);
        std::ostringstream csv;
        write_snapshot_csv(csv, g, q);
        write_text(c.out / (stem + ".csv"), csv.str());
        std::ostringstream bin;
        write_snapshot_binary(bin, g, t, q);
        write_text(c.out / (stem + ".bin"), bin.str());
    });
    std::ostringstream trace;
    trace.precision(17);
    trace << "t,mass_drift,spectral_tail,edge_amplitude\n";
    for (std::size_t i = 0; i < res.trace_t.size(); ++i)
        trace << res.trace_t[i] << ',' << res.mass_drift[i] << ',' << res.spectral_tail[i] << ','
              << res.edge_amplitude[i] << '\n';
    write_text(c.out / ("evolve-" + c.hash + "-mass.csv"), trace.str());
    return ok;
}

int cmd_compare(const Context& c) {
    const Experiment ex = run_experiment(c.cfg, c.pipe);
    const EmittedFiles f = emit_report(ex, c.out, c.hash);
    for (const auto& p : f.csv) std::cout << p.string() << '\n';
    for (const auto& p : f.svg) std::cout << p.string() << '\n';
    std::cout << f.report.string() << '\n';
    for (const auto& r : ex.rays) {
        auto slope = [](const FitSummary& s) { return s.available ? std::to_string(s.fit.slope) : std::string("n/a"); };
        std::cerr << "xi = " << r.xi << ": |q| slope " << slope(r.q_fit) << ", error slope a " << slope(r.error_fit[0])
                  << (r.passes[0] ? " (pass)" : " (fail)") << ", b " << slope(r.error_fit[1])
                  << (r.passes[1] ? " (pass)" : " (fail)") << '\n';
    }
    return ok;
}

int cmd_signmap(const Context& c) {
    const auto& s = c.cfg.signmap;
    const SignMap m = sign_map(s.xi, s.window, s.nx, s.ny);
    std::ostringstream csv;
    m.write_csv(csv);
    write_text(c.out / ("signmap-" + c.hash + ".csv"), csv.str());
    const auto crossings = real_axis_crossings(s.xi, s.window.re_min, s.window.re_max);
    write_text(c.out / ("signmap-" + c.hash + ".svg"), svg::render_sign_map(m, crossings));
    for (double x : crossings) std::cerr << "real-axis crossing at " << x << '\n';
    return ok;
}

int cmd_selftest(const Globals& g) {
    bool all = true;
    for (const auto& r : run_selftest(std::max(1u, g.threads))) {
        std::printf("%s  %-48s %.3e (tol %.1e)%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value, r.tolerance,
                    r.detail.empty() ? "" : "  ", r.detail.c_str());
        all = all && r.pass;
    }
    return all ? ok : failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scattering, long-time asymptotics and direct simulation for the NHNSE"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "JSON run configuration (defaults apply when omitted)")
        ->check(CLI::ExistingFile);
    app.add_option("--out", g.out_dir, "output directory (overrides output_dir)");
    app.add_option("--threads", g.threads, "worker threads for per-node work")->check(CLI::PositiveNumber);
    app.add_option("--convention", g.convention, "branch convention for the asymptotic formula")
        ->check(CLI::IsMember({"a", "b"}));
    app.add_option("--cache", g.cache_dir, "content-addressed scattering cache directory");
    app.add_flag("--verbose", g.verbose, "progress messages on stderr");

    auto* scatter = app.add_subcommand("scatter", "reflection coefficient table and diagnostics");
    auto* asym = app.add_subcommand("asym", "leading-order asymptotics along the configured rays");
    auto* evolve_cmd = app.add_subcommand("evolve", "direct pseudo-spectral evolution with snapshots");
    auto* compare = app.add_subcommand("compare", "end-to-end comparison and report");
    auto* signmap = app.add_subcommand("signmap", "sign regions of Re(i theta)");
    auto* selftest = app.add_subcommand("selftest", "fast invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }

    try {
        if (selftest->parsed()) return cmd_selftest(g);
        const Context c = make_context(g);
        if (scatter->parsed()) return cmd_scatter(c);
        if (asym->parsed()) return cmd_asym(c);
        if (evolve_cmd->parsed()) return cmd_evolve(c);
        if (compare->parsed()) return cmd_compare(c);
        if (signmap->parsed()) return cmd_signmap(c);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return config_error;
    } catch (const NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << '\n';
        return guard_error;
    } catch (const ValidityError& e) {
        std::cerr << "validity: " << e.what() << '\n';
        return validity_error;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return failure;
}
