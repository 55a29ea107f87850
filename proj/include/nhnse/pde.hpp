#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "nhnse/akns.hpp"
#include "nhnse/datum.hpp"
#include "nhnse/errors.hpp"
#include "nhnse/fft.hpp"
#include "nhnse/grid.hpp"

namespace nhnse {

struct EvolutionConfig {
    Grid grid;
    double dt = 5e-4;
    double t_final = 1.0;
    Reduction kind = Reduction::nhnse;
    double dealias = 2.0 / 3.0;
    std::vector<double> snapshot_times;  // must be multiples of dt within [0, t_final]
    bool keep_snapshots = true;          // store fields in the result

    double mass_tol = 1e-8;           // relative drift limit
    double edge_tol = 1e-6;           // max |q| over the edge cells; <= 0 disables
    std::size_t edge_cells = 8;
    double tail_tol = 1e-6;           // spectral tail limit; <= 0 disables
    double stability_bound = 2.5;     // limit on dt * (fastest nonlinear rate)
    std::size_t monitor_every = 200;  // steps between guard checks

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("evolution: dt must be positive");
        if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw InputError("evolution: t_final must be >= 0");
        if (dealias < 0.5 - 1e-12 || dealias > 2.0 / 3.0 + 1e-12)
            throw InputError("evolution: dealiasing fraction must lie in [1/2, 2/3]");
        for (double t : snapshot_times) {
            if (t < 0.0 || t > t_final + 1e-9) throw InputError("evolution: snapshot time outside [0, t_final]");
            const double steps = t / dt;
            if (std::abs(steps - std::round(steps)) > 1e-6)
                throw InputError("evolution: snapshot time " + std::to_string(t) + " is not a multiple of dt");
        }
        const double steps = t_final / dt;
        if (std::abs(steps - std::round(steps)) > 1e-6) throw InputError("evolution: t_final is not a multiple of dt");
    }

    std::size_t total_steps() const { return static_cast<std::size_t>(std::llround(t_final / dt)); }
};

struct Snapshot {
    double t = 0.0;
    CField q;
};

struct EvolutionResult {
    Grid grid;
    std::vector<Snapshot> snapshots;
    std::vector<double> trace_t;
    std::vector<double> mass_drift;  // relative
    std::vector<double> spectral_tail;
    std::vector<double> edge_amplitude;
    double initial_mass = 0.0;
    std::size_t steps = 0;

    double max_mass_drift() const {
        double m = 0.0;
        for (double v : mass_drift) m = std::max(m, v);
        return m;
    }
    double max_edge_amplitude() const {
        double m = 0.0;
        for (double v : edge_amplitude) m = std::max(m, v);
        return m;
    }
};

/// h * sum |q_j|^2 (trapezoid rule on the periodic grid).
inline double conserved_mass(std::span<const cplx> q, const Grid& g) {
    double s = 0.0;
    for (auto v : q) s += std::norm(v);
    return s * g.spacing();
}

/// Linear Fourier symbol of q_t = L q + N(q).
inline cplx linear_symbol(Reduction kind, double k) {
    switch (kind) {
        case Reduction::nhnse: return -I * (((0.25 * k + 0.5) * k + 1.0) * k - 2.0);
        case Reduction::kdv:
        case Reduction::mkdv: return I * k * k * k;
        case Reduction::nls: return -I * k * k;
    }
    return 0.0;
}

/// q evaluated at arbitrary x by exact trigonometric interpolation of its
/// Fourier coefficients (qhat as returned by FFT::forward).
inline cplx spectral_eval(std::span<const cplx> qhat, const Grid& g, double x) {
    const std::size_t n = g.n;
    cplx s = 0.0;
    const double dx = x - g.origin;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == n / 2) {
            s += qhat[j] * std::cos(g.wavenumber(j) * dx);
            continue;
        }
        s += qhat[j] * std::polar(1.0, g.wavenumber(j) * dx);
    }
    return s / static_cast<double>(n);
}

/// Integrating-factor RK4 integrator. The linear part is propagated exactly;
/// the nonlinearity is evaluated pseudo-spectrally and its output is
/// dealiased.
class Evolver {
public:
    using Observer = std::function<void(double t, const CField& q, const CField& qhat)>;

    explicit Evolver(EvolutionConfig cfg)
        : cfg_(std::move(cfg)), g_(cfg_.grid), fft_(g_.n), k_(g_.wavenumbers()) {
        cfg_.validate();
        const double kcut = cfg_.dealias * g_.max_wavenumber();
        mask_.resize(g_.n);
        E_.resize(g_.n);
        E2_.resize(g_.n);
        for (std::size_t j = 0; j < g_.n; ++j) {
            mask_[j] = std::abs(k_[j]) <= kcut ? 1.0 : 0.0;
            E_[j] = std::exp(linear_symbol(cfg_.kind, k_[j]) * (0.5 * cfg_.dt));
            E2_[j] = E_[j] * E_[j];
        }
        ik_.resize(g_.n);
        for (std::size_t j = 0; j < g_.n; ++j) ik_[j] = j == g_.n / 2 ? cplx{} : I * k_[j];
        u_.resize(g_.n);
        ux_.resize(g_.n);
        w_.resize(g_.n);
    }

    const EvolutionConfig& config() const { return cfg_; }

    EvolutionResult run(const CField& q0, const Observer& observe = {}) {
        if (q0.size() != g_.n) throw InputError("evolution: initial field does not match grid");
        EvolutionResult res;
        res.grid = g_;
        CField uh = fft_.forward(q0);
        res.initial_mass = conserved_mass(q0, g_);

        std::vector<std::size_t> snap_steps;
        for (double t : cfg_.snapshot_times) snap_steps.push_back(static_cast<std::size_t>(std::llround(t / cfg_.dt)));
        std::sort(snap_steps.begin(), snap_steps.end());
        snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());
        std::size_t next_snap = 0;

        const std::size_t nsteps = cfg_.total_steps();
        CField k1(g_.n), k2(g_.n), k3(g_.n), k4(g_.n), tmp(g_.n), q(g_.n);
        for (std::size_t step = 0;; ++step) {
            const bool snap = next_snap < snap_steps.size() && snap_steps[next_snap] == step;
            const bool monitor = snap || step % cfg_.monitor_every == 0 || step == nsteps;
            if (monitor) {
                fft_.inverse(uh, q);
                check_guards(step, q, uh, res);
                if (snap) {
                    const double t = static_cast<double>(step) * cfg_.dt;
                    if (cfg_.keep_snapshots) res.snapshots.push_back({t, q});
                    if (observe) observe(t, q, uh);
                    ++next_snap;
                }
            }
            if (step == nsteps) break;

            const double dt = cfg_.dt;
            nonlinear(uh, k1, dt);
            for (std::size_t j = 0; j < g_.n; ++j) tmp[j] = E_[j] * (uh[j] + 0.5 * k1[j]);
            nonlinear(tmp, k2, dt);
            for (std::size_t j = 0; j < g_.n; ++j) tmp[j] = E_[j] * uh[j] + 0.5 * k2[j];
            nonlinear(tmp, k3, dt);
            for (std::size_t j = 0; j < g_.n; ++j) tmp[j] = E2_[j] * uh[j] + E_[j] * k3[j];
            nonlinear(tmp, k4, dt);
            for (std::size_t j = 0; j < g_.n; ++j)
                uh[j] = E2_[j] * uh[j] + (E2_[j] * k1[j] + 2.0 * E_[j] * (k2[j] + k3[j]) + k4[j]) / 6.0;
            res.steps = step + 1;
        }
        return res;
    }

private:
    // out = dt * mask * FFT[N(q)], q = IFFT[vh].
    void nonlinear(const CField& vh, CField& out, double dt) {
        fft_.inverse(vh, u_);
        for (std::size_t j = 0; j < g_.n; ++j) w_[j] = ik_[j] * vh[j];
        fft_.inverse(w_, ux_);
        for (std::size_t j = 0; j < g_.n; ++j) {
            const cplx u = u_[j], ux = ux_[j];
            const double m = std::norm(u);
            switch (cfg_.kind) {
                case Reduction::nhnse: w_[j] = -1.5 * m * ux - I * m * u; break;
                case Reduction::kdv: w_[j] = -6.0 * u * ux; break;
                case Reduction::mkdv: w_[j] = -6.0 * u * u * ux; break;
                case Reduction::nls: w_[j] = 2.0 * I * m * u; break;
            }
        }
        fft_.forward(w_, out);
        for (std::size_t j = 0; j < g_.n; ++j) out[j] *= dt * mask_[j];
    }

    // Fastest rate of the explicit (nonlinear) part, to be resolved by dt.
    double nonlinear_rate(double max_abs2) const {
        const double kc = cfg_.dealias * g_.max_wavenumber();
        const double a = std::sqrt(max_abs2);
        switch (cfg_.kind) {
            case Reduction::nhnse: return max_abs2 * (1.5 * kc + 1.0);
            case Reduction::kdv: return 6.0 * a * kc;
            case Reduction::mkdv: return 6.0 * max_abs2 * kc;
            case Reduction::nls: return 2.0 * max_abs2;
        }
        return 0.0;
    }

    void check_guards(std::size_t step, const CField& q, const CField& qh, EvolutionResult& res) {
        const double t = static_cast<double>(step) * cfg_.dt;
        double m2 = 0.0;
        for (auto v : q) m2 = std::max(m2, std::norm(v));
        for (auto v : q)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericalGuardError("evolution: non-finite field at t = " + std::to_string(t));
        const double stab = cfg_.dt * nonlinear_rate(m2);
        if (stab >= cfg_.stability_bound)
            throw NumericalGuardError("evolution: stability guard dt*rate = " + std::to_string(stab) + " >= " +
                                      std::to_string(cfg_.stability_bound) + " at t = " + std::to_string(t));
        const double mass = conserved_mass(q, g_);
        const double drift = res.initial_mass > 0.0 ? std::abs(mass - res.initial_mass) / res.initial_mass
                                                    : std::abs(mass - res.initial_mass);
        double peak = 0.0, tail = 0.0;
        const double kcut = 0.9 * g_.max_wavenumber();
        for (std::size_t j = 0; j < g_.n; ++j) {
            const double a = std::abs(qh[j]);
            peak = std::max(peak, a);
            if (std::abs(k_[j]) >= kcut) tail = std::max(tail, a);
        }
        tail = peak > 0.0 ? tail / peak : 0.0;
        double edge = 0.0;
        const std::size_t ec = std::min(cfg_.edge_cells, g_.n / 2);
        for (std::size_t j = 0; j < ec; ++j) edge = std::max({edge, std::abs(q[j]), std::abs(q[g_.n - 1 - j])});
        res.trace_t.push_back(t);
        res.mass_drift.push_back(drift);
        res.spectral_tail.push_back(tail);
        res.edge_amplitude.push_back(edge);
        if (drift > cfg_.mass_tol)
            throw NumericalGuardError("evolution: relative mass drift " + std::to_string(drift) + " exceeds " +
                                      std::to_string(cfg_.mass_tol) + " at t = " + std::to_string(t));
        if (cfg_.tail_tol > 0.0 && tail > cfg_.tail_tol)
            throw NumericalGuardError("evolution: spectral tail " + std::to_string(tail) + " exceeds " +
                                      std::to_string(cfg_.tail_tol) + " at t = " + std::to_string(t));
        if (cfg_.edge_tol > 0.0 && edge > cfg_.edge_tol)
            throw NumericalGuardError("evolution: edge amplitude " + std::to_string(edge) + " exceeds " +
                                      std::to_string(cfg_.edge_tol) + " at t = " + std::to_string(t) +
                                      " (radiation reached the domain boundary)");
    }

    EvolutionConfig cfg_;
    Grid g_;
    FFT fft_;
    std::vector<double> k_, mask_;
    CField E_, E2_, ik_, u_, ux_, w_;
};

/// Evolves periodic initial data (no decay requirement).
inline EvolutionResult evolve_periodic(const CField& q0, const EvolutionConfig& cfg,
                                       const Evolver::Observer& observe = {}) {
    Evolver ev(cfg);
    return ev.run(q0, observe);
}

/// Evolves decaying initial data under the equation selected by cfg.kind.
inline EvolutionResult evolve(const InitialDatum& datum, const EvolutionConfig& cfg,
                              const Evolver::Observer& observe = {}) {
    if (!datum.grid().same_as(cfg.grid)) throw InputError("evolution: datum grid differs from the evolution grid");
    return evolve_periodic(datum.samples(), cfg, observe);
}

inline EvolutionResult evolve_reduction(Reduction kind, const InitialDatum& datum, EvolutionConfig cfg,
                                        const Evolver::Observer& observe = {}) {
    cfg.kind = kind;
    return evolve(datum, cfg, observe);
}

/// CSV snapshot: x, Re q, Im q.
inline void write_snapshot_csv(std::ostream& os, const Grid& g, const CField& q) {
    const auto old = os.precision(17);
    os << "x,Re q,Im q\n";
    for (std::size_t j = 0; j < g.n; ++j) os << g.x(j) << ',' << q[j].real() << ',' << q[j].imag() << '\n';
    os.precision(old);
}

namespace detail {
template <typename T>
void put_le(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}
template <typename T>
T get_le(std::istream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw InputError("binary snapshot: truncated input");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}
}  // namespace detail

/// Binary snapshot: uint64 N, float64 L, float64 t, then N interleaved
/// (Re, Im) float64 pairs, all little-endian.
inline void write_snapshot_binary(std::ostream& os, const Grid& g, double t, const CField& q) {
    detail::put_le<std::uint64_t>(os, g.n);
    detail::put_le<double>(os, g.length);
    detail::put_le<double>(os, t);
    for (auto v : q) {
        detail::put_le<double>(os, v.real());
        detail::put_le<double>(os, v.imag());
    }
}

struct BinarySnapshot {
    std::uint64_t n = 0;
    double length = 0.0, t = 0.0;
    CField q;
};

inline BinarySnapshot read_snapshot_binary(std::istream& is) {
    BinarySnapshot s;
    s.n = detail::get_le<std::uint64_t>(is);
    s.length = detail::get_le<double>(is);
    s.t = detail::get_le<double>(is);
    if (s.n > (1ull << 32)) throw InputError("binary snapshot: implausible size");
    s.q.resize(s.n);
    for (auto& v : s.q) {
        const double re = detail::get_le<double>(is);
        v = {re, detail::get_le<double>(is)};
    }
    return s;
}

}  // namespace nhnse
