#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nhnse/errors.hpp"
#include "nhnse/fft.hpp"
#include "nhnse/grid.hpp"
#include "nhnse/mat2.hpp"

namespace nhnse {

/// Coefficients of the cubic AKNS flow. Each of alpha, beta, gamma, delta is
/// purely imaginary and stored as its real coefficient of i, so e.g.
/// `alpha = -4` means alpha = -4i.
struct AknsParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;

    cplx a() const { return I * alpha; }
    cplx b() const { return I * beta; }
    cplx c() const { return I * gamma; }
    cplx d() const { return I * delta; }

    void validate() const {
        if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(delta))
            throw InputError("AknsParams: coefficients must be finite");
    }

    /// Dispersion polynomial alpha z^3 + beta z^2 + gamma z + delta.
    cplx dispersion(cplx z) const { return ((a() * z + b()) * z + c()) * z + d(); }

    static AknsParams nhnse() { return {1.0, -1.0, 1.0, 1.0}; }
    static AknsParams kdv() { return {-4.0, 0.0, 0.0, 0.0}; }
    static AknsParams mkdv() { return {-4.0, 0.0, 0.0, 0.0}; }
    static AknsParams nls() { return {0.0, -2.0, 0.0, 0.0}; }
};

/// Named reductions of the AKNS system. The reduction fixes both the
/// coefficients and how r is tied to q.
enum class Reduction { nhnse, kdv, mkdv, nls };

inline AknsParams params_for(Reduction k) {
    switch (k) {
        case Reduction::nhnse: return AknsParams::nhnse();
        case Reduction::kdv: return AknsParams::kdv();
        case Reduction::mkdv: return AknsParams::mkdv();
        case Reduction::nls: return AknsParams::nls();
    }
    return {};
}

inline std::string to_string(Reduction k) {
    switch (k) {
        case Reduction::nhnse: return "nhnse";
        case Reduction::kdv: return "kdv";
        case Reduction::mkdv: return "mkdv";
        case Reduction::nls: return "nls";
    }
    return "?";
}

/// r implied by a reduction: conj(q) for NHNSE, -1 for KdV, -q for mKdV,
/// -conj(q) for focusing NLS.
inline cplx reduced_r(Reduction k, cplx q) {
    switch (k) {
        case Reduction::nhnse: return std::conj(q);
        case Reduction::kdv: return -1.0;
        case Reduction::mkdv: return -q;
        case Reduction::nls: return -std::conj(q);
    }
    return 0.0;
}

/// The pair (q, r) sampled on a shared periodic grid.
struct FieldPair {
    Grid grid;
    CField q;
    CField r;

    FieldPair() = default;
    FieldPair(Grid g, CField q_, CField r_) : grid(g), q(std::move(q_)), r(std::move(r_)) {
        if (q.size() != grid.n || r.size() != grid.n)
            throw InputError("FieldPair: field length does not match grid size");
    }

    static FieldPair reduced(Grid g, CField q, Reduction k) {
        CField r(q.size());
        for (std::size_t j = 0; j < q.size(); ++j) r[j] = reduced_r(k, q[j]);
        return FieldPair(g, std::move(q), std::move(r));
    }
};

/// Three consecutive snapshots t - dt, t, t + dt.
struct TimeStencil {
    FieldPair prev, cur, next;
    double dt = 0.0;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time stencil: dt must be positive");
        if (!prev.grid.same_as(cur.grid) || !next.grid.same_as(cur.grid))
            throw InputError("time stencil: snapshots live on different grids");
    }
};

/// q-only variant for reduced equations.
struct ScalarStencil {
    Grid grid;
    CField prev, cur, next;
    double dt = 0.0;

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time stencil: dt must be positive");
        if (prev.size() != grid.n || cur.size() != grid.n || next.size() != grid.n)
            throw InputError("time stencil: snapshot length does not match grid size");
    }

    TimeStencil lift(Reduction k) const {
        return {FieldPair::reduced(grid, prev, k), FieldPair::reduced(grid, cur, k),
                FieldPair::reduced(grid, next, k), dt};
    }
};

/// Pointwise q, r and their first two x-derivatives.
struct FieldJet {
    cplx q, q_x, q_xx;
    cplx r, r_x, r_xx;
};

struct LaxMatrices {
    Mat2 U;
    Mat2 V;
};

/// The polynomial part Q~ of the t-equation written as z^2*z2 + z*z1 + z0.
struct LaxBlocks {
    Mat2 z2, z1, z0;
    Mat2 at(cplx z) const { return z * z * z2 + z * z1 + z0; }
};

inline LaxBlocks lax_q_blocks(const FieldJet& f, const AknsParams& p) {
    const cplx al = p.a(), be = p.b(), ga = p.c();
    const cplx q = f.q, r = f.r, qx = f.q_x, rx = f.r_x;
    LaxBlocks b;
    b.z2 = I * al * Mat2::offdiag(q, r);
    b.z1 = -I * Mat2(I * al / 2.0 * q * r, -I * al / 2.0 * qx - be * q, I * al / 2.0 * rx - be * r,
                     -I * al / 2.0 * q * r);
    const cplx cross = I * al / 4.0 * (q * rx - r * qx);
    b.z0 = -Mat2(cross - be / 2.0 * q * r, -I * al / 4.0 * (-f.q_xx + 2.0 * q * q * r) + be / 2.0 * qx - I * ga * q,
                 -I * al / 4.0 * (-f.r_xx + 2.0 * q * r * r) - be / 2.0 * rx - I * ga * r, -cross + be / 2.0 * q * r);
    return b;
}

inline LaxMatrices lax_matrices(const FieldJet& f, cplx z, const AknsParams& p) {
    const Mat2 s3 = Mat2::sigma3();
    LaxMatrices m;
    m.U = -I * z * s3 + Mat2::offdiag(f.q, f.r);
    m.V = p.dispersion(z) * s3 + lax_q_blocks(f, p).at(z);
    return m;
}

/// The NHNSE t-part written compactly in terms of P = offdiag(q, r):
/// -z^2 P + (iz/2)(P^2+P_x)s3 + [P,P_x]/4 - P^3/2 + P_xx/4 + zP - (i/2)(P^2+P_x)s3 - P.
inline Mat2 nhnse_q_matrix(const FieldJet& f, cplx z) {
    const Mat2 s3 = Mat2::sigma3();
    const Mat2 P = Mat2::offdiag(f.q, f.r);
    const Mat2 Px = Mat2::offdiag(f.q_x, f.r_x);
    const Mat2 Pxx = Mat2::offdiag(f.q_xx, f.r_xx);
    const Mat2 P2 = P * P;
    return -z * z * P + (I * z / 2.0) * ((P2 + Px) * s3) + 0.25 * commutator(P, Px) - 0.5 * (P2 * P) +
           0.25 * Pxx + z * P - (I / 2.0) * ((P2 + Px) * s3) - P;
}

namespace detail {

inline void require_resolved(SpectralDiff& d, const CField& f, const char* what) {
    constexpr double tail_limit = 1e-10;
    const double tail = d.spectral_tail(f);
    if (tail > tail_limit)
        throw NumericalGuardError(std::string(what) + ": field is under-resolved (spectral tail " +
                                  std::to_string(tail) + ")");
}

inline CField centered_dt(const CField& prev, const CField& next, double dt) {
    CField out(prev.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = (next[j] - prev[j]) / (2.0 * dt);
    return out;
}

}  // namespace detail

struct SystemResidual {
    CField q, r;
    double max_abs() const {
        double m = 0.0;
        for (auto v : q) m = std::max(m, std::abs(v));
        for (auto v : r) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Pointwise residual (q_t - F_q, r_t - F_r) of the cubic AKNS system at the
/// middle snapshot. Time derivatives are centered differences, space
/// derivatives spectral.
inline SystemResidual residual_system3(const TimeStencil& s, const AknsParams& p) {
    s.validate();
    p.validate();
    SpectralDiff d(s.cur.grid);
    detail::require_resolved(d, s.cur.q, "residual_system3");
    detail::require_resolved(d, s.cur.r, "residual_system3");
    const auto [qx, qxx, qxxx] = d.derivatives3(s.cur.q);
    const auto [rx, rxx, rxxx] = d.derivatives3(s.cur.r);
    const CField qt = detail::centered_dt(s.prev.q, s.next.q, s.dt);
    const CField rt = detail::centered_dt(s.prev.r, s.next.r, s.dt);
    const cplx al = p.a(), be = p.b(), ga = p.c(), de = p.d();
    SystemResidual out{CField(s.cur.grid.n), CField(s.cur.grid.n)};
    for (std::size_t j = 0; j < s.cur.grid.n; ++j) {
        const cplx q = s.cur.q[j], r = s.cur.r[j];
        const cplx fq = -I * al / 4.0 * (qxxx[j] - 6.0 * q * r * qx[j]) - be / 2.0 * (qxx[j] - 2.0 * q * q * r) +
                        I * ga * qx[j] + 2.0 * de * q;
        const cplx fr = -I * al / 4.0 * (rxxx[j] - 6.0 * q * r * rx[j]) + be / 2.0 * (rxx[j] - 2.0 * q * r * r) +
                        I * ga * rx[j] - 2.0 * de * r;
        out.q[j] = qt[j] - fq;
        out.r[j] = rt[j] - fr;
    }
    return out;
}

namespace detail {

struct ScalarDerivs {
    CField qt, qx, qxx, qxxx;
};

inline ScalarDerivs scalar_derivs(const ScalarStencil& s, const char* what) {
    s.validate();
    SpectralDiff d(s.grid);
    require_resolved(d, s.cur, what);
    auto [qx, qxx, qxxx] = d.derivatives3(s.cur);
    return {centered_dt(s.prev, s.next, s.dt), std::move(qx), std::move(qxx), std::move(qxxx)};
}

}  // namespace detail

/// i q_t - (i/4) q_xxx + (3i/2)|q|^2 q_x + (1/2) q_xx + i q_x + 2q - |q|^2 q.
inline CField residual_nhnse(const ScalarStencil& s) {
    const auto D = detail::scalar_derivs(s, "residual_nhnse");
    CField out(s.grid.n);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const cplx q = s.cur[j];
        const double m = std::norm(q);
        out[j] = I * D.qt[j] - (I / 4.0) * D.qxxx[j] + (1.5 * I) * m * D.qx[j] + 0.5 * D.qxx[j] + I * D.qx[j] +
                 2.0 * q - m * q;
    }
    return out;
}

/// q_t + 6 q q_x + q_xxx.
inline CField residual_kdv(const ScalarStencil& s) {
    const auto D = detail::scalar_derivs(s, "residual_kdv");
    CField out(s.grid.n);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = D.qt[j] + 6.0 * s.cur[j] * D.qx[j] + D.qxxx[j];
    return out;
}

/// q_t + 6 q^2 q_x + q_xxx.
inline CField residual_mkdv(const ScalarStencil& s) {
    const auto D = detail::scalar_derivs(s, "residual_mkdv");
    CField out(s.grid.n);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = D.qt[j] + 6.0 * s.cur[j] * s.cur[j] * D.qx[j] + D.qxxx[j];
    return out;
}

/// i q_t + q_xx + 2 sign |q|^2 q; sign = +1 is the focusing branch (r = -conj q).
inline CField residual_nls(const ScalarStencil& s, int sign = +1) {
    const auto D = detail::scalar_derivs(s, "residual_nls");
    CField out(s.grid.n);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = I * D.qt[j] + D.qxx[j] + 2.0 * sign * std::norm(s.cur[j]) * s.cur[j];
    return out;
}

/// Reduced-equation residual for any named reduction.
inline CField residual_reduced(Reduction k, const ScalarStencil& s) {
    switch (k) {
        case Reduction::nhnse: return residual_nhnse(s);
        case Reduction::kdv: return residual_kdv(s);
        case Reduction::mkdv: return residual_mkdv(s);
        case Reduction::nls: return residual_nls(s, +1);
    }
    return {};
}

/// max over the grid of |U_t - V_x + [U, V]| at the middle snapshot.
inline double zero_curvature_residual(const TimeStencil& s, cplx z, const AknsParams& p) {
    s.validate();
    p.validate();
    const std::size_t n = s.cur.grid.n;
    SpectralDiff d(s.cur.grid);
    const auto [qx, qxx, qxxx] = d.derivatives3(s.cur.q);
    const auto [rx, rxx, rxxx] = d.derivatives3(s.cur.r);
    const CField qt = detail::centered_dt(s.prev.q, s.next.q, s.dt);
    const CField rt = detail::centered_dt(s.prev.r, s.next.r, s.dt);

    std::vector<LaxMatrices> lax(n);
    std::array<CField, 4> ventries;
    for (auto& e : ventries) e.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        lax[j] = lax_matrices({s.cur.q[j], qx[j], qxx[j], s.cur.r[j], rx[j], rxx[j]}, z, p);
        for (std::size_t e = 0; e < 4; ++e) ventries[e][j] = lax[j].V.a[e];
    }
    std::array<CField, 4> vx;
    for (std::size_t e = 0; e < 4; ++e) vx[e] = d.derivative(ventries[e], 1);

    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const Mat2 Ut = Mat2::offdiag(qt[j], rt[j]);
        const Mat2 Vx(vx[0][j], vx[1][j], vx[2][j], vx[3][j]);
        const Mat2 res = Ut - Vx + commutator(lax[j].U, lax[j].V);
        worst = std::max(worst, res.max_abs());
    }
    return worst;
}

}  // namespace nhnse
