#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "nhnse/datum.hpp"
#include "nhnse/errors.hpp"
#include "nhnse/interp.hpp"
#include "nhnse/mat2.hpp"
#include "nhnse/parallel.hpp"

namespace nhnse {

/// Full scattering matrix at one real z together with its determinant drift.
struct JostMatrix {
    Mat2 S;
    double det_drift = 0.0;  // |det S - 1|
    cplx s11() const { return S(0, 0); }
    cplx s21() const { return S(1, 0); }
    cplx s12() const { return S(0, 1); }
    cplx s22() const { return S(1, 1); }
};

struct JostColumn {
    cplx s11, s21;
};

namespace detail {

inline constexpr double det_drift_limit = 1e-6;

// psi = exp(-i z x s3) Y turns the x-equation into Y' = A(x) Y with
// A = [[0, q e^{2izx}], [conj(q) e^{-2izx}, 0]], Y(-L/2) = I, S = Y(L/2).
// Classical RK4 with step h on each column.
struct JostIntegrator {
    const InitialDatum& datum;
    const CField& mid;

    std::array<cplx, 2> column(double z, std::array<cplx, 2> y) const {
        const Grid& g = datum.grid();
        const CField& q = datum.samples();
        const double h = g.spacing();
        auto step = [z](cplx qv, double x, const std::array<cplx, 2>& v) {
            const cplx e = std::polar(1.0, 2.0 * z * x);
            return std::array<cplx, 2>{qv * e * v[1], std::conj(qv) * std::conj(e) * v[0]};
        };
        for (std::size_t j = 0; j < g.n; ++j) {
            const double x = g.x(j);
            const cplx q0 = q[j], qm = mid[j], q1 = j + 1 < g.n ? q[j + 1] : q[0];
            const auto k1 = step(q0, x, y);
            const auto k2 = step(qm, x + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
            const auto k3 = step(qm, x + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
            const auto k4 = step(q1, x + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
            for (std::size_t c = 0; c < 2; ++c) y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        return y;
    }
};

}  // namespace detail

/// Scattering matrix at real z from both Jost columns. Throws
/// NumericalGuardError if |det S - 1| exceeds 1e-6 (step too coarse).
inline JostMatrix jost_matrix(const InitialDatum& datum, double z, const CField& mid) {
    if (!std::isfinite(z)) throw InputError("jost: z must be finite");
    detail::JostIntegrator in{datum, mid};
    const auto c1 = in.column(z, {1.0, 0.0});
    const auto c2 = in.column(z, {0.0, 1.0});
    JostMatrix m;
    m.S = Mat2(c1[0], c2[0], c1[1], c2[1]);
    m.det_drift = std::abs(m.S.det() - 1.0);
    if (m.det_drift > detail::det_drift_limit)
        throw NumericalGuardError("jost: det S drift " + std::to_string(m.det_drift) + " at z = " + std::to_string(z) +
                                  "; spatial step too coarse");
    return m;
}

inline JostMatrix jost_matrix(const InitialDatum& datum, double z) {
    return jost_matrix(datum, z, datum.midpoint_samples());
}

/// (s11, s21) at real z: first column of S, integrated from the left edge.
inline JostColumn jost_scattering(const InitialDatum& datum, double z) {
    const auto m = jost_matrix(datum, z);
    return {m.s11(), m.s21()};
}

/// Reflection data r = s21 / s11 on a real z grid.
struct ScatteringData {
    std::vector<double> z;
    CField s11, s21, r;
    double sup_norm_r = 0.0;
    double max_unimodularity_defect = 0.0;  // max | |s11|^2 - |s21|^2 - 1 |
    double max_det_drift = 0.0;
    double end_triviality = 0.0;             // max over the two ends of |s11 - 1| + |s21|

    std::size_t size() const { return z.size(); }

    double unimodularity_defect(std::size_t i) const { return std::norm(s11[i]) - std::norm(s21[i]) - 1.0; }

    LocalCubic<cplx> r_interpolant() const { return LocalCubic<cplx>(z, r, cplx{}); }

    /// CSV with header z,Re s11,Im s11,Re s21,Im s21,Re r,Im r; with
    /// `with_defect` an extra |s11|^2-|s21|^2-1 column is appended.
    void write_csv(std::ostream& os, bool with_defect = false) const {
        os << "z,Re s11,Im s11,Re s21,Im s21,Re r,Im r";
        if (with_defect) os << ",|s11|^2-|s21|^2-1";
        os << '\n' << std::setprecision(17);
        for (std::size_t i = 0; i < size(); ++i) {
            os << z[i] << ',' << s11[i].real() << ',' << s11[i].imag() << ',' << s21[i].real() << ','
               << s21[i].imag() << ',' << r[i].real() << ',' << r[i].imag();
            if (with_defect) os << ',' << unimodularity_defect(i);
            os << '\n';
        }
    }

    static ScatteringData read_csv(std::istream& is) {
        std::string line;
        if (!std::getline(is, line) || line.rfind("z,", 0) != 0) throw InputError("scattering CSV: missing header");
        ScatteringData d;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::vector<double> v;
            std::string cell;
            while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
            if (v.size() < 7) throw InputError("scattering CSV: short row");
            d.z.push_back(v[0]);
            d.s11.emplace_back(v[1], v[2]);
            d.s21.emplace_back(v[3], v[4]);
            d.r.emplace_back(v[5], v[6]);
        }
        d.finalize();
        return d;
    }

    /// Recomputes the summary diagnostics from the samples.
    void finalize() {
        sup_norm_r = 0.0;
        max_unimodularity_defect = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            sup_norm_r = std::max(sup_norm_r, std::abs(r[i]));
            max_unimodularity_defect = std::max(max_unimodularity_defect, std::abs(unimodularity_defect(i)));
        }
        end_triviality = 0.0;
        if (size() > 0) {
            for (std::size_t i : {std::size_t{0}, size() - 1})
                end_triviality = std::max(end_triviality, std::abs(s11[i] - 1.0) + std::abs(s21[i]));
        }
    }

    /// A zero reflection profile on the given grid.
    static ScatteringData zero(std::vector<double> zs) {
        ScatteringData d;
        d.z = std::move(zs);
        d.s11.assign(d.z.size(), 1.0);
        d.s21.assign(d.z.size(), 0.0);
        d.r.assign(d.z.size(), 0.0);
        d.finalize();
        return d;
    }
};

inline std::vector<double> uniform_z_grid(double zmax, std::size_t nodes) {
    if (nodes < 2 || !(zmax > 0.0)) throw InputError("z grid: need zmax > 0 and at least 2 nodes");
    std::vector<double> z(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        z[i] = -zmax + 2.0 * zmax * static_cast<double>(i) / static_cast<double>(nodes - 1);
    return z;
}

struct ReflectionOptions {
    double min_span = 8.0;        // grid must cover [-min_span, min_span]
    double max_node_change = 0.05;  // |r_{i+1} - r_i| limit
    unsigned threads = 1;
};

/// r(z) = s21 / s11 at every node of `zs`. Throws NumericalGuardError if any
/// |r| >= 1 (data outside the solitonless class) and InputError on a bad grid.
inline ScatteringData reflection_coefficient(const InitialDatum& datum, const std::vector<double>& zs,
                                             const ReflectionOptions& opt = {}) {
    if (zs.size() < 2) throw InputError("z grid: need at least 2 nodes");
    for (std::size_t i = 1; i < zs.size(); ++i)
        if (!(zs[i] > zs[i - 1])) throw InputError("z grid must be strictly increasing");
    if (zs.front() > -opt.min_span || zs.back() < opt.min_span)
        throw InputError("z grid must span at least [-" + std::to_string(opt.min_span) + ", " +
                         std::to_string(opt.min_span) + "]");
    ScatteringData d;
    d.z = zs;
    d.s11.resize(zs.size());
    d.s21.resize(zs.size());
    d.r.resize(zs.size());
    std::vector<double> drift(zs.size());
    const CField mid = datum.midpoint_samples();
    parallel_for(zs.size(), opt.threads, [&](std::size_t i) {
        const auto m = jost_matrix(datum, zs[i], mid);
        d.s11[i] = m.s11();
        d.s21[i] = m.s21();
        d.r[i] = m.s21() / m.s11();
        drift[i] = m.det_drift;
    });
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (!(std::abs(d.r[i]) < 1.0))
            throw NumericalGuardError("non-defocusing data: |r| >= 1 at z = " + std::to_string(zs[i]));
        d.max_det_drift = std::max(d.max_det_drift, drift[i]);
        if (i > 0 && std::abs(d.r[i] - d.r[i - 1]) >= opt.max_node_change)
            throw InputError("z grid too coarse: r changes by more than " + std::to_string(opt.max_node_change) +
                             " between nodes near z = " + std::to_string(zs[i]));
    }
    d.finalize();
    return d;
}

struct SymmetryReport {
    double max_s22_deviation = 0.0;  // max |s22 - conj(s11)|
    double max_s12_deviation = 0.0;  // max |s12 - conj(s21)|
    double max_parity_deviation = -1.0;  // max |r(-z) - conj(r(z))|, -1 if not applicable
    double max_unimodularity_defect = 0.0;

    double max_deviation() const {
        return std::max({max_s22_deviation, max_s12_deviation, max_parity_deviation});
    }
};

namespace detail {
inline bool real_even(const InitialDatum& d) {
    const auto& q = d.samples();
    const Grid& g = d.grid();
    if (std::abs(g.origin + 0.5 * g.length) > 1e-12 * g.length) return false;
    for (std::size_t j = 0; j < g.n; ++j) {
        if (q[j].imag() != 0.0) return false;
        const std::size_t m = (g.n - j) % g.n;  // x_m = -x_j on a symmetric periodic grid
        if (std::abs(q[j] - q[m]) > 1e-14 * (1.0 + std::abs(q[j]))) return false;
    }
    return true;
}
}  // namespace detail

/// Checks s22 = conj(s11) and s12 = conj(s21) on real z by integrating the
/// second Jost column, and r(-z) = conj(r(z)) when q0 is real and even.
inline SymmetryReport check_symmetries(const ScatteringData& data, const InitialDatum& datum, unsigned threads = 1) {
    SymmetryReport rep;
    const CField mid = datum.midpoint_samples();
    std::vector<double> d22(data.size()), d12(data.size());
    parallel_for(data.size(), threads, [&](std::size_t i) {
        detail::JostIntegrator in{datum, mid};
        const auto c2 = in.column(data.z[i], {0.0, 1.0});
        d12[i] = std::abs(c2[0] - std::conj(data.s21[i]));
        d22[i] = std::abs(c2[1] - std::conj(data.s11[i]));
    });
    for (std::size_t i = 0; i < data.size(); ++i) {
        rep.max_s12_deviation = std::max(rep.max_s12_deviation, d12[i]);
        rep.max_s22_deviation = std::max(rep.max_s22_deviation, d22[i]);
        rep.max_unimodularity_defect = std::max(rep.max_unimodularity_defect, std::abs(data.unimodularity_defect(i)));
    }
    if (detail::real_even(datum)) {
        rep.max_parity_deviation = 0.0;
        const auto n = data.size();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t m = n - 1 - i;
            if (std::abs(data.z[m] + data.z[i]) > 1e-12 * (1.0 + std::abs(data.z[i]))) {
                rep.max_parity_deviation = -1.0;
                break;
            }
            rep.max_parity_deviation = std::max(rep.max_parity_deviation, std::abs(data.r[m] - std::conj(data.r[i])));
        }
    }
    return rep;
}

}  // namespace nhnse
