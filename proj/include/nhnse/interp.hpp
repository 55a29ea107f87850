#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <span>
#include <vector>

#include "nhnse/errors.hpp"
#include "nhnse/grid.hpp"

namespace nhnse {

/// Piecewise-cubic interpolation through four neighbouring samples on a
/// strictly increasing, possibly non-uniform node set. On the cell
/// [s_i, s_{i+1}] the nodes i-1..i+2 are used (clamped at the ends), so the
/// interpolant is a polynomial inside each cell and continuous across cells.
/// Outside [s_0, s_{n-1}] the interpolant returns `outside`.
template <typename T>
class LocalCubic {
public:
    LocalCubic() = default;
    LocalCubic(std::vector<double> nodes, std::vector<T> values, T outside = T{})
        : s_(std::move(nodes)), v_(std::move(values)), outside_(outside) {
        if (s_.size() != v_.size()) throw InputError("interpolant: nodes/values size mismatch");
        if (s_.size() < 4) throw InputError("interpolant: need at least 4 nodes");
        for (std::size_t i = 1; i < s_.size(); ++i)
            if (!(s_[i] > s_[i - 1])) throw InputError("interpolant: nodes must be strictly increasing");
    }

    const std::vector<double>& nodes() const { return s_; }
    const std::vector<T>& values() const { return v_; }
    double lo() const { return s_.front(); }
    double hi() const { return s_.back(); }
    bool contains(double s) const { return s >= lo() && s <= hi(); }

    /// Index i of the cell [s_i, s_{i+1}] holding s (clamped).
    std::size_t cell(double s) const {
        auto it = std::upper_bound(s_.begin(), s_.end(), s);
        std::size_t i = (it == s_.begin()) ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
        return std::min(i, s_.size() - 2);
    }

    T operator()(double s) const {
        if (!contains(s)) return outside_;
        return eval(s, cell(s), false);
    }

    T derivative(double s) const {
        if (!contains(s)) return T{};
        return eval(s, cell(s), true);
    }

    /// Evaluate the polynomial belonging to cell i at s (s may lie outside the
    /// cell; used by quadrature that integrates cell by cell).
    T eval_cell(double s, std::size_t i) const { return eval(s, i, false); }

    /// (p_i(s) - p_i(x)) / (s - x) for the cell-i polynomial, formed without
    /// subtracting nearly equal values. Equals p_i'(x) when s == x.
    T slope_cell(double s, double x, std::size_t i) const {
        std::size_t first = (i == 0) ? 0 : i - 1;
        first = std::min(first, s_.size() - 4);
        T acc{};
        for (std::size_t a = 0; a < 4; ++a) {
            double denom = 1.0, e1 = 0.0, e2 = 0.0;
            std::array<double, 3> r{};
            std::size_t k = 0;
            for (std::size_t b = 0; b < 4; ++b) {
                if (b == a) continue;
                denom *= (s_[first + a] - s_[first + b]);
                r[k++] = s_[first + b];
            }
            e1 = r[0] + r[1] + r[2];
            e2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
            // divided difference of (y-r0)(y-r1)(y-r2), written around the mean root
            double c = e1 / 3.0;
            double u = s - c, w = x - c;
            double d2 = 3.0 * c * c - 2.0 * e1 * c + e2;  // cubic's slope at c
            double d1 = 3.0 * c - e1;                     // half its curvature at c
            double q = u * u + u * w + w * w + d1 * (u + w) + d2;
            acc += v_[first + a] * (q / denom);
        }
        return acc;
    }

private:
    T eval(double s, std::size_t i, bool deriv) const {
        std::size_t first = (i == 0) ? 0 : i - 1;
        first = std::min(first, s_.size() - 4);
        std::array<double, 4> x{};
        std::array<T, 4> y{};
        for (std::size_t m = 0; m < 4; ++m) {
            x[m] = s_[first + m];
            y[m] = v_[first + m];
        }
        T acc{};
        for (std::size_t a = 0; a < 4; ++a) {
            double denom = 1.0;
            for (std::size_t b = 0; b < 4; ++b)
                if (b != a) denom *= (x[a] - x[b]);
            if (!deriv) {
                double num = 1.0;
                for (std::size_t b = 0; b < 4; ++b)
                    if (b != a) num *= (s - x[b]);
                acc += y[a] * (num / denom);
            } else {
                double num = 0.0;
                for (std::size_t c = 0; c < 4; ++c) {
                    if (c == a) continue;
                    double prod = 1.0;
                    for (std::size_t b = 0; b < 4; ++b)
                        if (b != a && b != c) prod *= (s - x[b]);
                    num += prod;
                }
                acc += y[a] * (num / denom);
            }
        }
        return acc;
    }

    std::vector<double> s_;
    std::vector<T> v_;
    T outside_{};
};

/// Four-point Lagrange interpolation of periodic samples at an arbitrary x.
inline cplx periodic_cubic(std::span<const cplx> f, const Grid& g, double x) {
    const double h = g.spacing();
    const double u = (x - g.origin) / h;
    const double fl = std::floor(u);
    const double frac = u - fl;
    const auto n = static_cast<long long>(g.n);
    auto wrap = [n](long long j) { return static_cast<std::size_t>(((j % n) + n) % n); };
    const long long j0 = static_cast<long long>(fl);
    const double p = frac;
    const double w0 = -p * (p - 1.0) * (p - 2.0) / 6.0;
    const double w1 = (p + 1.0) * (p - 1.0) * (p - 2.0) / 2.0;
    const double w2 = -(p + 1.0) * p * (p - 2.0) / 2.0;
    const double w3 = (p + 1.0) * p * (p - 1.0) / 6.0;
    return w0 * f[wrap(j0 - 1)] + w1 * f[wrap(j0)] + w2 * f[wrap(j0 + 1)] + w3 * f[wrap(j0 + 2)];
}

}  // namespace nhnse
