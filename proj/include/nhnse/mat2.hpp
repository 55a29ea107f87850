#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "nhnse/grid.hpp"

namespace nhnse {

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> a{};

    Mat2() = default;
    Mat2(cplx a00, cplx a01, cplx a10, cplx a11) : a{a00, a01, a10, a11} {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 sigma3() { return {1.0, 0.0, 0.0, -1.0}; }
    static Mat2 offdiag(cplx upper, cplx lower) { return {0.0, upper, lower, 0.0}; }

    cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(2 * i + j)]; }
    cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(2 * i + j)]; }

    cplx trace() const { return a[0] + a[3]; }
    cplx det() const { return a[0] * a[3] - a[1] * a[2]; }

    double max_abs() const {
        double m = 0.0;
        for (auto v : a) m = std::max(m, std::abs(v));
        return m;
    }

    Mat2& operator+=(const Mat2& o) {
        for (std::size_t i = 0; i < 4; ++i) a[i] += o.a[i];
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        for (std::size_t i = 0; i < 4; ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat2& operator*=(cplx s) {
        for (auto& v : a) v *= s;
        return *this;
    }
};

inline Mat2 operator+(Mat2 x, const Mat2& y) { return x += y; }
inline Mat2 operator-(Mat2 x, const Mat2& y) { return x -= y; }
inline Mat2 operator-(Mat2 x) { return x *= -1.0; }
inline Mat2 operator*(Mat2 x, cplx s) { return x *= s; }
inline Mat2 operator*(cplx s, Mat2 x) { return x *= s; }
inline Mat2 operator*(Mat2 x, double s) { return x *= cplx(s); }
inline Mat2 operator*(double s, Mat2 x) { return x *= cplx(s); }

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x(0, 0) * y(0, 0) + x(0, 1) * y(1, 0), x(0, 0) * y(0, 1) + x(0, 1) * y(1, 1),
            x(1, 0) * y(0, 0) + x(1, 1) * y(1, 0), x(1, 0) * y(0, 1) + x(1, 1) * y(1, 1)};
}

inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

}  // namespace nhnse
