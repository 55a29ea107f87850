#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "nhnse/errors.hpp"

namespace nhnse {

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci = 0.0;          // half-width of the confidence interval on the slope
    double confidence = 0.95;
    std::size_t points = 0;
};

/// Least-squares line through (log t, log v) with a Student-t confidence
/// interval on the slope. Requires >= 5 points and positive values.
inline DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v, double confidence = 0.95) {
    if (t.size() != v.size()) throw InputError("fit_decay: size mismatch");
    if (t.size() < 5) throw InputError("fit_decay: need at least 5 points");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InputError("fit_decay: confidence must lie in (0, 1)");
    const std::size_t n = t.size();
    std::vector<double> X(n), Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(t[i] > 0.0) || !(v[i] > 0.0)) throw InputError("fit_decay: times and values must be positive");
        X[i] = std::log(t[i]);
        Y[i] = std::log(v[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
    }
    if (!(sxx > 0.0)) throw InputError("fit_decay: times must not all coincide");
    DecayFit f;
    f.points = n;
    f.confidence = confidence;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = Y[i] - (f.intercept + f.slope * X[i]);
        sse += e * e;
    }
    const double dof = static_cast<double>(n - 2);
    const double se = std::sqrt(sse / dof / sxx);
    boost::math::students_t dist(dof);
    f.ci = boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - confidence))) * se;
    return f;
}

struct Envelope {
    std::vector<double> t, v;
};

/// Upper envelope by a sliding window of width w: for every window
/// [t_i, t_i + w) that fits inside the data, the maximum and its time are
/// kept; repeated maxima are reported once.
inline Envelope sliding_max_envelope(const std::vector<double>& t, const std::vector<double>& v, double w) {
    if (t.size() != v.size()) throw InputError("envelope: size mismatch");
    if (!(w > 0.0)) throw InputError("envelope: window must be positive");
    Envelope e;
    if (t.empty()) return e;
    std::size_t last = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] + w > t.back() + 1e-12) break;
        std::size_t best = i;
        for (std::size_t k = i; k < t.size() && t[k] < t[i] + w - 1e-12; ++k)
            if (v[k] > v[best]) best = k;
        if (best != last) {
            e.t.push_back(t[best]);
            e.v.push_back(v[best]);
            last = best;
        }
    }
    return e;
}

}  // namespace nhnse
