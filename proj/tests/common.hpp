#pragma once

#include <cmath>
#include <random>

#include "nhnse/nhnse.hpp"

namespace nhnse::testing {

inline double max_abs(const CField& v) {
    double m = 0.0;
    for (auto x : v) m = std::max(m, std::abs(x));
    return m;
}

inline ProfileSpec sech(double amplitude, double phase = 0.0) {
    return {ProfileKind::sech, amplitude, 1.0, 0.0, phase};
}

/// eps = 0.3 sech reflection data shared by the spectral tests.
inline const ScatteringData& sech_data() {
    static const ScatteringData d = [] {
        const InitialDatum q0(Grid(8192, 64.0), sech(0.3));
        ReflectionOptions o;
        o.threads = 2;
        return reflection_coefficient(q0, uniform_z_grid(8.0, 801), o);
    }();
    return d;
}

inline const NuProfile& sech_profile(double xi = 1.2) {
    static const NuProfile p = nu_profile(sech_data(), stationary_points(1.2));
    if (xi != 1.2) throw Error("sech_profile is cached for xi = 1.2 only");
    return p;
}

template <class F>
CField sample(const Grid& g, F&& f) {
    CField q(g.n);
    for (std::size_t j = 0; j < g.n; ++j) q[j] = f(g.x(j));
    return q;
}

}  // namespace nhnse::testing
