#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "nhnse/errors.hpp"
#include "nhnse/grid.hpp"

namespace nhnse {

/// theta(z) = z xi - z^3 + z^2 - z - 1.
inline cplx theta(cplx z, double xi) { return ((-z + 1.0) * z + (xi - 1.0)) * z - 1.0; }
inline double theta(double z, double xi) { return ((-z + 1.0) * z + (xi - 1.0)) * z - 1.0; }
inline double theta_prime(double z, double xi) { return xi - 3.0 * z * z + 2.0 * z - 1.0; }
inline cplx theta_prime(cplx z, double xi) { return xi - 3.0 * z * z + 2.0 * z - 1.0; }
inline double theta_second(double z) { return 2.0 - 6.0 * z; }

/// xi below which no real stationary point exists.
inline constexpr double critical_xi = 2.0 / 3.0;

enum class PhaseStatus { valid, degenerate, invalid };

inline std::string to_string(PhaseStatus s) {
    switch (s) {
        case PhaseStatus::valid: return "valid";
        case PhaseStatus::degenerate: return "degenerate";
        case PhaseStatus::invalid: return "invalid";
    }
    return "?";
}

/// Stationary-point geometry of the phase along the ray x = xi t.
/// For a valid context z1 > 1/3 > z2, theta''(z1) < 0 < theta''(z2).
struct PhaseContext {
    double xi = 0.0;
    PhaseStatus status = PhaseStatus::invalid;
    double z1 = 0.0, z2 = 0.0;
    double theta_pp_1 = 0.0, theta_pp_2 = 0.0;
    double theta_1 = 0.0, theta_2 = 0.0;

    bool valid() const { return status == PhaseStatus::valid; }

    double z(int j) const { return j == 1 ? z1 : z2; }
    double theta_pp(int j) const { return j == 1 ? theta_pp_1 : theta_pp_2; }
    double theta_at(int j) const { return j == 1 ? theta_1 : theta_2; }

    void require_valid(const char* what) const {
        if (!valid())
            throw ValidityError(std::string(what) + ": xi = " + std::to_string(xi) + " gives a " + to_string(status) +
                                " stationary-point configuration (need xi > 2/3)");
    }
};

/// Roots of theta'(z) = 0, i.e. z = (1 +- sqrt(3 xi - 2)) / 3. The
/// degenerate and invalid cases are reported through `status`.
inline PhaseContext stationary_points(double xi) {
    if (!std::isfinite(xi)) throw InputError("stationary_points: xi must be finite");
    PhaseContext c;
    c.xi = xi;
    const double disc = 3.0 * xi - 2.0;
    if (disc < 0.0) {
        c.status = PhaseStatus::invalid;
        return c;
    }
    if (disc == 0.0) {
        c.status = PhaseStatus::degenerate;
        c.z1 = c.z2 = 1.0 / 3.0;
        c.theta_1 = c.theta_2 = theta(c.z1, xi);
        return c;
    }
    const double d = std::sqrt(disc);
    c.status = PhaseStatus::valid;
    c.z1 = (1.0 + d) / 3.0;
    c.z2 = (1.0 - d) / 3.0;
    c.theta_pp_1 = -2.0 * d;
    c.theta_pp_2 = 2.0 * d;
    c.theta_1 = theta(c.z1, xi);
    c.theta_2 = theta(c.z2, xi);
    return c;
}

struct Window {
    double re_min = -1.5, re_max = 2.0, im_min = -1.5, im_max = 1.5;
};

/// sign(Im theta) on a rectangular lattice of nx x ny points (row-major in y).
struct SignMap {
    double xi = 0.0;
    Window window;
    std::size_t nx = 0, ny = 0;
    std::vector<std::int8_t> sign;

    double re(std::size_t i) const {
        return window.re_min + (window.re_max - window.re_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
    }
    double im(std::size_t k) const {
        return window.im_min + (window.im_max - window.im_min) * static_cast<double>(k) / static_cast<double>(ny - 1);
    }
    std::int8_t at(std::size_t i, std::size_t k) const { return sign[k * nx + i]; }

    void write_csv(std::ostream& os) const {
        os << "x,y,sign\n";
        os.precision(17);
        for (std::size_t k = 0; k < ny; ++k)
            for (std::size_t i = 0; i < nx; ++i) os << re(i) << ',' << im(k) << ',' << int(at(i, k)) << '\n';
    }
};

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

inline SignMap sign_map(double xi, const Window& w, std::size_t nx, std::size_t ny) {
    if (nx < 2 || ny < 2) throw InputError("sign_map: resolution must be at least 2x2");
    if (!(w.re_max > w.re_min) || !(w.im_max > w.im_min)) throw InputError("sign_map: empty window");
    SignMap m;
    m.xi = xi;
    m.window = w;
    m.nx = nx;
    m.ny = ny;
    m.sign.resize(nx * ny);
    for (std::size_t k = 0; k < ny; ++k)
        for (std::size_t i = 0; i < nx; ++i)
            m.sign[k * nx + i] = static_cast<std::int8_t>(sign_of(theta(cplx(m.re(i), m.im(k)), xi).imag()));
    return m;
}

/// Points on the real axis where the sign of theta' changes, i.e. where the
/// zero set of Im theta crosses the axis transversally.
inline std::vector<double> real_axis_crossings(double xi, double lo, double hi, std::size_t samples = 4001) {
    std::vector<double> out;
    double prev = theta_prime(lo, xi);
    for (std::size_t i = 1; i < samples; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double v = theta_prime(x, xi);
        if (sign_of(v) != sign_of(prev) && sign_of(prev) != 0) {
            double a = x - (hi - lo) / static_cast<double>(samples - 1), b = x;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b);
                (sign_of(theta_prime(m, xi)) == sign_of(theta_prime(a, xi)) ? a : b) = m;
            }
            out.push_back(0.5 * (a + b));
        }
        prev = v;
    }
    return out;
}

/// One ray z_j + e^{i angle} R+ of the deformed contour.
struct Ray {
    int j = 1, k = 1;
    double anchor = 0.0;
    double angle = 0.0;
    cplx at(double s) const { return anchor + std::polar(s, angle); }
};

/// The eight rays leaving the two stationary points at opening angle phi.
struct ContourSet {
    double phi = std::numbers::pi / 4.0;
    std::array<Ray, 8> rays;

    const Ray& ray(int j, int k) const { return rays[static_cast<std::size_t>((j - 1) * 4 + (k - 1))]; }
};

inline ContourSet contour_set(const PhaseContext& c, double phi = std::numbers::pi / 4.0) {
    c.require_valid("contour_set");
    if (!(phi > 0.0) || phi > std::numbers::pi / 4.0 + 1e-15)
        throw InputError("contour_set: opening angle must lie in (0, pi/4]");
    constexpr double pi = std::numbers::pi;
    ContourSet s;
    s.phi = phi;
    s.rays = {Ray{1, 1, c.z1, phi},      Ray{1, 2, c.z1, pi - phi}, Ray{1, 3, c.z1, pi + phi},
              Ray{1, 4, c.z1, -phi},     Ray{2, 1, c.z2, pi - phi}, Ray{2, 2, c.z2, phi},
              Ray{2, 3, c.z2, -phi},     Ray{2, 4, c.z2, pi + phi}};
    return s;
}

/// Meeting point of the inner rays z1 + e^{i(pi - phi)} R+ and z2 + e^{i phi} R+.
inline cplx inner_ray_meeting_point(const ContourSet& s, const PhaseContext& c) {
    const double half = 0.5 * (c.z1 - c.z2);
    return {0.5 * (c.z1 + c.z2), half * std::tan(s.phi)};
}

}  // namespace nhnse
