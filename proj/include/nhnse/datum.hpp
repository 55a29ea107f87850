#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "nhnse/errors.hpp"
#include "nhnse/fft.hpp"
#include "nhnse/grid.hpp"

namespace nhnse {

enum class ProfileKind { sech, gaussian, custom };

inline std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::sech: return "sech";
        case ProfileKind::gaussian: return "gaussian";
        case ProfileKind::custom: return "custom";
    }
    return "?";
}

inline ProfileKind profile_kind_from(const std::string& s) {
    if (s == "sech") return ProfileKind::sech;
    if (s == "gaussian") return ProfileKind::gaussian;
    if (s == "custom") return ProfileKind::custom;
    throw InputError("unknown profile kind '" + s + "'");
}

/// Closed-form profile  A * f((x - x0) / w) * exp(i phase)  with f = sech or
/// exp(-s^2).
struct ProfileSpec {
    ProfileKind kind = ProfileKind::sech;
    double amplitude = 0.0;
    double width = 1.0;
    double center = 0.0;
    double phase = 0.0;

    cplx operator()(double x) const {
        const double s = (x - center) / width;
        double f = 0.0;
        switch (kind) {
            case ProfileKind::sech: f = std::abs(s) > 700.0 ? 0.0 : 1.0 / std::cosh(s); break;
            case ProfileKind::gaussian: f = std::exp(-s * s); break;
            case ProfileKind::custom: throw InputError("custom profile has no closed form");
        }
        return amplitude * f * std::polar(1.0, phase);
    }
};

/// Sampled initial profile q0 on a uniform grid, optionally tagged with its
/// closed form.
class InitialDatum {
public:
    static constexpr double default_decay_tol = 1e-12;

    InitialDatum(const Grid& g, const ProfileSpec& spec, double decay_tol = default_decay_tol)
        : grid_(g), spec_(spec), decay_tol_(decay_tol) {
        if (spec.kind == ProfileKind::custom) throw InputError("use the sample constructor for custom data");
        if (!(spec.width > 0.0)) throw InputError("profile width must be positive");
        if (!std::isfinite(spec.amplitude) || !std::isfinite(spec.center) || !std::isfinite(spec.phase))
            throw InputError("profile parameters must be finite");
        samples_.resize(g.n);
        for (std::size_t j = 0; j < g.n; ++j) samples_[j] = spec(g.x(j));
        validate();
    }

    InitialDatum(const Grid& g, CField samples, double decay_tol = default_decay_tol)
        : grid_(g), samples_(std::move(samples)), decay_tol_(decay_tol) {
        spec_.kind = ProfileKind::custom;
        if (samples_.size() != g.n) throw InputError("datum: sample count does not match grid");
        validate();
    }

    const Grid& grid() const { return grid_; }
    const CField& samples() const { return samples_; }
    ProfileKind kind() const { return spec_.kind; }
    const ProfileSpec& spec() const { return spec_; }
    double decay_tol() const { return decay_tol_; }
    bool has_closed_form() const { return spec_.kind != ProfileKind::custom; }

    /// Same datum multiplied by exp(i phi).
    InitialDatum rotated(double phi) const {
        if (has_closed_form()) {
            ProfileSpec s = spec_;
            s.phase += phi;
            return InitialDatum(grid_, s, decay_tol_);
        }
        CField v = samples_;
        for (auto& x : v) x *= std::polar(1.0, phi);
        return InitialDatum(grid_, std::move(v), decay_tol_);
    }

    bool is_zero() const {
        for (auto v : samples_)
            if (v != cplx{}) return false;
        return true;
    }

    double sup_norm() const {
        double m = 0.0;
        for (auto v : samples_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Midpoint values q0(x_j + h/2): closed form when available, otherwise a
    /// spectral half-cell shift.
    CField midpoint_samples() const {
        CField out(grid_.n);
        const double h = grid_.spacing();
        if (has_closed_form()) {
            for (std::size_t j = 0; j < grid_.n; ++j) out[j] = spec_(grid_.x(j) + 0.5 * h);
            return out;
        }
        FFT fft(grid_.n);
        CField fh = fft.forward(samples_);
        for (std::size_t j = 0; j < grid_.n; ++j) {
            if (j == grid_.n / 2) {
                fh[j] *= std::cos(grid_.wavenumber(j) * 0.5 * h);
                continue;
            }
            fh[j] *= std::polar(1.0, grid_.wavenumber(j) * 0.5 * h);
        }
        fft.inverse(fh, out);
        return out;
    }

    /// Discrete ||q0||_2, ||q0'||_2 and ||x q0||_2.
    struct Norms {
        double l2, derivative_l2, weighted_l2;
    };
    Norms norms() const {
        const double h = grid_.spacing();
        SpectralDiff d(grid_);
        const CField qx = d.derivative(samples_, 1);
        double a = 0.0, b = 0.0, c = 0.0;
        for (std::size_t j = 0; j < grid_.n; ++j) {
            a += std::norm(samples_[j]);
            b += std::norm(qx[j]);
            c += std::norm(grid_.x(j) * samples_[j]);
        }
        return {std::sqrt(a * h), std::sqrt(b * h), std::sqrt(c * h)};
    }

private:
    void validate() const {
        if (!(decay_tol_ > 0.0)) throw InputError("decay tolerance must be positive");
        for (auto v : samples_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("datum has non-finite samples");
        const double edge = std::max(std::abs(samples_.front()), std::abs(samples_.back()));
        if (edge >= decay_tol_)
            throw InputError("datum does not decay at the domain edges (|q0| = " + std::to_string(edge) + ")");
        const auto n = norms();
        if (!std::isfinite(n.l2) || !std::isfinite(n.derivative_l2) || !std::isfinite(n.weighted_l2))
            throw InputError("datum norms are not finite");
    }

    Grid grid_;
    ProfileSpec spec_;
    CField samples_;
    double decay_tol_;
};

}  // namespace nhnse
