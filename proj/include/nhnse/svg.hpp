#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nhnse/phase.hpp"

namespace nhnse::svg {

struct Series {
    std::string name;
    std::vector<double> x, y;
    std::string color = "#1f77b4";
    bool dashed = false;
    bool markers = false;
};

struct LinePlot {
    std::string title, xlabel, ylabel;
    bool logx = false, logy = false;
    std::vector<Series> series;
    std::vector<double> vlines;  // vertical guide lines in data coordinates
    int width = 720, height = 480;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

struct Axis {
    double lo, hi;
    bool log;
    double map(double v, double p0, double p1) const {
        const double a = log ? std::log10(lo) : lo, b = log ? std::log10(hi) : hi;
        const double u = log ? std::log10(v) : v;
        return p0 + (u - a) / (b - a) * (p1 - p0);
    }
    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (int e = static_cast<int>(std::floor(std::log10(lo))); e <= static_cast<int>(std::ceil(std::log10(hi))); ++e)
                for (double m : {1.0, 2.0, 5.0}) {
                    const double v = m * std::pow(10.0, e);
                    if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push_back(v);
                }
            return out;
        }
        const double span = hi - lo;
        const double raw = span / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
        return out;
    }
};

inline Axis make_axis(const std::vector<const std::vector<double>*>& data, bool log) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto* d : data)
        for (double v : *d) {
            if (!std::isfinite(v) || (log && v <= 0.0)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!std::isfinite(lo)) {
        lo = log ? 1.0 : 0.0;
        hi = log ? 10.0 : 1.0;
    }
    if (hi == lo) {
        if (log) {
            lo /= 2.0;
            hi *= 2.0;
        } else {
            lo -= 0.5;
            hi += 0.5;
        }
    }
    if (!log) {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

}  // namespace detail

inline std::string render(const LinePlot& p) {
    using detail::num;
    const double L = 80, R = p.width - 20.0, T = 40, B = p.height - 60.0;
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : p.series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    const auto ax = detail::make_axis(xs, p.logx), ay = detail::make_axis(ys, p.logy);
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << p.width << "\" height=\"" << p.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << p.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << detail::esc(p.title)
      << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << R - L << "\" height=\"" << B - T
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : ax.ticks()) {
        const double px = ax.map(v, L, R);
        o << "<line x1=\"" << num(px) << "\" y1=\"" << B << "\" x2=\"" << num(px) << "\" y2=\"" << B + 5
          << "\" stroke=\"black\"/><text x=\"" << num(px) << "\" y=\"" << B + 18 << "\" text-anchor=\"middle\">"
          << num(v) << "</text>\n";
    }
    for (double v : ay.ticks()) {
        const double py = ay.map(v, B, T);
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << L << "\" y2=\"" << num(py)
          << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << num(py + 4)
          << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    for (double v : p.vlines) {
        if (v < ax.lo || v > ax.hi) continue;
        const double px = ax.map(v, L, R);
        o << "<line x1=\"" << num(px) << "\" y1=\"" << T << "\" x2=\"" << num(px) << "\" y2=\"" << B
          << "\" stroke=\"#888\" stroke-dasharray=\"3,3\"/>\n";
    }
    o << "<text x=\"" << (L + R) / 2 << "\" y=\"" << p.height - 20 << "\" text-anchor=\"middle\">"
      << detail::esc(p.xlabel) << "</text>\n";
    o << "<text x=\"18\" y=\"" << (T + B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (T + B) / 2
      << ")\">" << detail::esc(p.ylabel) << "</text>\n";
    int legend_row = 0;
    for (const auto& s : p.series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((p.logx && s.x[i] <= 0.0) || (p.logy && s.y[i] <= 0.0)) continue;
            pts += num(ax.map(s.x[i], L, R)) + "," + num(ay.map(s.y[i], B, T)) + " ";
        }
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts << "\"/>\n";
        if (s.markers) {
            std::istringstream ps(pts);
            std::string xy;
            while (ps >> xy) {
                const auto c = xy.find(',');
                o << "<circle cx=\"" << xy.substr(0, c) << "\" cy=\"" << xy.substr(c + 1) << "\" r=\"2\" fill=\""
                  << s.color << "\"/>\n";
            }
        }
        const double ly = T + 16 + 16 * legend_row++;
        o << "<line x1=\"" << R - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << R - 125 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
          << "/><text x=\"" << R - 120 << "\" y=\"" << ly << "\">" << detail::esc(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Two-colour rendering of sign(Im theta) with the stationary points marked.
inline std::string render_sign_map(const SignMap& m, const std::vector<double>& marks, int width = 640) {
    using detail::num;
    const auto& w = m.window;
    const double aspect = (w.im_max - w.im_min) / (w.re_max - w.re_min);
    const int height = static_cast<int>(width * aspect) + 60;
    const double L = 50, R = width - 10.0, T = 30, B = height - 30.0;
    const double cw = (R - L) / static_cast<double>(m.nx), ch = (B - T) / static_cast<double>(m.ny);
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\" shape-rendering=\"crispEdges\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\">sign of Im theta, xi = " << num(m.xi)
      << " (red +, blue -)</text>\n";
    for (std::size_t k = 0; k < m.ny; ++k) {
        for (std::size_t i = 0; i < m.nx; ++i) {
            const int s = m.at(i, k);
            const char* col = s > 0 ? "#f4a6a6" : (s < 0 ? "#a6c8f4" : "#ffffff");
            o << "<rect x=\"" << num(L + static_cast<double>(i) * cw) << "\" y=\""
              << num(B - static_cast<double>(k + 1) * ch) << "\" width=\"" << num(cw + 0.05) << "\" height=\""
              << num(ch + 0.05) << "\" fill=\"" << col << "\"/>\n";
        }
    }
    auto px = [&](double x) { return L + (x - w.re_min) / (w.re_max - w.re_min) * (R - L); };
    auto py = [&](double y) { return B - (y - w.im_min) / (w.im_max - w.im_min) * (B - T); };
    if (w.im_min < 0.0 && w.im_max > 0.0)
        o << "<line x1=\"" << L << "\" y1=\"" << num(py(0)) << "\" x2=\"" << R << "\" y2=\"" << num(py(0))
          << "\" stroke=\"black\"/>\n";
    for (double z : marks)
        o << "<circle cx=\"" << num(px(z)) << "\" cy=\"" << num(py(0)) << "\" r=\"4\" fill=\"black\"/><text x=\""
          << num(px(z)) << "\" y=\"" << num(py(0) - 8) << "\" text-anchor=\"middle\">" << num(z) << "</text>\n";
    o << "<text x=\"" << L << "\" y=\"" << height - 10 << "\">Re z in [" << num(w.re_min) << ", " << num(w.re_max)
      << "], Im z in [" << num(w.im_min) << ", " << num(w.im_max) << "]</text>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace nhnse::svg
