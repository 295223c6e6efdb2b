// SPDX-License-Identifier: Apache-2.0
#include "occsim/cli/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace occsim::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr int kTicks = 5;
constexpr std::array<const char*, 4> kColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            const double pad = std::abs(lo) > 0.0 ? 0.05 * std::abs(lo) : 0.5;
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

void write_svg_plot(const PlotSpec& spec, std::ostream& out) {
    Range xr;
    Range yr;
    for (const auto& s : spec.series) {
        for (double v : s.x) xr.include(v);
        for (double v : s.y) yr.include(v);
    }
    xr.finish();
    yr.finish();
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    const auto py = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(spec.title) << "</text>\n"
        << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= kTicks; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        const double x = px(xv);
        const double y = py(yv);
        out << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\"" << fixed(x) << "\" y2=\""
            << fixed(kTop + plot_h + 5) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(kTop + plot_h + 19) << "\" text-anchor=\"middle\">"
            << tick_label(xv) << "</text>\n"
            << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
            << fixed(y) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">"
            << tick_label(yv) << "</text>\n";
    }
    out << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 14)
        << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n"
        << "<text x=\"16\" y=\"" << fixed(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fixed(kTop + plot_h / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kColors[k % kColors.size()];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.markers) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << "<circle cx=\"" << fixed(px(s.x[i])) << "\" cy=\"" << fixed(py(s.y[i]))
                    << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            }
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << (first ? "" : " ") << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
                first = false;
            }
            out << "\"/>\n";
        }
        const double ly = kTop + 16 + 16 * static_cast<double>(k);
        out << "<line x1=\"" << fixed(kLeft + plot_w - 150) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\""
            << fixed(kLeft + plot_w - 130) << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << fixed(kLeft + plot_w - 124) << "\" y=\"" << fixed(ly) << "\">" << escape(s.label)
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace occsim::cli
