#include "egdlab/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace egdlab::exp {

namespace {

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string render_svg(const PlotSpec& spec, const std::vector<Curve>& curves) {
    const double left = 64, right = 150, top = 36, bottom = 48;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;

    auto tx = [&](double x) { return spec.log_x ? std::log10(x + 1.0) : x; };
    double x_lo = 0.0, x_hi = 1.0;
    bool any = false;
    for (const auto& c : curves) {
        for (double x : c.x) {
            const double v = tx(x);
            if (!std::isfinite(v)) continue;
            x_lo = any ? std::min(x_lo, v) : v;
            x_hi = any ? std::max(x_hi, v) : v;
            any = true;
        }
    }
    if (spec.log_x) {
        x_lo = std::floor(x_lo);
        x_hi = std::max(std::ceil(x_hi), x_lo + 1.0);
    } else if (x_hi <= x_lo) {
        x_hi = x_lo + 1.0;
    }
    const double y_span = spec.y_max > spec.y_min ? spec.y_max - spec.y_min : 1.0;
    auto px = [&](double x) { return left + (tx(x) - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) { return top + (1.0 - (std::clamp(y, spec.y_min, spec.y_max) - spec.y_min) / y_span) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
       << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    // x ticks: decades on a log axis, five even steps otherwise
    const int nx = spec.log_x ? static_cast<int>(x_hi - x_lo) : 5;
    for (int i = 0; i <= nx; ++i) {
        const double t = x_lo + (x_hi - x_lo) * i / nx;
        const double x = left + (t - x_lo) / (x_hi - x_lo) * pw;
        const std::string label = spec.log_x ? "1e" + num(t) : num(t);
        os << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x << "\" y2=\"" << top + ph + 5
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << label << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double v = spec.y_min + y_span * i / 5.0;
        const double y = py(v);
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 10 << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << (spec.log_x ? " + 1 (log)" : "") << "</text>\n";
    os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << top + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& c = curves[ci];
        const char* color = kPalette[static_cast<std::size_t>(c.color) % kPalette.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
           << (c.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        for (std::size_t i = 0; i < std::min(c.x.size(), c.y.size()); ++i) {
            if (!std::isfinite(tx(c.x[i])) || !std::isfinite(c.y[i])) continue;
            os << num(px(c.x[i])) << ',' << num(py(c.y[i])) << ' ';
        }
        os << "\"/>\n";
        const double ly = top + 14 + 18 * static_cast<double>(ci);
        const double lx = left + pw + 10;
        os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly << "\" stroke=\""
           << color << "\" stroke-width=\"1.5\"" << (c.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        os << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << escape(c.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace egdlab::exp
