#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qsim/errors.hpp"
#include "qsim/output.hpp"

namespace qsim {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

constexpr std::array<std::array<double, 3>, 5> kRamp = {{
    {0x44, 0x01, 0x54},
    {0x3b, 0x52, 0x8b},
    {0x21, 0x91, 0x8c},
    {0x5e, 0xc9, 0x62},
    {0xfd, 0xe7, 0x25},
}};

std::string fmt(double v, int decimals = 2) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string label_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi == lo) {
            const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
    }
};

std::vector<double> ticks(const Range& r, int target = 6) {
    const double raw = (r.hi - r.lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        step = m * mag;
        if (raw <= step) break;
    }
    std::vector<double> out;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step) {
        out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
}

std::string header(const ChartStyle& style) {
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" fill=\"white\"/>\n";
    if (!style.title.empty()) {
        s += "<text x=\"" + fmt(style.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
             escape(style.title) + "</text>\n";
    }
    return s;
}

struct Frame {
    double left, top, right, bottom;
    double width() const { return right - left; }
    double height() const { return bottom - top; }
};

std::string axes(const Frame& f, const Range& xr, const Range& yr, const ChartStyle& style, bool tick_x = true) {
    std::string s;
    s += "<rect x=\"" + fmt(f.left) + "\" y=\"" + fmt(f.top) + "\" width=\"" + fmt(f.width()) + "\" height=\"" +
         fmt(f.height()) + "\" fill=\"none\" stroke=\"black\"/>\n";
    const auto px = [&](double x) { return f.left + (x - xr.lo) / (xr.hi - xr.lo) * f.width(); };
    const auto py = [&](double y) { return f.bottom - (y - yr.lo) / (yr.hi - yr.lo) * f.height(); };
    if (tick_x) {
        for (double t : ticks(xr)) {
            const double x = px(t);
            s += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(f.bottom) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
                 fmt(f.bottom + 5) + "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(f.bottom + 18) + "\" text-anchor=\"middle\">" +
                 label_number(t) + "</text>\n";
        }
    }
    for (double t : ticks(yr)) {
        const double y = py(t);
        s += "<line x1=\"" + fmt(f.left - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(f.left) + "\" y2=\"" + fmt(y) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(f.left - 8) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" + label_number(t) +
             "</text>\n";
    }
    if (!style.x_label.empty()) {
        s += "<text x=\"" + fmt((f.left + f.right) / 2) + "\" y=\"" + fmt(f.bottom + 38) +
             "\" text-anchor=\"middle\">" + escape(style.x_label) + "</text>\n";
    }
    if (!style.y_label.empty()) {
        const double cx = 18, cy = (f.top + f.bottom) / 2;
        s += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(cy) + "\" text-anchor=\"middle\" transform=\"rotate(-90 " +
             fmt(cx) + " " + fmt(cy) + ")\">" + escape(style.y_label) + "</text>\n";
    }
    return s;
}

}  // namespace

std::string heatmap_color(double unit) {
    const double u = std::clamp(std::isfinite(unit) ? unit : 0.0, 0.0, 1.0) * (kRamp.size() - 1);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(u), kRamp.size() - 2);
    const double w = u - static_cast<double>(k);
    char buf[8];
    const auto channel = [&](int c) {
        return static_cast<int>(std::lround(kRamp[k][c] + w * (kRamp[k + 1][c] - kRamp[k][c])));
    };
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(0), channel(1), channel(2));
    return buf;
}

void write_line_chart(std::span<const Series> series, const ChartStyle& style, const std::filesystem::path& path) {
    if (series.empty()) throw EmptyInputError("line chart needs at least one series");
    Range xr, yr;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty()) {
            throw EmptyInputError("series '" + s.label + "' is empty or has mismatched x/y lengths");
        }
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    xr.settle();
    yr.settle();
    if (yr.lo > 0.0 && yr.lo < 0.25 * yr.hi) yr.lo = 0.0;

    const Frame f{80.0, 40.0, style.width - 190.0, style.height - 60.0};
    std::string svg = header(style) + axes(f, xr, yr, style);
    const auto px = [&](double x) { return f.left + (x - xr.lo) / (xr.hi - xr.lo) * f.width(); };
    const auto py = [&](double y) { return f.bottom - (y - yr.lo) / (yr.hi - yr.lo) * f.height(); };

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % kPalette.size()];
        std::string points;
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
            if (!points.empty()) points += ' ';
            points += fmt(px(s.x[j])) + "," + fmt(py(s.y[j]));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.8\" points=\"" +
               points + "\"/>\n";
        if (style.markers) {
            for (std::size_t j = 0; j < s.x.size(); ++j) {
                if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
                svg += "<circle cx=\"" + fmt(px(s.x[j])) + "\" cy=\"" + fmt(py(s.y[j])) + "\" r=\"3\" fill=\"" +
                       color + "\"/>\n";
            }
        }
        const double ly = f.top + 14.0 + 18.0 * static_cast<double>(k);
        svg += "<line x1=\"" + fmt(f.right + 12) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(f.right + 36) +
               "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(f.right + 42) + "\" y=\"" + fmt(ly) + "\">" + escape(s.label) + "</text>\n";
    }
    svg += "</svg>\n";
    write_text_file(path, svg);
}

void write_heatmap(const SweepGrid& grid, const ChartStyle& style, const std::filesystem::path& path) {
    if (grid.values.empty()) throw EmptyInputError("heatmap needs a non-empty grid");
    Range vr;
    for (double v : grid.values) vr.add(v);
    vr.settle();

    const std::size_t rows = grid.rows();
    const std::size_t cols = grid.cols();
    const Frame f{80.0, 40.0, style.width - 150.0, style.height - 60.0};
    const double cw = f.width() / static_cast<double>(cols);
    const double ch = f.height() / static_cast<double>(rows);

    std::string svg = header(style);
    // axis1 runs along x, axis2 along y (bottom to top).
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = grid.at(i, j);
            const std::string color = std::isfinite(v) ? heatmap_color((v - vr.lo) / (vr.hi - vr.lo)) : "#bbbbbb";
            const double x = f.left + cw * static_cast<double>(i);
            const double y = f.bottom - ch * static_cast<double>(j + 1);
            svg += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(cw + 0.3) + "\" height=\"" +
                   fmt(ch + 0.3) + "\" fill=\"" + color + "\"><title>" + label_number(grid.axis1.values[i]) +
                   (grid.axis2 ? ", " + label_number(grid.axis2->values[j]) : std::string()) + ": " +
                   format_number(v) + "</title></rect>\n";
        }
    }
    svg += "<rect x=\"" + fmt(f.left) + "\" y=\"" + fmt(f.top) + "\" width=\"" + fmt(f.width()) + "\" height=\"" +
           fmt(f.height()) + "\" fill=\"none\" stroke=\"black\"/>\n";
    const std::size_t xstep = std::max<std::size_t>(1, rows / 8);
    for (std::size_t i = 0; i < rows; i += xstep) {
        const double x = f.left + cw * (static_cast<double>(i) + 0.5);
        svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(f.bottom + 18) + "\" text-anchor=\"middle\">" +
               label_number(grid.axis1.values[i]) + "</text>\n";
    }
    if (grid.axis2) {
        const std::size_t ystep = std::max<std::size_t>(1, cols / 8);
        for (std::size_t j = 0; j < cols; j += ystep) {
            const double y = f.bottom - ch * (static_cast<double>(j) + 0.5);
            svg += "<text x=\"" + fmt(f.left - 8) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" +
                   label_number(grid.axis2->values[j]) + "</text>\n";
        }
    }
    const std::string xl = style.x_label.empty() ? grid.axis1.path : style.x_label;
    const std::string yl = style.y_label.empty() ? (grid.axis2 ? grid.axis2->path : "") : style.y_label;
    svg += "<text x=\"" + fmt((f.left + f.right) / 2) + "\" y=\"" + fmt(f.bottom + 38) +
           "\" text-anchor=\"middle\">" + escape(xl) + "</text>\n";
    if (!yl.empty()) {
        const double cx = 18, cy = (f.top + f.bottom) / 2;
        svg += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(cy) + "\" text-anchor=\"middle\" transform=\"rotate(-90 " +
               fmt(cx) + " " + fmt(cy) + ")\">" + escape(yl) + "</text>\n";
    }

    // Colour bar.
    const double bx = f.right + 30, bw = 18;
    constexpr int kSteps = 40;
    for (int k = 0; k < kSteps; ++k) {
        const double u0 = static_cast<double>(k) / kSteps;
        const double y = f.bottom - (u0 + 1.0 / kSteps) * f.height();
        svg += "<rect x=\"" + fmt(bx) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(bw) + "\" height=\"" +
               fmt(f.height() / kSteps + 0.3) + "\" fill=\"" + heatmap_color(u0 + 0.5 / kSteps) + "\"/>\n";
    }
    svg += "<text x=\"" + fmt(bx + bw + 4) + "\" y=\"" + fmt(f.bottom) + "\">" + label_number(vr.lo) + "</text>\n";
    svg += "<text x=\"" + fmt(bx + bw + 4) + "\" y=\"" + fmt(f.top + 8) + "\">" + label_number(vr.hi) + "</text>\n";
    svg += "</svg>\n";
    write_text_file(path, svg);
}

}  // namespace qsim
