#include "herdlens/svg.hpp"

#include "herdlens/error.hpp"
#include "herdlens/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace herdlens {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 640.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 540.0;
constexpr double kLegendX = 660.0;

std::string px(double v) { return format_fixed(v, 2); }

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

const char* color(int label) {
    const auto n = static_cast<int>(kPalette.size());
    return kPalette[static_cast<std::size_t>(((label % n) + n) % n)];
}

std::string header(const std::string& title) {
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(kCanvasWidth) +
         "\" height=\"" + std::to_string(kCanvasHeight) + "\" viewBox=\"0 0 " + std::to_string(kCanvasWidth) + " " +
         std::to_string(kCanvasHeight) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kCanvasWidth) + "\" height=\"" +
         std::to_string(kCanvasHeight) + "\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"" + px(kCanvasWidth / 2.0) + "\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" "
         "text-anchor=\"middle\">" + escape(title) + "</text>\n";
    return s;
}

std::string axes(const Axis& xa, const Axis& ya) {
    std::string s = "<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(kBottom) + "\" x2=\"" + px(kRight) + "\" y2=\"" + px(kBottom) + "\"/>\n";
    s += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(kBottom) + "\" x2=\"" + px(kLeft) + "\" y2=\"" + px(kTop) + "\"/>\n";
    s += "</g>\n";
    auto label = [](double x, double y, const char* anchor, double value) {
        return "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"" +
               anchor + "\">" + format_fixed(value, 3) + "</text>\n";
    };
    s += label(kLeft, kBottom + 18, "start", xa.lo);
    s += label(kRight, kBottom + 18, "end", xa.hi);
    s += label(kLeft - 6, kBottom, "end", ya.lo);
    s += label(kLeft - 6, kTop + 4, "end", ya.hi);
    return s;
}

std::string legend_entry(int row, const char* fill, const std::string& text, bool line) {
    const double y = kTop + 10.0 + 20.0 * row;
    std::string s;
    if (line) {
        s += "<line x1=\"" + px(kLegendX) + "\" y1=\"" + px(y) + "\" x2=\"" + px(kLegendX + 16) + "\" y2=\"" + px(y) +
             "\" stroke=\"" + fill + "\" stroke-width=\"2\"/>\n";
    } else {
        s += "<circle cx=\"" + px(kLegendX + 8) + "\" cy=\"" + px(y) + "\" r=\"5\" fill=\"" + fill + "\"/>\n";
    }
    s += "<text x=\"" + px(kLegendX + 24) + "\" y=\"" + px(y + 4) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape(text) + "</text>\n";
    return s;
}

void check_finite(double v) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "cannot plot a non-finite value");
}

} // namespace

Axis Axis::fit(double data_min, double data_max, double pixel_lo, double pixel_hi) {
    Axis a;
    a.pixel_lo = pixel_lo;
    a.pixel_hi = pixel_hi;
    if (!(data_min <= data_max)) {
        data_min = 0.0;
        data_max = 1.0;
    }
    double span = data_max - data_min;
    if (span == 0.0) {
        data_min -= 0.5;
        data_max += 0.5;
        span = 1.0;
    }
    a.lo = data_min - 0.05 * span;
    a.hi = data_max + 0.05 * span;
    return a;
}

double Axis::map(double v) const { return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo); }

std::string scatter_svg(const Matrix& coords, std::span<const int> labels, const std::string& title,
                        const std::map<int, std::string>& names) {
    if (coords.rows() != labels.size()) {
        fail(ErrorCode::LengthMismatch, "scatter coordinates and labels differ in length");
    }
    if (coords.rows() > 0 && coords.cols() < 2) {
        fail(ErrorCode::DimensionMismatch, "scatter needs two coordinates per point");
    }
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        check_finite(coords(i, 0));
        check_finite(coords(i, 1));
        xmin = std::min(xmin, coords(i, 0));
        xmax = std::max(xmax, coords(i, 0));
        ymin = std::min(ymin, coords(i, 1));
        ymax = std::max(ymax, coords(i, 1));
    }
    const Axis xa = Axis::fit(xmin, xmax, kLeft, kRight);
    const Axis ya = Axis::fit(ymin, ymax, kBottom, kTop);
    std::string s = header(title) + axes(xa, ya);
    s += "<g class=\"points\">\n";
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        s += "<circle cx=\"" + px(xa.map(coords(i, 0))) + "\" cy=\"" + px(ya.map(coords(i, 1))) +
             "\" r=\"3\" fill=\"" + color(labels[i]) + "\" data-label=\"" + std::to_string(labels[i]) + "\"/>\n";
    }
    s += "</g>\n<g class=\"legend\">\n";
    const std::set<int> present(labels.begin(), labels.end());
    int row = 0;
    for (int l : present) {
        const auto it = names.find(l);
        s += legend_entry(row++, color(l), it != names.end() ? it->second : "cluster " + std::to_string(l), false);
    }
    s += "</g>\n</svg>\n";
    return s;
}

std::string series_svg(const std::vector<Series>& series, const std::string& title,
                       const std::vector<double>& markers) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& ser : series) {
        if (ser.x.size() != ser.y.size()) fail(ErrorCode::LengthMismatch, "series x and y differ in length");
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            check_finite(ser.x[i]);
            check_finite(ser.y[i]);
            xmin = std::min(xmin, ser.x[i]);
            xmax = std::max(xmax, ser.x[i]);
            ymin = std::min(ymin, ser.y[i]);
            ymax = std::max(ymax, ser.y[i]);
        }
    }
    const Axis xa = Axis::fit(xmin, xmax, kLeft, kRight);
    const Axis ya = Axis::fit(ymin, ymax, kBottom, kTop);
    std::string s = header(title) + axes(xa, ya);
    for (double m : markers) {
        check_finite(m);
        s += "<line class=\"marker\" x1=\"" + px(xa.map(m)) + "\" y1=\"" + px(kBottom) + "\" x2=\"" + px(xa.map(m)) +
             "\" y2=\"" + px(kTop) + "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color(static_cast<int>(k))) +
             "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            if (i > 0) s += ' ';
            s += px(xa.map(series[k].x[i])) + "," + px(ya.map(series[k].y[i]));
        }
        s += "\"/>\n";
    }
    s += "<g class=\"legend\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        s += legend_entry(static_cast<int>(k), color(static_cast<int>(k)), series[k].name, true);
    }
    s += "</g>\n</svg>\n";
    return s;
}

void render_scatter(const Matrix& coords, std::span<const int> labels, const std::string& title,
                    const std::string& path, const std::map<int, std::string>& names) {
    write_file_atomic(path, scatter_svg(coords, labels, title, names));
}

void render_series(const std::vector<Series>& series, const std::string& title, const std::string& path,
                   const std::vector<double>& markers) {
    write_file_atomic(path, series_svg(series, title, markers));
}

} // namespace herdlens
