#ifndef HERDLENS_SVG_HPP
#define HERDLENS_SVG_HPP

#include "herdlens/matrix.hpp"

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace herdlens {

inline constexpr int kCanvasWidth = 800;
inline constexpr int kCanvasHeight = 600;

inline constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

/// Plot-area mapping with a 5% margin around the data bounds. A zero-width
/// range is widened to one unit centered on the value.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double pixel_lo = 0.0;
    double pixel_hi = 1.0;

    static Axis fit(double data_min, double data_max, double pixel_lo, double pixel_hi);
    double map(double v) const;
};

/// One circle per row of the first two columns, colored by label modulo the
/// palette. `names` supplies legend text per label; missing labels read
/// "cluster <id>".
std::string scatter_svg(const Matrix& coords, std::span<const int> labels, const std::string& title,
                        const std::map<int, std::string>& names = {});

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// One polyline per series; `markers` draws dashed vertical lines at the
/// given x positions.
std::string series_svg(const std::vector<Series>& series, const std::string& title,
                       const std::vector<double>& markers = {});

void render_scatter(const Matrix& coords, std::span<const int> labels, const std::string& title,
                    const std::string& path, const std::map<int, std::string>& names = {});

void render_series(const std::vector<Series>& series, const std::string& title, const std::string& path,
                   const std::vector<double>& markers = {});

} // namespace herdlens

#endif
