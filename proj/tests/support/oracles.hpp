// Independent reference implementations used to check the engine. Each one
// takes the most direct route to the answer, never the engine's.

#ifndef HERDLENS_TEST_ORACLES_HPP
#define HERDLENS_TEST_ORACLES_HPP

#include "herdlens/bitgrid.hpp"
#include "herdlens/embed.hpp"
#include "herdlens/matrix.hpp"
#include "herdlens/rng.hpp"

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

// All pairwise distances, fully sorted by (distance, index).
inline std::vector<std::vector<std::pair<double, std::uint32_t>>> knn(const herdlens::Matrix& data, std::size_t k) {
    std::vector<std::vector<std::pair<double, std::uint32_t>>> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        std::vector<std::pair<double, std::uint32_t>> all;
        for (std::size_t j = 0; j < data.rows(); ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < data.cols(); ++c) {
                const double d = data(i, c) - data(j, c);
                s += d * d;
            }
            all.emplace_back(std::sqrt(s), static_cast<std::uint32_t>(j));
        }
        std::sort(all.begin(), all.end());
        all.resize(k);
        out[i] = all;
    }
    return out;
}

struct PixelMean {
    double x = 0.0;
    double y = 0.0;
};

inline PixelMean pixel_mean(const herdlens::BitGrid& g) {
    double sx = 0.0;
    double sy = 0.0;
    double n = 0.0;
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c) {
            if (g(r, c)) {
                sx += c;
                sy += r;
                n += 1.0;
            }
        }
    }
    return {sx / n, sy / n};
}

// Run lengths read straight off the scan order, first run counting zeros.
inline std::vector<std::uint64_t> runs(const herdlens::BitGrid& g) {
    std::vector<std::uint64_t> out;
    bool current = false;
    std::uint64_t len = 0;
    for (auto b : g.bits()) {
        if ((b != 0) != current) {
            out.push_back(len);
            current = !current;
            len = 0;
        }
        ++len;
    }
    out.push_back(len);
    return out;
}

inline herdlens::BitGrid random_grid(int h, int w, double density, herdlens::Rng& rng) {
    herdlens::BitGrid g(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (rng.uniform() < density) g.set(r, c);
        }
    }
    return g;
}

// Nearest-neighbour resampling by sampling each output pixel center in
// continuous source coordinates.
inline herdlens::BitGrid resize(const herdlens::BitGrid& src, int oh, int ow) {
    herdlens::BitGrid out(oh, ow);
    for (int r = 0; r < oh; ++r) {
        const int sr = static_cast<int>(std::floor((r + 0.5) * src.height() / static_cast<double>(oh)));
        for (int c = 0; c < ow; ++c) {
            const int sc = static_cast<int>(std::floor((c + 0.5) * src.width() / static_cast<double>(ow)));
            out.set(r, c, src(sr, sc));
        }
    }
    return out;
}

// Curve parameters from scipy.optimize.curve_fit on the same 300-point grid.
struct FrozenCurve {
    double min_dist;
    double a;
    double b;
};
inline constexpr FrozenCurve kScipyCurves[] = {
    {0.01, 1.8956058664339035, 0.8006378442860499},
    {0.1, 1.5769434602697652, 0.8950608778515733},
};

// Sum of squared residuals of 1 / (1 + a d^(2b)) against the offset
// exponential on the 300-point grid.
inline double curve_sse(double min_dist, double a, double b) {
    double sse = 0.0;
    for (int i = 0; i < 300; ++i) {
        const double d = 3.0 * i / 299.0;
        const double target = d <= min_dist ? 1.0 : std::exp(-(d - min_dist));
        const double model = 1.0 / (1.0 + a * std::pow(d, 2.0 * b));
        sse += (model - target) * (model - target);
    }
    return sse;
}

// Labels of the k nearest embedded neighbours agreeing with the point's own.
inline double knn_purity(const herdlens::Matrix& coords, const std::vector<int>& labels, std::size_t k) {
    const auto nn = knn(coords, k);
    double agree = 0.0;
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        for (const auto& [d, j] : nn[i]) agree += labels[j] == labels[i] ? 1.0 : 0.0;
    }
    return agree / static_cast<double>(coords.rows() * k);
}

} // namespace oracle

#endif
