#include "herdlens/maskops.hpp"

#include <algorithm>
#include <cmath>

namespace herdlens {

PatchWindow clip_window(PatchWindow w, int width, int height) {
    w.x0 = std::clamp(w.x0, 0, width);
    w.x1 = std::clamp(w.x1, 0, width);
    w.y0 = std::clamp(w.y0, 0, height);
    w.y1 = std::clamp(w.y1, 0, height);
    return w;
}

PatchWindow bbox_window(const BBox& box, int width, int height) {
    auto lo = [](double v) { return static_cast<int>(std::clamp(std::floor(v), -1e9, 1e9)); };
    auto hi = [](double v) { return static_cast<int>(std::clamp(std::ceil(v), -1e9, 1e9)); };
    return clip_window({lo(box.x), lo(box.y), hi(box.x + box.w), hi(box.y + box.h)}, width, height);
}

Centroid centroid(const BitGrid& mask) {
    std::int64_t count = 0;
    std::int64_t sum_x = 0;
    std::int64_t sum_y = 0;
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (mask(r, c)) {
                ++count;
                sum_x += c;
                sum_y += r;
            }
        }
    }
    if (count == 0) {
        fail(ErrorCode::EmptyMask, "centroid of an empty mask");
    }
    return {static_cast<double>(sum_x) / static_cast<double>(count),
            static_cast<double>(sum_y) / static_cast<double>(count)};
}

std::int64_t area(const BitGrid& mask) {
    return std::count(mask.bits().begin(), mask.bits().end(), std::uint8_t{1});
}

std::int64_t area(const RleMask& mask) {
    std::uint64_t total = 0;
    for (std::size_t i = 1; i < mask.counts.size(); i += 2) {
        total += mask.counts[i];
    }
    return static_cast<std::int64_t>(total);
}

std::size_t largest_mask(const FrameRecord& frame) {
    std::optional<std::size_t> best;
    std::int64_t best_area = -1;
    for (std::size_t i = 0; i < frame.detections.size(); ++i) {
        const auto& det = frame.detections[i];
        if (!det.mask) {
            continue;
        }
        const auto a = area(*det.mask);
        if (a > best_area) {
            best_area = a;
            best = i;
        }
    }
    if (!best) {
        fail(ErrorCode::NoMasks, "frame " + std::to_string(frame.frame_index) + " has no masks");
    }
    return *best;
}

namespace {

void check_same_shape(const BitGrid& a, const BitGrid& b) {
    if (a.height() != b.height() || a.width() != b.width()) {
        fail(ErrorCode::DimensionMismatch,
             std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
                 std::to_string(b.height()) + "x" + std::to_string(b.width()));
    }
}

} // namespace

BitGrid union_masks(std::span<const BitGrid> masks) {
    if (masks.empty()) {
        return {};
    }
    BitGrid out = masks.front();
    for (const auto& m : masks.subspan(1)) {
        check_same_shape(out, m);
        auto dst = out.bits();
        auto src = m.bits();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] |= src[i];
        }
    }
    return out;
}

BitGrid intersect_masks(const BitGrid& a, const BitGrid& b) {
    check_same_shape(a, b);
    BitGrid out = a;
    auto dst = out.bits();
    auto src = b.bits();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] &= src[i];
    }
    return out;
}

BitGrid patch_minus_masks(const PatchWindow& window, std::span<const BitGrid> masks) {
    if (window.empty()) {
        fail(ErrorCode::InvalidArgument, "patch window is empty");
    }
    BitGrid keep(window.height(), window.width(), true);
    for (const auto& m : masks) {
        // Masks are frame-sized; window pixels outside a mask's extent are uncovered.
        const int r_end = std::min(window.y1, m.height());
        const int c_end = std::min(window.x1, m.width());
        for (int r = std::max(window.y0, 0); r < r_end; ++r) {
            for (int c = std::max(window.x0, 0); c < c_end; ++c) {
                if (m(r, c)) {
                    keep.set(r - window.y0, c - window.x0, false);
                }
            }
        }
    }
    return keep;
}

BitGrid crop(const BitGrid& mask, const PatchWindow& window) {
    const auto w = clip_window(window, mask.width(), mask.height());
    BitGrid out(w.height(), w.width());
    for (int r = 0; r < w.height(); ++r) {
        for (int c = 0; c < w.width(); ++c) {
            out.set(r, c, mask(w.y0 + r, w.x0 + c));
        }
    }
    return out;
}

BitGrid resize_nearest(const BitGrid& mask, int out_height, int out_width) {
    if (out_height < 1 || out_width < 1) {
        fail(ErrorCode::InvalidArgument, "output dimensions must be positive");
    }
    BitGrid out(out_height, out_width);
    if (mask.empty()) {
        return out;
    }
    auto source = [](int i, int src, int dst) {
        // floor((i + 0.5) * src / dst) in exact integer arithmetic.
        const auto num = (2 * static_cast<std::int64_t>(i) + 1) * src;
        return static_cast<int>(std::min<std::int64_t>(num / (2 * static_cast<std::int64_t>(dst)), src - 1));
    };
    std::vector<int> cols(static_cast<std::size_t>(out_width));
    for (int c = 0; c < out_width; ++c) {
        cols[static_cast<std::size_t>(c)] = source(c, mask.width(), out_width);
    }
    for (int r = 0; r < out_height; ++r) {
        const int sr = source(r, mask.height(), out_height);
        for (int c = 0; c < out_width; ++c) {
            out.set(r, c, mask(sr, cols[static_cast<std::size_t>(c)]));
        }
    }
    return out;
}

} // namespace herdlens
