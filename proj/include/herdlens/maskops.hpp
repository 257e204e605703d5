#ifndef HERDLENS_MASKOPS_HPP
#define HERDLENS_MASKOPS_HPP

#include "herdlens/bitgrid.hpp"
#include "herdlens/interchange.hpp"

#include <cstdint>
#include <span>

namespace herdlens {

/// Pixel centers sit at integer coordinates.
struct Centroid {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Centroid&) const = default;
};

/// Half-open integer pixel window, clipped to a frame.
struct PatchWindow {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
    int width() const noexcept { return empty() ? 0 : x1 - x0; }
    int height() const noexcept { return empty() ? 0 : y1 - y0; }
    std::int64_t area() const noexcept { return static_cast<std::int64_t>(width()) * height(); }

    bool operator==(const PatchWindow&) const = default;
};

PatchWindow clip_window(PatchWindow window, int width, int height);

/// Smallest pixel window covering the box (floor of the origin, ceil of the
/// far edge), clipped to the frame.
PatchWindow bbox_window(const BBox& box, int width, int height);

/// Mean column and mean row of the set pixels. Throws EmptyMask.
Centroid centroid(const BitGrid& mask);

std::int64_t area(const BitGrid& mask);

/// Set-pixel count straight from the run lengths (sum of odd-position counts).
std::int64_t area(const RleMask& mask);

/// Detection whose mask covers the most pixels; ties go to the lowest index.
/// Throws NoMasks when no detection carries a mask.
std::size_t largest_mask(const FrameRecord& frame);

/// Pixelwise OR. Throws DimensionMismatch.
BitGrid union_masks(std::span<const BitGrid> masks);

/// Pixelwise AND. Throws DimensionMismatch.
BitGrid intersect_masks(const BitGrid& a, const BitGrid& b);

/// Window-sized keep-mask: 1 where the window pixel lies outside every mask.
BitGrid patch_minus_masks(const PatchWindow& window, std::span<const BitGrid> masks);

BitGrid crop(const BitGrid& mask, const PatchWindow& window);

/// Nearest-neighbour resampling at pixel centers:
/// source index = floor((i + 0.5) * src / out).
BitGrid resize_nearest(const BitGrid& mask, int out_height, int out_width);

} // namespace herdlens

#endif
