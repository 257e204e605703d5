#ifndef HERDLENS_SPEED_HPP
#define HERDLENS_SPEED_HPP

#include "herdlens/interchange.hpp"
#include "herdlens/maskops.hpp"

#include <array>
#include <optional>
#include <vector>

namespace herdlens {

struct TrackPoint {
    std::int64_t frame_index = 0;
    Centroid centroid;
    std::int64_t area = 0;
    std::size_t detection = 0;
};

struct CentroidTrack {
    std::vector<TrackPoint> points;
    /// Kept frames without any masked detection.
    std::vector<std::int64_t> gaps;
};

/// Largest-mask centroid and area for every kept frame that has a mask.
/// Throws NoUsableFrames when no frame qualifies.
CentroidTrack track_primary_centroids(const VideoData& video);

inline constexpr double kDefaultNormExponent = 0.5;

struct SpeedStep {
    std::int64_t frame_index = 0;
    /// Kept frames spanned by this step (> 1 across gaps).
    std::int64_t span = 1;
    double t_seconds = 0.0;
    double raw = 0.0;
    double normalized = 0.0;
};

struct SpeedProfile {
    std::vector<SpeedStep> steps;
    double reference_area = 0.0;
    double exponent = kDefaultNormExponent;
    /// Means of the normalized series over its first, middle and last thirds;
    /// a window with no steps has no mean.
    std::array<std::optional<double>, 3> terciles;
};

/// Raw speed v = |dc| * fps / (span * frame_stride); normalized speed
/// v * (A_ref / A_start)^exponent with A_ref the mean tracked area.
/// Throws TooFewPoints for fewer than two tracked frames.
SpeedProfile compute_speeds(const CentroidTrack& track, double fps, int frame_stride,
                            double exponent = kDefaultNormExponent);

/// Contiguous equal thirds; the remainder joins the last window.
std::array<std::optional<double>, 3> tercile_means(const std::vector<double>& series);

} // namespace herdlens

#endif
