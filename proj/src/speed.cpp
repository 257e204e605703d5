#include "herdlens/speed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace herdlens {

CentroidTrack track_primary_centroids(const VideoData& video) {
    CentroidTrack track;
    for (const auto& frame : video.frames) {
        const bool has_mask = std::any_of(frame.detections.begin(), frame.detections.end(),
                                          [](const Detection& d) { return d.mask.has_value(); });
        if (!has_mask) {
            track.gaps.push_back(frame.frame_index);
            continue;
        }
        const auto idx = largest_mask(frame);
        const auto grid = decode_rle(*frame.detections[idx].mask);
        const auto a = area(grid);
        if (a == 0) {
            track.gaps.push_back(frame.frame_index);
            continue;
        }
        track.points.push_back({frame.frame_index, centroid(grid), a, idx});
    }
    if (track.points.empty()) {
        fail(ErrorCode::NoUsableFrames, video.manifest.video_id + " has no frames with masks");
    }
    return track;
}

std::array<std::optional<double>, 3> tercile_means(const std::vector<double>& series) {
    std::array<std::optional<double>, 3> out;
    const std::size_t third = series.size() / 3;
    const std::size_t bounds[4] = {0, third, 2 * third, series.size()};
    for (std::size_t w = 0; w < 3; ++w) {
        if (bounds[w + 1] > bounds[w]) {
            double sum = 0.0;
            for (std::size_t i = bounds[w]; i < bounds[w + 1]; ++i) sum += series[i];
            out[w] = sum / static_cast<double>(bounds[w + 1] - bounds[w]);
        }
    }
    return out;
}

SpeedProfile compute_speeds(const CentroidTrack& track, double fps, int frame_stride, double exponent) {
    if (!(fps > 0.0) || frame_stride < 1) {
        fail(ErrorCode::InvalidArgument, "fps and frame_stride must be positive");
    }
    const auto& pts = track.points;
    if (pts.size() < 2) {
        fail(ErrorCode::TooFewPoints, "speed needs at least two tracked frames");
    }
    SpeedProfile profile;
    profile.exponent = exponent;
    double area_sum = 0.0;
    for (const auto& p : pts) area_sum += static_cast<double>(p.area);
    profile.reference_area = area_sum / static_cast<double>(pts.size());

    std::vector<double> normalized;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[i + 1];
        SpeedStep step;
        step.frame_index = a.frame_index;
        step.span = b.frame_index - a.frame_index;
        step.t_seconds = static_cast<double>(a.frame_index) * frame_stride / fps;
        const double dx = b.centroid.x - a.centroid.x;
        const double dy = b.centroid.y - a.centroid.y;
        step.raw = std::hypot(dx, dy) * fps / (static_cast<double>(step.span) * frame_stride);
        step.normalized = step.raw * std::pow(profile.reference_area / static_cast<double>(a.area), exponent);
        normalized.push_back(step.normalized);
        profile.steps.push_back(step);
    }
    profile.terciles = tercile_means(normalized);
    return profile;
}

} // namespace herdlens
