#ifndef HERDLENS_GRAZE_HPP
#define HERDLENS_GRAZE_HPP

#include "herdlens/bitgrid.hpp"
#include "herdlens/imagery.hpp"
#include "herdlens/interchange.hpp"
#include "herdlens/maskops.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace herdlens {

enum class GreenIndex { ExcessGreen, GreenChannel };

std::string_view to_string(GreenIndex index);
std::optional<GreenIndex> parse_green_index(std::string_view text);

struct GrazeConfig {
    int nose_index = 2;
    double min_conf = 0.3;
    /// Patch side as a fraction of the bbox diagonal.
    double patch_factor = 0.4;
    GreenIndex index = GreenIndex::ExcessGreen;
    int bootstrap_resamples = 1000;
    std::uint64_t seed = 42;
};

/// Square window of side round(factor * diagonal) centered on the nose,
/// clipped to the frame. Throws LowConfidenceNose below `min_conf`.
PatchWindow grazing_patch(const PoseSet& pose, const BBox& box, int frame_width, int frame_height,
                          const GrazeConfig& config = {});

struct GrazeFrameSample {
    std::int64_t frame_index = 0;
    PatchWindow window;
    std::int64_t keep_count = 0;
    /// Mean index over keep pixels; absent when every pixel is occluded.
    std::optional<double> score;

    bool occluded() const noexcept { return !score.has_value(); }
};

double pixel_index(const RgbImage& image, int row, int col, GreenIndex index);

/// `masks` are frame-sized; their union is removed from the window first.
GrazeFrameSample green_score(const RgbImage& image, const PatchWindow& window,
                             std::span<const BitGrid> masks, GreenIndex index = GreenIndex::ExcessGreen);

/// Loads the frame's image or returns nothing when it has none.
using ImageSource = std::function<std::optional<RgbImage>(std::int64_t frame_index)>;

struct GrazeVideoInput {
    VideoData video;
    ImageSource images;
};

/// Image source backed by `<video dir>/imagery/index.json`. Throws
/// MissingImagery when the index is absent.
ImageSource imagery_source(const std::filesystem::path& video_dir);

struct GrazeVideo {
    std::string video_id;
    Social social = Social::Single;
    /// One sample per scored detection, in frame order.
    std::vector<GrazeFrameSample> samples;
    /// Per-frame score (mean over that frame's unoccluded samples).
    std::vector<std::int64_t> frames;
    std::vector<double> series;
    /// series[t] - series[t-1].
    std::vector<double> delta;
    std::optional<double> activity_index;
    std::int64_t skipped_low_confidence = 0;
    std::int64_t occluded = 0;
};

struct GroupSummary {
    Social social = Social::Single;
    std::int64_t videos = 0;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct GrazeReport {
    std::vector<GrazeVideo> videos;
    std::vector<GroupSummary> groups;
};

/// Mean and 95% percentile interval of the mean over seeded resamples.
GroupSummary bootstrap_mean(std::span<const double> values, int resamples, std::uint64_t seed);

/// Throws MissingSocialLabel, MissingImagery.
GrazeReport analyze_grazing(const std::vector<GrazeVideoInput>& inputs, const GrazeConfig& config,
                            std::vector<std::string>* warnings = nullptr);

} // namespace herdlens

#endif
