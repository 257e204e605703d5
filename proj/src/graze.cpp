#include "herdlens/graze.hpp"

#include "herdlens/error.hpp"
#include "herdlens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace herdlens {

std::string_view to_string(GreenIndex index) {
    return index == GreenIndex::ExcessGreen ? "exg" : "green";
}

std::optional<GreenIndex> parse_green_index(std::string_view text) {
    if (text == "exg") return GreenIndex::ExcessGreen;
    if (text == "green") return GreenIndex::GreenChannel;
    return std::nullopt;
}

PatchWindow grazing_patch(const PoseSet& pose, const BBox& box, int frame_width, int frame_height,
                          const GrazeConfig& config) {
    if (config.nose_index < 0 || config.nose_index >= static_cast<int>(kNumKeypoints)) {
        fail(ErrorCode::InvalidArgument, "nose index out of range");
    }
    const Keypoint& nose = pose[static_cast<std::size_t>(config.nose_index)];
    if (!(nose.confidence >= config.min_conf)) {
        fail(ErrorCode::LowConfidenceNose, "nose confidence " + std::to_string(nose.confidence));
    }
    const long side = std::lround(config.patch_factor * box.diagonal());
    const long x0 = std::lround(nose.x - static_cast<double>(side) / 2.0);
    const long y0 = std::lround(nose.y - static_cast<double>(side) / 2.0);
    PatchWindow window{static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x0 + side),
                       static_cast<int>(y0 + side)};
    return clip_window(window, frame_width, frame_height);
}

double pixel_index(const RgbImage& image, int row, int col, GreenIndex index) {
    const double g = image.g(row, col);
    if (index == GreenIndex::GreenChannel) {
        return g;
    }
    return 2.0 * g - static_cast<double>(image.r(row, col)) - static_cast<double>(image.b(row, col));
}

GrazeFrameSample green_score(const RgbImage& image, const PatchWindow& window,
                             std::span<const BitGrid> masks, GreenIndex index) {
    GrazeFrameSample sample;
    sample.window = window;
    if (window.empty()) {
        return sample;
    }
    if (window.x1 > image.width || window.y1 > image.height || window.x0 < 0 || window.y0 < 0) {
        fail(ErrorCode::DimensionMismatch, "patch window exceeds the image");
    }
    const BitGrid keep = patch_minus_masks(window, masks);
    double total = 0.0;
    for (int r = 0; r < keep.height(); ++r) {
        for (int c = 0; c < keep.width(); ++c) {
            if (keep(r, c)) {
                total += pixel_index(image, window.y0 + r, window.x0 + c, index);
                ++sample.keep_count;
            }
        }
    }
    if (sample.keep_count > 0) {
        sample.score = total / static_cast<double>(sample.keep_count);
    }
    return sample;
}

ImageSource imagery_source(const std::filesystem::path& video_dir) {
    const auto index_path = video_dir / kImageryDir / kImageryIndexFile;
    if (!std::filesystem::exists(index_path)) {
        fail(ErrorCode::MissingImagery, "no imagery index at " + index_path.string());
    }
    auto index = std::make_shared<ImageryIndex>(read_imagery_index(index_path));
    return [index](std::int64_t frame) -> std::optional<RgbImage> {
        const auto it = index->find(frame);
        if (it == index->end()) {
            return std::nullopt;
        }
        return read_ppm(it->second);
    };
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

GrazeVideo score_video(const GrazeVideoInput& input, const GrazeConfig& config,
                       std::vector<std::string>* warnings) {
    const VideoData& data = input.video;
    GrazeVideo out;
    out.video_id = data.manifest.video_id;
    if (!data.manifest.social) {
        fail(ErrorCode::MissingSocialLabel, out.video_id + " has no social label");
    }
    out.social = *data.manifest.social;
    if (!input.images) {
        fail(ErrorCode::MissingImagery, out.video_id + " has no imagery");
    }
    const int width = data.manifest.width;
    const int height = data.manifest.height;

    for (const FrameRecord& frame : data.frames) {
        std::vector<BitGrid> masks;
        for (const Detection& det : frame.detections) {
            if (det.mask) masks.push_back(decode_rle(*det.mask));
        }
        std::optional<RgbImage> image;
        double frame_total = 0.0;
        int frame_count = 0;
        for (const Detection& det : frame.detections) {
            if (!det.keypoints) {
                continue;
            }
            PatchWindow window;
            try {
                window = grazing_patch(*det.keypoints, det.bbox, width, height, config);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::LowConfidenceNose) throw;
                ++out.skipped_low_confidence;
                continue;
            }
            if (!image) {
                image = input.images(frame.frame_index);
                if (!image) {
                    fail(ErrorCode::MissingImagery,
                         out.video_id + " frame " + std::to_string(frame.frame_index) + " has no image");
                }
                if (image->width != width || image->height != height) {
                    fail(ErrorCode::ManifestMismatch,
                         out.video_id + " frame " + std::to_string(frame.frame_index) +
                             " image size differs from the manifest");
                }
            }
            GrazeFrameSample sample = green_score(*image, window, masks, config.index);
            sample.frame_index = frame.frame_index;
            if (sample.occluded()) {
                ++out.occluded;
            } else {
                frame_total += *sample.score;
                ++frame_count;
            }
            out.samples.push_back(sample);
        }
        if (frame_count > 0) {
            out.frames.push_back(frame.frame_index);
            out.series.push_back(frame_total / frame_count);
        }
    }
    for (std::size_t t = 1; t < out.series.size(); ++t) {
        out.delta.push_back(out.series[t] - out.series[t - 1]);
    }
    if (!out.series.empty()) {
        double sum = 0.0;
        for (double v : out.series) sum += v;
        out.activity_index = sum / static_cast<double>(out.series.size());
    }
    if (warnings) {
        if (out.skipped_low_confidence > 0) {
            warnings->push_back("graze: " + out.video_id + ": skipped " +
                                std::to_string(out.skipped_low_confidence) + " detections with low nose confidence");
        }
        if (out.occluded > 0) {
            warnings->push_back("graze: " + out.video_id + ": " + std::to_string(out.occluded) +
                                " fully occluded patches excluded");
        }
        if (!out.activity_index) {
            warnings->push_back("graze: " + out.video_id + ": no scorable frames");
        }
    }
    return out;
}

} // namespace

GroupSummary bootstrap_mean(std::span<const double> values, int resamples, std::uint64_t seed) {
    if (values.empty()) {
        fail(ErrorCode::EmptyGroup, "bootstrap over an empty group");
    }
    if (resamples < 1) {
        fail(ErrorCode::InvalidArgument, "bootstrap needs at least one resample");
    }
    GroupSummary summary;
    summary.videos = static_cast<std::int64_t>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    summary.mean = sum / static_cast<double>(values.size());

    Rng rng(seed);
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            s += values[rng.index(values.size())];
        }
        m = s / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    summary.ci_low = quantile(means, 0.025);
    summary.ci_high = quantile(means, 0.975);
    return summary;
}

GrazeReport analyze_grazing(const std::vector<GrazeVideoInput>& inputs, const GrazeConfig& config,
                            std::vector<std::string>* warnings) {
    GrazeReport report;
    for (const auto& input : inputs) {
        report.videos.push_back(score_video(input, config, warnings));
    }
    for (Social social : {Social::Single, Social::Herd}) {
        std::vector<double> values;
        for (const auto& v : report.videos) {
            if (v.social == social && v.activity_index) values.push_back(*v.activity_index);
        }
        if (values.empty()) {
            if (warnings) {
                warnings->push_back(std::string("graze: no scorable ") + std::string(to_string(social)) + " videos");
            }
            continue;
        }
        // Both groups share a seed so identical inputs give identical intervals.
        GroupSummary g = bootstrap_mean(values, config.bootstrap_resamples, config.seed);
        g.social = social;
        report.groups.push_back(g);
    }
    return report;
}

} // namespace herdlens
