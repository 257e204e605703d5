#ifndef HERDLENS_INTERCHANGE_HPP
#define HERDLENS_INTERCHANGE_HPP

#include "herdlens/bitgrid.hpp"
#include "herdlens/error.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

/**
 * @file interchange.hpp
 *
 * @brief File format through which perception outputs enter the engine.
 *
 * A video is a JSON manifest plus a JSON-lines frames file. Masks are
 * uncompressed run-length encodings in row-major scan order whose first run
 * counts zeros.
 */

namespace herdlens {

enum class Activity { Grazing, Running, Sitting };
enum class View { Front, Side };
enum class Social { Single, Herd };

std::string_view to_string(Activity value);
std::string_view to_string(View value);
std::string_view to_string(Social value);
std::optional<Activity> parse_activity(std::string_view text);
std::optional<View> parse_view(std::string_view text);
std::optional<Social> parse_social(std::string_view text);

inline constexpr int kDefaultFrameStride = 10;
inline constexpr std::size_t kNumKeypoints = 17;

struct VideoManifest {
    std::string video_id;
    double fps = 30.0;
    Activity activity = Activity::Running;
    std::optional<View> view;
    std::optional<Social> social;
    /// Source frames advanced per kept frame.
    int frame_stride = kDefaultFrameStride;
    int width = 0;
    int height = 0;

    bool operator==(const VideoManifest&) const = default;
};

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;

    bool operator==(const Keypoint&) const = default;
};

using PoseSet = std::array<Keypoint, kNumKeypoints>;

/// Axis-aligned box, top-left origin, in pixels.
struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double diagonal() const;
    bool operator==(const BBox&) const = default;
};

struct RleMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint64_t> counts;

    bool operator==(const RleMask&) const = default;
};

struct Detection {
    std::optional<std::int64_t> track_id;
    BBox bbox;
    double score = 1.0;
    std::optional<PoseSet> keypoints;
    std::optional<RleMask> mask;

    bool operator==(const Detection&) const = default;
};

struct FrameRecord {
    std::string video_id;
    /// Index in the kept (downsampled) sequence.
    std::int64_t frame_index = 0;
    std::vector<Detection> detections;

    bool operator==(const FrameRecord&) const = default;
};

struct VideoData {
    VideoManifest manifest;
    std::vector<FrameRecord> frames;

    /// Seconds between consecutive kept frames.
    double kept_frame_interval() const { return manifest.frame_stride / manifest.fps; }
};

struct Diagnostic {
    ErrorCode code = ErrorCode::ParseError;
    std::string file;
    /// 1-based line in the frames file; 0 for manifest-level problems.
    std::size_t line = 0;
    std::optional<std::int64_t> frame_index;
    std::string field;
    std::string message;

    std::string to_string() const;
};

struct ReadResult {
    VideoData video;
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return diagnostics.empty(); }
};

/// Throws SumMismatch when the runs do not cover h*w cells and Overflow when a
/// run spills past the end of the grid.
BitGrid decode_rle(const RleMask& mask);

/// Canonical encoding: only the leading count may be zero.
RleMask encode_rle(const BitGrid& grid);

bool is_canonical(const RleMask& mask);

/// Structural and geometric checks of one frame against its manifest.
std::vector<Diagnostic> validate_frame(const FrameRecord& frame, const VideoManifest& manifest);

std::vector<Diagnostic> validate_manifest(const VideoManifest& manifest);

/// Reads and validates a video. Invalid lines are reported and dropped; the
/// remaining frames are returned sorted by frame_index.
ReadResult read_video(const std::filesystem::path& manifest_path,
                      const std::filesystem::path& frames_path);

/// Reads `dir/manifest.json` + `dir/frames.jsonl` and throws on the first
/// diagnostic.
VideoData load_video(const std::filesystem::path& dir);

std::string manifest_to_json(const VideoManifest& manifest);
std::string frame_to_json_line(const FrameRecord& frame);

void write_video(const VideoData& video,
                 const std::filesystem::path& manifest_path,
                 const std::filesystem::path& frames_path);

/// Writes `dir/manifest.json` and `dir/frames.jsonl`.
void write_video_dir(const VideoData& video, const std::filesystem::path& dir);

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kFramesFile = "frames.jsonl";

} // namespace herdlens

#endif
