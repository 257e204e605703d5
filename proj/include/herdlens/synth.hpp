#ifndef HERDLENS_SYNTH_HPP
#define HERDLENS_SYNTH_HPP

#include "herdlens/bitgrid.hpp"
#include "herdlens/imagery.hpp"
#include "herdlens/interchange.hpp"
#include "herdlens/matrix.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

/**
 * @file synth.hpp
 *
 * @brief Seeded generators for interchange datasets with exact ground truth.
 *
 * Each generator is a pure function of its spec and seed. The truth document
 * carries every quantity the analyzers are scored against, so tests never
 * re-derive scene geometry.
 */

namespace herdlens {

enum class Scenario { Motion, Blobs, Grazing, Resting, Gait };

std::string_view to_string(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view text);
inline constexpr std::array<Scenario, 5> kScenarios = {Scenario::Motion, Scenario::Blobs, Scenario::Grazing,
                                                       Scenario::Resting, Scenario::Gait};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Pixel (r, c) is set when its center lies inside the axis-aligned ellipse.
void rasterize_ellipse(BitGrid& grid, Vec2 center, double radius_x, double radius_y);

struct MotionSpec {
    std::string video_id = "motion";
    double fps = 30.0;
    int frame_stride = 10;
    int width = 640;
    int height = 480;
    int frames = 20;
    Vec2 start{60.25, 60.75};
    /// Pixels per kept frame at depth scale 1.
    Vec2 velocity{3.0, 4.0};
    double radius_x = 24.0;
    double radius_y = 16.0;
    /// Contiguous equal segments; the remainder joins the last one. A scale
    /// multiplies both the radii and the per-frame displacement.
    std::vector<double> depth_scales{1.0};
    /// Adds a smaller stationary ellipse that largest-mask selection must skip.
    bool distractor = false;
};

struct BlobSpec {
    int k = 10;
    int per_blob = 100;
    int dim = 2;
    double sigma = 0.1;
    double separation = 5.0;
};

struct BlobData {
    Matrix points;
    std::vector<int> labels;
    Matrix centers;
};

struct GrazingSpec {
    int videos_per_group = 3;
    int frames = 8;
    int width = 220;
    int height = 100;
    double fps = 30.0;
    int frame_stride = 10;
    /// Fraction of each patch's width painted green.
    double single_green = 0.8;
    double herd_green = 0.4;
    /// Uniform per-frame perturbation of the green fraction.
    double green_jitter = 0.05;
    int herd_animals = 3;
};

struct RestingSpec {
    int single_frames = 60;
    int herd_frames = 20;
    int herd_animals = 3;
    int single_templates = 1;
    int herd_templates = 5;
    /// Herd template probabilities; empty means uniform.
    std::vector<double> herd_template_weights;
    double flip_noise = 0.01;
    int width = 320;
    int height = 120;
};

struct GaitSpec {
    int animals = 10;
    int templates = 10;
    int frames = 40;
    double sigma = 0.02;
    int width = 320;
    int height = 240;
    double fps = 30.0;
    int frame_stride = 10;
};

struct SynthVideo {
    VideoData video;
    std::map<std::int64_t, RgbImage> images;
};

struct SynthOutput {
    Scenario scenario = Scenario::Motion;
    std::vector<SynthVideo> videos;
    nlohmann::ordered_json truth;
    /// Extra files written verbatim, relative to the output directory.
    std::map<std::string, std::string> files;
};

/// Throws OutOfFrame when the ellipse leaves the frame.
SynthOutput gen_motion(const MotionSpec& spec);
BlobData gen_blob_data(const BlobSpec& spec, std::uint64_t seed);
SynthOutput gen_blobs(const BlobSpec& spec, std::uint64_t seed);
SynthOutput gen_grazing(const GrazingSpec& spec, std::uint64_t seed);
SynthOutput gen_resting(const RestingSpec& spec, std::uint64_t seed);
SynthOutput gen_gait(const GaitSpec& spec, std::uint64_t seed);

/// Dispatches on the scenario with parameters from a JSON object whose keys
/// are the scenario struct field names. Unknown keys throw InvalidArgument.
SynthOutput synthesize(Scenario scenario, const nlohmann::json& params, std::uint64_t seed);

/// Writes `<dir>/<video_id>/{manifest.json, frames.jsonl, imagery/}`,
/// `<dir>/truth.json` and any extra files. Returns the written paths, sorted.
std::vector<std::filesystem::path> write_synth(const SynthOutput& output, const std::filesystem::path& dir);

} // namespace herdlens

#endif
