#ifndef HERDLENS_GAIT_HPP
#define HERDLENS_GAIT_HPP

#include "herdlens/cluster.hpp"
#include "herdlens/embed.hpp"
#include "herdlens/interchange.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace herdlens {

inline constexpr std::size_t kGaitFeatureSize = 2 * kNumKeypoints;
using GaitVector = std::array<double, kGaitFeatureSize>;

enum class ClusterSpace { Embedding, Features };

std::string_view to_string(ClusterSpace space);
std::optional<ClusterSpace> parse_cluster_space(std::string_view text);

struct GaitConfig {
    EmbeddingConfig embed = [] {
        EmbeddingConfig e;
        e.n_neighbors = 20;
        e.min_dist = 0.1;
        return e;
    }();
    ClusterConfig cluster;
    ClusterSpace space = ClusterSpace::Embedding;
    double min_conf = 0.3;
    int min_visible = 13;
};

struct GaitFeature {
    std::string animal_id;
    std::string video_id;
    std::int64_t frame_index = 0;
    GaitVector vector{};
};

/// Centers the pose on the mean of its confident keypoints and divides by the
/// box diagonal, interleaving (x, y) per keypoint. Keypoints below `min_conf`
/// sit at the mean (zero). Returns nothing when fewer than `min_visible`
/// keypoints are confident. Throws DegenerateBBox for a zero diagonal.
std::optional<GaitVector> pose_to_feature(const PoseSet& pose, const BBox& box, double min_conf,
                                          int min_visible);

/// One feature per frame per animal. Without track ids the animal is the
/// video and the frame's primary detection (largest mask, else highest score)
/// supplies the pose.
std::vector<GaitFeature> extract_gait_features(const std::vector<VideoData>& videos,
                                               const GaitConfig& config,
                                               std::vector<std::string>* warnings = nullptr);

struct AnimalGait {
    std::string animal_id;
    std::vector<std::int64_t> histogram;
    int dominant_cluster = 0;
    double dominance = 0.0;
    std::int64_t feature_count = 0;
    int occupied_clusters = 0;
};

struct GaitReport {
    std::vector<GaitFeature> features;
    Matrix embedding;
    std::vector<int> labels;
    /// k after clamping to the number of distinct pose vectors.
    int effective_k = 0;
    double inertia = 0.0;
    int kmeans_iterations = 0;
    bool spectral_fallback = false;
    int effective_neighbors = 0;
    int epochs = 0;
    CurveParams curve;
    std::vector<AnimalGait> animals;
};

/// Pools features, embeds them, clusters the embedding (or the raw features)
/// and summarizes each animal's cluster spread. Throws TooFewFeatures.
GaitReport analyze_running(const std::vector<VideoData>& videos, const GaitConfig& config,
                           std::vector<std::string>* warnings = nullptr);

GaitReport analyze_features(std::vector<GaitFeature> features, const GaitConfig& config,
                            std::vector<std::string>* warnings = nullptr);

} // namespace herdlens

#endif
