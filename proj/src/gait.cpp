#include "herdlens/gait.hpp"

#include "herdlens/maskops.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace herdlens {

std::string_view to_string(ClusterSpace space) {
    return space == ClusterSpace::Embedding ? "embedding" : "features";
}

std::optional<ClusterSpace> parse_cluster_space(std::string_view text) {
    if (text == "embedding") return ClusterSpace::Embedding;
    if (text == "features") return ClusterSpace::Features;
    return std::nullopt;
}

std::optional<GaitVector> pose_to_feature(const PoseSet& pose, const BBox& box, double min_conf,
                                          int min_visible) {
    const double diag = box.diagonal();
    if (!(diag > 0.0) || !std::isfinite(diag)) {
        fail(ErrorCode::DegenerateBBox, "bounding box has zero diagonal");
    }
    int accepted = 0;
    std::size_t anchor = 0;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
        if (pose[k].confidence >= min_conf) {
            if (accepted == 0) anchor = k;
            ++accepted;
        }
    }
    if (accepted < min_visible || accepted == 0) {
        return std::nullopt;
    }
    // Offsets from the first confident keypoint, so a translated pose yields
    // the same intermediate values whenever the subtraction is exact.
    const double ax = pose[anchor].x;
    const double ay = pose[anchor].y;
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& kp : pose) {
        if (kp.confidence >= min_conf) {
            sx += kp.x - ax;
            sy += kp.y - ay;
        }
    }
    const double mx = sx / accepted;
    const double my = sy / accepted;
    GaitVector out{};
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
        if (pose[k].confidence >= min_conf) {
            out[2 * k] = ((pose[k].x - ax) - mx) / diag;
            out[2 * k + 1] = ((pose[k].y - ay) - my) / diag;
        }
    }
    return out;
}

namespace {

std::optional<std::size_t> primary_pose_detection(const FrameRecord& frame) {
    std::optional<std::size_t> best;
    std::int64_t best_area = -1;
    for (std::size_t i = 0; i < frame.detections.size(); ++i) {
        const auto& det = frame.detections[i];
        if (det.keypoints && det.mask) {
            const auto a = area(*det.mask);
            if (a > best_area) {
                best_area = a;
                best = i;
            }
        }
    }
    if (best) {
        return best;
    }
    double best_score = -1.0;
    for (std::size_t i = 0; i < frame.detections.size(); ++i) {
        const auto& det = frame.detections[i];
        if (det.keypoints && det.score > best_score) {
            best_score = det.score;
            best = i;
        }
    }
    return best;
}

} // namespace

std::vector<GaitFeature> extract_gait_features(const std::vector<VideoData>& videos,
                                               const GaitConfig& config,
                                               std::vector<std::string>* warnings) {
    std::vector<GaitFeature> out;
    for (const auto& video : videos) {
        const auto& id = video.manifest.video_id;
        std::int64_t dropped = 0;
        auto push = [&](const FrameRecord& frame, const Detection& det, std::string animal) {
            auto vec = pose_to_feature(*det.keypoints, det.bbox, config.min_conf, config.min_visible);
            if (!vec) {
                ++dropped;
                return;
            }
            out.push_back({std::move(animal), id, frame.frame_index, *vec});
        };
        for (const auto& frame : video.frames) {
            const bool tracked = std::any_of(frame.detections.begin(), frame.detections.end(),
                                             [](const Detection& d) { return d.keypoints && d.track_id; });
            if (tracked) {
                for (const auto& det : frame.detections) {
                    if (det.keypoints && det.track_id) {
                        push(frame, det, id + "#" + std::to_string(*det.track_id));
                    }
                }
            } else if (auto idx = primary_pose_detection(frame)) {
                push(frame, frame.detections[*idx], id);
            }
        }
        if (dropped > 0 && warnings) {
            warnings->push_back("gait: " + id + ": " + std::to_string(dropped) +
                                " poses below the visibility floor were skipped");
        }
    }
    return out;
}

GaitReport analyze_features(std::vector<GaitFeature> features, const GaitConfig& config,
                            std::vector<std::string>* warnings) {
    if (features.size() < static_cast<std::size_t>(std::max(config.cluster.k, 2))) {
        fail(ErrorCode::TooFewFeatures, "only " + std::to_string(features.size()) +
                                            " pose features for k = " + std::to_string(config.cluster.k));
    }
    GaitReport report;
    Matrix data(features.size(), kGaitFeatureSize);
    for (std::size_t i = 0; i < features.size(); ++i) {
        std::copy(features[i].vector.begin(), features[i].vector.end(), data.row(i).begin());
    }
    auto embedded = umap(data, config.embed);
    report.embedding = std::move(embedded.embedding);
    report.spectral_fallback = embedded.spectral_fallback;
    report.effective_neighbors = embedded.effective_neighbors;
    report.epochs = embedded.epochs;
    report.curve = embedded.curve;
    if (warnings && embedded.spectral_fallback) {
        warnings->push_back("gait: fuzzy graph disconnected; random initialization used");
    }
    if (warnings && embedded.effective_neighbors != config.embed.n_neighbors) {
        warnings->push_back("gait: n_neighbors clamped to " + std::to_string(embedded.effective_neighbors));
    }

    const auto distinct = count_distinct_rows(data);
    ClusterConfig cc = config.cluster;
    cc.k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cc.k), distinct));
    if (warnings && cc.k != config.cluster.k) {
        warnings->push_back("gait: k clamped to " + std::to_string(cc.k) + " distinct poses");
    }
    const Matrix& space = config.space == ClusterSpace::Embedding ? report.embedding : data;
    auto clusters = kmeans(space, cc);
    report.labels = clusters.labels;
    report.effective_k = cc.k;
    report.inertia = clusters.inertia;
    report.kmeans_iterations = clusters.iterations;

    std::map<std::string, int> animal_ids;
    for (const auto& f : features) animal_ids.emplace(f.animal_id, 0);
    int next = 0;
    for (auto& [name, idx] : animal_ids) idx = next++;
    std::vector<int> group(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) group[i] = animal_ids.at(features[i].animal_id);
    const auto dist = cluster_distribution(report.labels, group, next, cc.k);
    for (const auto& [name, idx] : animal_ids) {
        const auto& d = dist[static_cast<std::size_t>(idx)];
        report.animals.push_back({name, d.counts, d.dominant, d.dominance, d.total, d.occupied});
    }
    report.features = std::move(features);
    return report;
}

GaitReport analyze_running(const std::vector<VideoData>& videos, const GaitConfig& config,
                           std::vector<std::string>* warnings) {
    return analyze_features(extract_gait_features(videos, config, warnings), config, warnings);
}

} // namespace herdlens
