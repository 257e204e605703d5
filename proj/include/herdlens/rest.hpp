#ifndef HERDLENS_REST_HPP
#define HERDLENS_REST_HPP

#include "herdlens/cluster.hpp"
#include "herdlens/embed.hpp"
#include "herdlens/interchange.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace herdlens {

enum class RestGroup { FrontHerd, SideHerd, FrontSingle, SideSingle };

inline constexpr std::array<RestGroup, 4> kRestGroups = {RestGroup::FrontHerd, RestGroup::SideHerd,
                                                         RestGroup::FrontSingle, RestGroup::SideSingle};

std::string_view to_string(RestGroup group);
RestGroup rest_group(View view, Social social);
View view_of(RestGroup group);
Social social_of(RestGroup group);

inline constexpr int kRestSide = 64;

struct RestSample {
    RestGroup group = RestGroup::FrontSingle;
    std::string video_id;
    std::int64_t frame_index = 0;
    std::size_t detection = 0;
    /// Row-major kRestSide x kRestSide silhouette, values 0 or 1.
    std::vector<std::uint8_t> vector;
};

struct RestConfig {
    EmbeddingConfig embed = [] {
        EmbeddingConfig e;
        e.n_neighbors = 50;
        e.min_dist = 0.01;
        return e;
    }();
    ClusterConfig cluster;
    int side = kRestSide;
};

/// Crops each detection mask to its bbox window and resamples it to a
/// side x side grid. Throws MissingViewLabel, MissingSocialLabel.
std::vector<RestSample> extract_rest_samples(const std::vector<VideoData>& videos, int side = kRestSide);

/// RMS Euclidean distance of the rows to their mean.
double dispersion(const Matrix& coords, std::span<const std::size_t> rows);

struct GroupDispersion {
    RestGroup group = RestGroup::FrontSingle;
    std::int64_t samples = 0;
    double dispersion = 0.0;
};

struct ViewResult {
    View view = View::Front;
    /// Indices into RestReport::samples, in embedding row order.
    std::vector<std::size_t> sample_rows;
    Matrix embedding;
    std::vector<int> labels;
    int effective_k = 0;
    int effective_neighbors = 0;
    int epochs = 0;
    bool spectral_fallback = false;
    CurveParams curve;
    std::vector<GroupDispersion> groups;
    /// dispersion(herd) / dispersion(single); absent unless both groups are
    /// present and the single dispersion is positive.
    std::optional<double> ratio;
};

struct RestReport {
    std::vector<RestSample> samples;
    std::vector<ViewResult> views;
};

/// Embeds and clusters each view's pool separately. A view without samples
/// is skipped; a view with samples but no more than n_neighbors of them
/// throws TooFewSamples.
RestReport analyze_resting(std::vector<RestSample> samples, const RestConfig& config,
                           std::vector<std::string>* warnings = nullptr);

} // namespace herdlens

#endif
