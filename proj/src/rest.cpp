#include "herdlens/rest.hpp"

#include "herdlens/error.hpp"
#include "herdlens/maskops.hpp"

#include <algorithm>
#include <cmath>

namespace herdlens {

std::string_view to_string(RestGroup group) {
    switch (group) {
    case RestGroup::FrontHerd: return "front_herd";
    case RestGroup::SideHerd: return "side_herd";
    case RestGroup::FrontSingle: return "front_single";
    case RestGroup::SideSingle: return "side_single";
    }
    return "front_single";
}

RestGroup rest_group(View view, Social social) {
    if (view == View::Front) {
        return social == Social::Herd ? RestGroup::FrontHerd : RestGroup::FrontSingle;
    }
    return social == Social::Herd ? RestGroup::SideHerd : RestGroup::SideSingle;
}

View view_of(RestGroup group) {
    return group == RestGroup::FrontHerd || group == RestGroup::FrontSingle ? View::Front : View::Side;
}

Social social_of(RestGroup group) {
    return group == RestGroup::FrontHerd || group == RestGroup::SideHerd ? Social::Herd : Social::Single;
}

std::vector<RestSample> extract_rest_samples(const std::vector<VideoData>& videos, int side) {
    if (side < 1) {
        fail(ErrorCode::InvalidArgument, "resize side must be positive");
    }
    std::vector<RestSample> out;
    for (const auto& video : videos) {
        const auto& m = video.manifest;
        if (!m.view) fail(ErrorCode::MissingViewLabel, m.video_id + " has no view label");
        if (!m.social) fail(ErrorCode::MissingSocialLabel, m.video_id + " has no social label");
        const RestGroup group = rest_group(*m.view, *m.social);
        for (const auto& frame : video.frames) {
            for (std::size_t d = 0; d < frame.detections.size(); ++d) {
                const auto& det = frame.detections[d];
                if (!det.mask) {
                    continue;
                }
                const auto window = bbox_window(det.bbox, m.width, m.height);
                if (window.empty()) {
                    continue;
                }
                const auto resized = resize_nearest(crop(decode_rle(*det.mask), window), side, side);
                const auto bits = resized.bits();
                out.push_back({group, m.video_id, frame.frame_index, d, {bits.begin(), bits.end()}});
            }
        }
    }
    return out;
}

double dispersion(const Matrix& coords, std::span<const std::size_t> rows) {
    if (rows.empty()) {
        return 0.0;
    }
    const std::size_t d = coords.cols();
    std::vector<double> mean(d, 0.0);
    for (auto r : rows) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += coords(r, j);
    }
    for (auto& v : mean) v /= static_cast<double>(rows.size());
    double total = 0.0;
    for (auto r : rows) {
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = coords(r, j) - mean[j];
            total += diff * diff;
        }
    }
    return std::sqrt(total / static_cast<double>(rows.size()));
}

RestReport analyze_resting(std::vector<RestSample> samples, const RestConfig& config,
                           std::vector<std::string>* warnings) {
    RestReport report;
    report.samples = std::move(samples);
    const std::size_t dim = static_cast<std::size_t>(config.side) * static_cast<std::size_t>(config.side);
    for (const auto& s : report.samples) {
        if (s.vector.size() != dim) {
            fail(ErrorCode::DimensionMismatch, "rest sample of length " + std::to_string(s.vector.size()) +
                                                   ", expected " + std::to_string(dim));
        }
    }

    for (View view : {View::Front, View::Side}) {
        ViewResult vr;
        vr.view = view;
        for (std::size_t i = 0; i < report.samples.size(); ++i) {
            if (view_of(report.samples[i].group) == view) vr.sample_rows.push_back(i);
        }
        const std::string tag = std::string(to_string(view));
        if (vr.sample_rows.empty()) {
            if (warnings) warnings->push_back("rest: no " + tag + "-view samples; view skipped");
            continue;
        }
        if (vr.sample_rows.size() <= static_cast<std::size_t>(config.embed.n_neighbors)) {
            fail(ErrorCode::TooFewSamples, tag + " view has " + std::to_string(vr.sample_rows.size()) +
                                               " samples; more than n_neighbors = " +
                                               std::to_string(config.embed.n_neighbors) + " are required");
        }
        Matrix data(vr.sample_rows.size(), dim);
        for (std::size_t r = 0; r < vr.sample_rows.size(); ++r) {
            const auto& v = report.samples[vr.sample_rows[r]].vector;
            auto row = data.row(r);
            for (std::size_t j = 0; j < dim; ++j) row[j] = v[j];
        }
        auto embedded = umap(data, config.embed);
        vr.embedding = std::move(embedded.embedding);
        vr.effective_neighbors = embedded.effective_neighbors;
        vr.epochs = embedded.epochs;
        vr.spectral_fallback = embedded.spectral_fallback;
        vr.curve = embedded.curve;
        if (warnings && vr.spectral_fallback) {
            warnings->push_back("rest: " + tag + " fuzzy graph disconnected; random initialization used");
        }

        ClusterConfig cc = config.cluster;
        cc.k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cc.k), count_distinct_rows(data)));
        if (warnings && cc.k != config.cluster.k) {
            warnings->push_back("rest: " + tag + " k clamped to " + std::to_string(cc.k) + " distinct silhouettes");
        }
        auto clusters = kmeans(vr.embedding, cc);
        vr.labels = std::move(clusters.labels);
        vr.effective_k = cc.k;

        std::optional<double> herd;
        std::optional<double> single;
        for (RestGroup g : kRestGroups) {
            if (view_of(g) != view) continue;
            std::vector<std::size_t> rows;
            for (std::size_t r = 0; r < vr.sample_rows.size(); ++r) {
                if (report.samples[vr.sample_rows[r]].group == g) rows.push_back(r);
            }
            if (rows.empty()) {
                continue;
            }
            const double disp = dispersion(vr.embedding, rows);
            vr.groups.push_back({g, static_cast<std::int64_t>(rows.size()), disp});
            (social_of(g) == Social::Herd ? herd : single) = disp;
        }
        if (herd && single && *single > 0.0) {
            vr.ratio = *herd / *single;
        } else if (warnings) {
            warnings->push_back("rest: " + tag + " herd/single ratio undefined");
        }
        report.views.push_back(std::move(vr));
    }
    return report;
}

} // namespace herdlens
