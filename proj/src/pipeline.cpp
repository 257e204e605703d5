#include "herdlens/pipeline.hpp"

#include "herdlens/error.hpp"
#include "herdlens/io.hpp"
#include "herdlens/speed.hpp"
#include "herdlens/svg.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace herdlens {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(AnalysisKind kind) {
    switch (kind) {
    case AnalysisKind::Run: return "run";
    case AnalysisKind::Graze: return "graze";
    case AnalysisKind::Rest: return "rest";
    }
    return "run";
}

std::optional<AnalysisKind> parse_analysis_kind(std::string_view text) {
    for (auto k : {AnalysisKind::Run, AnalysisKind::Graze, AnalysisKind::Rest}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

Activity activity_for(AnalysisKind kind) {
    switch (kind) {
    case AnalysisKind::Run: return Activity::Running;
    case AnalysisKind::Graze: return Activity::Grazing;
    case AnalysisKind::Rest: return Activity::Sitting;
    }
    return Activity::Running;
}

const std::vector<std::string>& Params::known_keys() {
    static const std::vector<std::string> keys = {
        "n-neighbors", "min-dist",    "n-epochs",    "learning-rate", "negative-sample-rate", "kmeans-k",
        "kmeans-max-iters", "kmeans-tol", "cluster-space", "frame-stride", "norm-exponent", "min-conf",
        "min-visible", "nose-index",  "patch-factor", "green-index",  "bootstrap",            "resize"};
    return keys;
}

void Params::set(const std::string& key, const std::string& value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        fail(ErrorCode::InvalidArgument, "unknown parameter '" + key + "'");
    }
    values_[key] = value;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        fail(ErrorCode::InvalidArgument, "parameter '" + key + "' has malformed value '" + text + "'");
    }
    return value;
}

class Overrides {
public:
    explicit Overrides(const Params& params) : params_(params) {}

    template <typename T>
    void apply(const char* key, T& target) const {
        const auto it = params_.values().find(key);
        if (it != params_.values().end()) target = parse_number<T>(key, it->second);
    }

    template <typename T>
    void require_range(const char* key, T value, T lo, T hi) const {
        if (!(value >= lo && value <= hi)) {
            fail(ErrorCode::InvalidArgument, std::string("parameter '") + key + "' out of range");
        }
    }

    std::optional<std::string> text(const char* key) const {
        const auto it = params_.values().find(key);
        if (it == params_.values().end()) return std::nullopt;
        return it->second;
    }

private:
    const Params& params_;
};

void apply_embedding(const Overrides& o, EmbeddingConfig& e) {
    o.apply("n-neighbors", e.n_neighbors);
    o.apply("min-dist", e.min_dist);
    o.apply("learning-rate", e.learning_rate);
    o.apply("negative-sample-rate", e.negative_sample_rate);
    if (auto epochs = o.text("n-epochs")) {
        if (*epochs != "auto") {
            e.n_epochs = parse_number<int>("n-epochs", *epochs);
            o.require_range("n-epochs", *e.n_epochs, 0, 100000);
        }
    }
    o.require_range("n-neighbors", e.n_neighbors, 1, 100000);
    o.require_range("min-dist", e.min_dist, 1e-9, 1.0 - 1e-9);
    o.require_range("learning-rate", e.learning_rate, 1e-12, 1e6);
    o.require_range("negative-sample-rate", e.negative_sample_rate, 0, 1000);
}

void apply_kmeans(const Overrides& o, ClusterConfig& c) {
    o.apply("kmeans-k", c.k);
    o.apply("kmeans-max-iters", c.max_iters);
    o.apply("kmeans-tol", c.tol);
    o.require_range("kmeans-k", c.k, 1, 100000);
    o.require_range("kmeans-max-iters", c.max_iters, 1, 1000000);
    o.require_range("kmeans-tol", c.tol, 1e-300, 1e6);
}

json embedding_echo(const EmbeddingConfig& e) {
    json j;
    j["n_neighbors"] = e.n_neighbors;
    j["min_dist"] = e.min_dist;
    j["n_components"] = e.n_components;
    j["metric"] = "euclidean";
    j["n_epochs"] = e.n_epochs ? json(*e.n_epochs) : json("auto");
    j["learning_rate"] = e.learning_rate;
    j["negative_sample_rate"] = e.negative_sample_rate;
    j["seed"] = e.seed;
    return j;
}

json kmeans_echo(const ClusterConfig& c) {
    return {{"k", c.k},
            {"max_iters", c.max_iters},
            {"tol", c.tol},
            {"tol_relative_to", "largest centroid shift over the data's total standard deviation"},
            {"seed", c.seed}};
}

json curve_json(const CurveParams& c) { return {{"a", c.a}, {"b", c.b}}; }

std::string safe_name(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        out += ok ? c : '_';
    }
    return out.empty() ? "_" : out;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

struct LoadedVideo {
    fs::path dir;
    VideoData data;
};

std::vector<LoadedVideo> load_matching(AnalysisKind kind, const std::vector<fs::path>& inputs,
                                       std::vector<std::string>& warnings) {
    const auto dirs = find_videos(inputs);
    if (dirs.empty()) {
        fail(ErrorCode::InvalidArgument, "no videos found under the inputs");
    }
    std::vector<LoadedVideo> videos;
    for (const auto& dir : dirs) {
        VideoData v = load_video(dir);
        if (v.manifest.activity != activity_for(kind)) {
            warnings.push_back("skipped " + v.manifest.video_id + " (activity " +
                               std::string(to_string(v.manifest.activity)) + ")");
            continue;
        }
        videos.push_back({dir, std::move(v)});
    }
    std::stable_sort(videos.begin(), videos.end(), [](const LoadedVideo& a, const LoadedVideo& b) {
        return a.data.manifest.video_id < b.data.manifest.video_id;
    });
    for (std::size_t i = 1; i < videos.size(); ++i) {
        if (videos[i].data.manifest.video_id == videos[i - 1].data.manifest.video_id) {
            fail(ErrorCode::InvalidArgument, "duplicate video_id " + videos[i].data.manifest.video_id);
        }
    }
    if (videos.empty()) {
        fail(ErrorCode::NoUsableFrames,
             "no " + std::string(to_string(activity_for(kind))) + " videos among the inputs");
    }
    return videos;
}

void run_section(const std::vector<LoadedVideo>& videos, const AnalysisSettings& s, AnalysisOutput& out,
                 std::vector<std::string>& warnings) {
    // Speed per video.
    json speed_videos = json::array();
    for (const auto& lv : videos) {
        const auto& m = lv.data.manifest;
        CentroidTrack track;
        try {
            track = track_primary_centroids(lv.data);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoUsableFrames) throw;
            warnings.push_back("speed: " + m.video_id + " has no masked frames; skipped");
            continue;
        }
        if (track.points.size() < 2) {
            warnings.push_back("speed: " + m.video_id + " has fewer than two tracked frames; skipped");
            continue;
        }
        if (!track.gaps.empty()) {
            warnings.push_back("speed: " + m.video_id + ": " + std::to_string(track.gaps.size()) +
                               " kept frames without masks bridged");
        }
        const int stride = s.run.frame_stride.value_or(m.frame_stride);
        const SpeedProfile profile = compute_speeds(track, m.fps, stride, s.run.norm_exponent);

        const std::string base = safe_name(m.video_id);
        const std::string csv_path = "series/speed_" + base + ".csv";
        const std::string plot_path = "plots/speed_" + base + ".svg";
        std::string csv = "video_id,step_index,t_seconds,raw_px_per_s,normalized\n";
        Series raw{"raw px/s", {}, {}};
        Series norm{"normalized", {}, {}};
        double sum_raw = 0.0;
        double sum_norm = 0.0;
        for (std::size_t i = 0; i < profile.steps.size(); ++i) {
            const auto& st = profile.steps[i];
            csv += csv_field(m.video_id) + "," + std::to_string(i) + "," + format_real(st.t_seconds) + "," +
                   format_real(st.raw) + "," + format_real(st.normalized) + "\n";
            raw.x.push_back(st.t_seconds);
            raw.y.push_back(st.raw);
            norm.x.push_back(st.t_seconds);
            norm.y.push_back(st.normalized);
            sum_raw += st.raw;
            sum_norm += st.normalized;
        }
        const std::size_t n = profile.steps.size();
        std::vector<double> markers;
        const std::size_t third = n / 3;
        if (third > 0) {
            markers = {profile.steps[third].t_seconds, profile.steps[2 * third].t_seconds};
        }
        out.files[csv_path] = csv;
        out.files[plot_path] = series_svg({raw, norm}, "Speed profile: " + m.video_id, markers);

        json terciles = json::object();
        const char* names[3] = {"commencement", "midpoint", "conclusion"};
        for (std::size_t w = 0; w < 3; ++w) {
            if (profile.terciles[w]) terciles[names[w]] = *profile.terciles[w];
        }
        speed_videos.push_back({{"video_id", m.video_id},
                                {"fps", m.fps},
                                {"frame_stride", stride},
                                {"tracked_frames", track.points.size()},
                                {"gap_frames", track.gaps},
                                {"reference_area", profile.reference_area},
                                {"exponent", profile.exponent},
                                {"steps", n},
                                {"mean_raw", sum_raw / static_cast<double>(n)},
                                {"mean_normalized", sum_norm / static_cast<double>(n)},
                                {"terciles", terciles},
                                {"series_csv", csv_path},
                                {"plot", plot_path}});
    }
    if (!speed_videos.empty()) {
        out.report.speed = json{{"videos", speed_videos}};
    } else {
        warnings.push_back("speed: no video produced a speed profile");
    }

    // Gait over the pooled poses.
    std::vector<VideoData> data;
    for (const auto& lv : videos) data.push_back(lv.data);
    auto features = extract_gait_features(data, s.run.gait, &warnings);
    if (features.empty()) {
        warnings.push_back("gait: no usable poses; section omitted");
    } else {
        const GaitReport g = analyze_features(std::move(features), s.run.gait, &warnings);
        std::string csv = "point_id,animal_id,frame_index,cluster,x,y\n";
        for (std::size_t i = 0; i < g.features.size(); ++i) {
            const auto& f = g.features[i];
            csv += std::to_string(i) + "," + csv_field(f.animal_id) + "," + std::to_string(f.frame_index) + "," +
                   std::to_string(g.labels[i]) + "," + format_real(g.embedding(i, 0)) + "," +
                   format_real(g.embedding(i, 1)) + "\n";
        }
        out.files["embeddings/gait.csv"] = csv;
        out.files["plots/gait_embedding.svg"] = scatter_svg(g.embedding, g.labels, "Gait embedding");
        json animals = json::array();
        for (const auto& a : g.animals) {
            animals.push_back({{"animal_id", a.animal_id},
                               {"features", a.feature_count},
                               {"histogram", a.histogram},
                               {"dominant_cluster", a.dominant_cluster},
                               {"dominance", a.dominance},
                               {"occupied_clusters", a.occupied_clusters}});
        }
        out.report.gait = json{{"features", g.features.size()},
                               {"effective_k", g.effective_k},
                               {"effective_neighbors", g.effective_neighbors},
                               {"epochs", g.epochs},
                               {"spectral_fallback", g.spectral_fallback},
                               {"curve", curve_json(g.curve)},
                               {"inertia", g.inertia},
                               {"kmeans_iterations", g.kmeans_iterations},
                               {"animals", animals},
                               {"embedding_csv", "embeddings/gait.csv"},
                               {"plot", "plots/gait_embedding.svg"}};
    }
    if (!out.report.speed && !out.report.gait) {
        fail(ErrorCode::NoUsableFrames, "no running video yielded speed or gait results");
    }
}

void graze_section(const std::vector<LoadedVideo>& videos, const AnalysisSettings& s, AnalysisOutput& out,
                   std::vector<std::string>& warnings) {
    std::vector<GrazeVideoInput> inputs;
    for (const auto& lv : videos) {
        if (!lv.data.manifest.social) {
            fail(ErrorCode::MissingSocialLabel, lv.data.manifest.video_id + " has no social label");
        }
        inputs.push_back({lv.data, imagery_source(lv.dir)});
    }
    const GrazeReport r = analyze_grazing(inputs, s.graze, &warnings);
    json vids = json::array();
    std::vector<Series> plot;
    for (const auto& v : r.videos) {
        const std::string csv_path = "series/graze_" + safe_name(v.video_id) + ".csv";
        std::string csv = "video_id,frame_index,score,delta\n";
        Series ser{v.video_id + " (" + std::string(to_string(v.social)) + ")", {}, {}};
        for (std::size_t i = 0; i < v.series.size(); ++i) {
            csv += csv_field(v.video_id) + "," + std::to_string(v.frames[i]) + "," + format_real(v.series[i]) + "," +
                   (i == 0 ? std::string() : format_real(v.delta[i - 1])) + "\n";
            ser.x.push_back(static_cast<double>(v.frames[i]));
            ser.y.push_back(v.series[i]);
        }
        out.files[csv_path] = csv;
        plot.push_back(std::move(ser));
        json entry = {{"video_id", v.video_id},
                      {"social", std::string(to_string(v.social))},
                      {"scored_frames", v.series.size()},
                      {"samples", v.samples.size()},
                      {"occluded", v.occluded},
                      {"skipped_low_confidence", v.skipped_low_confidence},
                      {"series", v.series},
                      {"delta", v.delta},
                      {"series_csv", csv_path}};
        if (v.activity_index) entry["activity_index"] = *v.activity_index;
        vids.push_back(entry);
    }
    json groups = json::array();
    for (const auto& g : r.groups) {
        groups.push_back({{"social", std::string(to_string(g.social))},
                          {"videos", g.videos},
                          {"mean", g.mean},
                          {"ci_low", g.ci_low},
                          {"ci_high", g.ci_high}});
    }
    out.files["plots/graze_series.svg"] = series_svg(plot, "Green score per frame");
    out.report.graze = json{{"videos", vids}, {"groups", groups}, {"plot", "plots/graze_series.svg"}};
}

void rest_section(const std::vector<LoadedVideo>& videos, const AnalysisSettings& s, AnalysisOutput& out,
                  std::vector<std::string>& warnings) {
    std::vector<VideoData> data;
    for (const auto& lv : videos) data.push_back(lv.data);
    const RestReport r = analyze_resting(extract_rest_samples(data, s.rest.side), s.rest, &warnings);
    json views = json::array();
    for (const auto& v : r.views) {
        const std::string tag = std::string(to_string(v.view));
        const std::string csv_path = "embeddings/rest_" + tag + ".csv";
        const std::string plot_path = "plots/rest_" + tag + ".svg";
        std::string csv = "point_id,video_id,frame_index,detection,group,cluster,x,y\n";
        std::vector<int> group_ids;
        for (std::size_t row = 0; row < v.sample_rows.size(); ++row) {
            const auto& smp = r.samples[v.sample_rows[row]];
            csv += std::to_string(v.sample_rows[row]) + "," + csv_field(smp.video_id) + "," +
                   std::to_string(smp.frame_index) + "," + std::to_string(smp.detection) + "," +
                   std::string(to_string(smp.group)) + "," + std::to_string(v.labels[row]) + "," +
                   format_real(v.embedding(row, 0)) + "," + format_real(v.embedding(row, 1)) + "\n";
            group_ids.push_back(static_cast<int>(smp.group));
        }
        std::map<int, std::string> names;
        for (RestGroup g : kRestGroups) names[static_cast<int>(g)] = std::string(to_string(g));
        out.files[csv_path] = csv;
        out.files[plot_path] = scatter_svg(v.embedding, group_ids, "Resting silhouettes: " + tag + " view", names);
        json groups = json::array();
        for (const auto& g : v.groups) {
            groups.push_back({{"group", std::string(to_string(g.group))}, {"samples", g.samples}, {"dispersion", g.dispersion}});
        }
        json entry = {{"view", tag},
                      {"samples", v.sample_rows.size()},
                      {"effective_k", v.effective_k},
                      {"effective_neighbors", v.effective_neighbors},
                      {"epochs", v.epochs},
                      {"spectral_fallback", v.spectral_fallback},
                      {"curve", curve_json(v.curve)},
                      {"groups", groups},
                      {"embedding_csv", csv_path},
                      {"plot", plot_path}};
        if (v.ratio) entry["ratio"] = *v.ratio;
        views.push_back(entry);
    }
    if (views.empty()) {
        fail(ErrorCode::TooFewSamples, "no resting samples in any view");
    }
    out.report.rest = json{{"samples", r.samples.size()}, {"views", views}};
}

std::string warning_tag(AnalysisKind kind) { return "[" + std::string(to_string(kind)) + "] "; }

} // namespace

AnalysisSettings resolve_settings(AnalysisKind kind, const Params& params, std::uint64_t seed) {
    AnalysisSettings s;
    s.seed = seed;
    const Overrides o(params);
    switch (kind) {
    case AnalysisKind::Run: {
        auto& g = s.run.gait;
        apply_embedding(o, g.embed);
        apply_kmeans(o, g.cluster);
        if (auto space = o.text("cluster-space")) {
            const auto parsed = parse_cluster_space(*space);
            if (!parsed) fail(ErrorCode::InvalidArgument, "cluster-space must be 'embedding' or 'features'");
            g.space = *parsed;
        }
        o.apply("min-conf", g.min_conf);
        o.apply("min-visible", g.min_visible);
        o.require_range("min-visible", g.min_visible, 0, static_cast<int>(kNumKeypoints));
        o.apply("norm-exponent", s.run.norm_exponent);
        if (o.text("frame-stride")) {
            int stride = 0;
            o.apply("frame-stride", stride);
            o.require_range("frame-stride", stride, 1, 1000000);
            s.run.frame_stride = stride;
        }
        g.embed.seed = seed;
        g.cluster.seed = seed;
        break;
    }
    case AnalysisKind::Graze: {
        auto& g = s.graze;
        o.apply("nose-index", g.nose_index);
        o.require_range("nose-index", g.nose_index, 0, static_cast<int>(kNumKeypoints) - 1);
        o.apply("min-conf", g.min_conf);
        o.apply("patch-factor", g.patch_factor);
        o.require_range("patch-factor", g.patch_factor, 1e-9, 100.0);
        if (auto idx = o.text("green-index")) {
            const auto parsed = parse_green_index(*idx);
            if (!parsed) fail(ErrorCode::InvalidArgument, "green-index must be 'exg' or 'green'");
            g.index = *parsed;
        }
        o.apply("bootstrap", g.bootstrap_resamples);
        o.require_range("bootstrap", g.bootstrap_resamples, 1, 10000000);
        g.seed = seed;
        break;
    }
    case AnalysisKind::Rest: {
        auto& r = s.rest;
        apply_embedding(o, r.embed);
        apply_kmeans(o, r.cluster);
        o.apply("resize", r.side);
        o.require_range("resize", r.side, 1, 1024);
        r.embed.seed = seed;
        r.cluster.seed = seed;
        break;
    }
    }
    // Keys that belong to another analysis would silently do nothing.
    static const std::map<AnalysisKind, std::set<std::string>> accepted = {
        {AnalysisKind::Run,
         {"n-neighbors", "min-dist", "n-epochs", "learning-rate", "negative-sample-rate", "kmeans-k",
          "kmeans-max-iters", "kmeans-tol", "cluster-space", "frame-stride", "norm-exponent", "min-conf",
          "min-visible"}},
        {AnalysisKind::Graze, {"nose-index", "min-conf", "patch-factor", "green-index", "bootstrap"}},
        {AnalysisKind::Rest,
         {"n-neighbors", "min-dist", "n-epochs", "learning-rate", "negative-sample-rate", "kmeans-k",
          "kmeans-max-iters", "kmeans-tol", "resize"}}};
    for (const auto& [key, value] : params.values()) {
        if (!accepted.at(kind).count(key)) {
            fail(ErrorCode::InvalidArgument,
                 "parameter '" + key + "' does not apply to 'analyze " + std::string(to_string(kind)) + "'");
        }
    }
    return s;
}

json settings_echo(AnalysisKind kind, const AnalysisSettings& s) {
    switch (kind) {
    case AnalysisKind::Run:
        return {{"embedding", embedding_echo(s.run.gait.embed)},
                {"kmeans", kmeans_echo(s.run.gait.cluster)},
                {"cluster_space", std::string(to_string(s.run.gait.space))},
                {"min_conf", s.run.gait.min_conf},
                {"min_visible", s.run.gait.min_visible},
                {"frame_stride_override", s.run.frame_stride ? json(*s.run.frame_stride) : json(nullptr)},
                {"norm_exponent", s.run.norm_exponent},
                {"reference_area", "mean tracked mask area per video"},
                {"terciles", "contiguous thirds of the normalized series, remainder in the last"},
                {"feature_normalization", "offsets from the confident-keypoint mean over the bbox diagonal"}};
    case AnalysisKind::Graze:
        return {{"nose_index", s.graze.nose_index},
                {"min_conf", s.graze.min_conf},
                {"patch_factor", s.graze.patch_factor},
                {"green_index", std::string(to_string(s.graze.index))},
                {"bootstrap", s.graze.bootstrap_resamples},
                {"ci_level", 0.95},
                {"seed", s.graze.seed}};
    case AnalysisKind::Rest:
        return {{"embedding", embedding_echo(s.rest.embed)},
                {"kmeans", kmeans_echo(s.rest.cluster)},
                {"resize", s.rest.side},
                {"dispersion", "RMS Euclidean distance to the group's embedding centroid"}};
    }
    return json::object();
}

std::vector<fs::path> find_videos(const std::vector<fs::path>& inputs) {
    std::set<fs::path> dirs;
    for (const auto& input : inputs) {
        if (!fs::exists(input)) {
            fail(ErrorCode::Io, "input " + input.string() + " does not exist");
        }
        if (fs::is_regular_file(input)) {
            dirs.insert(fs::weakly_canonical(input).parent_path());
            continue;
        }
        if (fs::exists(input / kManifestFile)) {
            dirs.insert(fs::weakly_canonical(input));
            continue;
        }
        for (const auto& entry : fs::recursive_directory_iterator(input)) {
            if (entry.is_regular_file() && entry.path().filename() == kManifestFile) {
                dirs.insert(fs::weakly_canonical(entry.path()).parent_path());
            }
        }
    }
    return {dirs.begin(), dirs.end()};
}

ValidationOutcome validate_inputs(const std::vector<fs::path>& inputs) {
    ValidationOutcome outcome;
    std::vector<fs::path> dirs;
    try {
        dirs = find_videos(inputs);
    } catch (const Error& e) {
        outcome.diagnostics.push_back(e.what());
        return outcome;
    }
    if (dirs.empty()) {
        outcome.diagnostics.push_back("no manifest.json found under the given paths");
    }
    for (const auto& dir : dirs) {
        ++outcome.videos;
        const auto result = read_video(dir / kManifestFile, dir / kFramesFile);
        outcome.frames += result.video.frames.size();
        for (const auto& d : result.diagnostics) outcome.diagnostics.push_back(d.to_string());
    }
    return outcome;
}

AnalysisOutput run_analysis(AnalysisKind kind, const std::vector<fs::path>& inputs, const Params& params,
                            std::uint64_t seed) {
    const AnalysisSettings settings = resolve_settings(kind, params, seed);
    AnalysisOutput out;
    std::vector<std::string> warnings;
    const auto videos = load_matching(kind, inputs, warnings);
    switch (kind) {
    case AnalysisKind::Run: run_section(videos, settings, out, warnings); break;
    case AnalysisKind::Graze: graze_section(videos, settings, out, warnings); break;
    case AnalysisKind::Rest: rest_section(videos, settings, out, warnings); break;
    }
    json input_list = json::array();
    for (const auto& lv : videos) input_list.push_back(lv.data.manifest.video_id);
    out.report.config = {{"seed", seed},
                         {"analyses", json::array({std::string(to_string(kind))})},
                         {"inputs", {{std::string(to_string(kind)), input_list}}},
                         {std::string(to_string(kind)), settings_echo(kind, settings)}};
    for (auto& w : warnings) out.report.warnings.push_back(warning_tag(kind) + w);
    return out;
}

std::vector<fs::path> analyze(AnalysisKind kind, const std::vector<fs::path>& inputs, const Params& params,
                              std::uint64_t seed, const fs::path& out_dir) {
    AnalysisOutput out = run_analysis(kind, inputs, params, seed);
    const std::string name(to_string(kind));
    const fs::path report_path = out_dir / kReportFile;
    if (fs::exists(report_path)) {
        // Merge: keep the other analyses, replace this one.
        AnalysisReport previous = read_report(report_path);
        AnalysisReport& now = out.report;
        std::set<std::string> analyses;
        for (const auto& a : previous.config.value("analyses", json::array())) analyses.insert(a.get<std::string>());
        analyses.insert(name);
        json merged = previous.config;
        merged["seed"] = seed;
        merged["analyses"] = json(std::vector<std::string>(analyses.begin(), analyses.end()));
        merged[name] = now.config[name];
        merged["inputs"][name] = now.config["inputs"][name];
        now.config = merged;
        if (kind != AnalysisKind::Run) {
            now.gait = previous.gait;
            now.speed = previous.speed;
        }
        if (kind != AnalysisKind::Graze) now.graze = previous.graze;
        if (kind != AnalysisKind::Rest) now.rest = previous.rest;
        std::vector<std::string> warnings;
        const std::string tag = warning_tag(kind);
        for (const auto& w : previous.warnings) {
            if (w.rfind(tag, 0) != 0) warnings.push_back(w);
        }
        warnings.insert(warnings.end(), now.warnings.begin(), now.warnings.end());
        now.warnings = std::move(warnings);
    }
    // Fails before any file is touched when the merged report is malformed.
    const std::string report_text = serialize_report(out.report);
    const auto errors = validate_report(to_json(out.report));
    if (!errors.empty()) {
        fail(ErrorCode::Schema, "internal report violates the schema: " + errors.front());
    }
    std::vector<fs::path> written;
    for (const auto& [rel, content] : out.files) {
        write_file_atomic(out_dir / rel, content);
        written.push_back(out_dir / rel);
    }
    write_file_atomic(report_path, report_text);
    written.push_back(report_path);
    std::sort(written.begin(), written.end());
    return written;
}

std::string summarize_report(const AnalysisReport& report) {
    std::string s = "schema_version " + std::string(kSchemaVersion) + "\n";
    s += "seed " + report.config.value("seed", json(0)).dump() + "\n";
    if (report.speed) {
        for (const auto& v : (*report.speed)["videos"]) {
            s += "speed " + v["video_id"].get<std::string>() + ": mean raw " +
                 format_fixed(v["mean_raw"].get<double>(), 3) + " px/s, mean normalized " +
                 format_fixed(v["mean_normalized"].get<double>(), 3) + "\n";
        }
    }
    if (report.gait) {
        const auto& g = *report.gait;
        s += "gait: " + g["features"].dump() + " poses, k = " + g["effective_k"].dump() + "\n";
        for (const auto& a : g["animals"]) {
            s += "  " + a["animal_id"].get<std::string>() + ": dominant cluster " + a["dominant_cluster"].dump() +
                 ", dominance " + format_fixed(a["dominance"].get<double>(), 3) + "\n";
        }
    }
    if (report.graze) {
        for (const auto& g : (*report.graze)["groups"]) {
            s += "graze " + g["social"].get<std::string>() + ": mean " + format_fixed(g["mean"].get<double>(), 4) +
                 " [" + format_fixed(g["ci_low"].get<double>(), 4) + ", " + format_fixed(g["ci_high"].get<double>(), 4) +
                 "] over " + g["videos"].dump() + " videos\n";
        }
    }
    if (report.rest) {
        for (const auto& v : (*report.rest)["views"]) {
            s += "rest " + v["view"].get<std::string>() + ":";
            for (const auto& g : v["groups"]) {
                s += " " + g["group"].get<std::string>() + " " + format_fixed(g["dispersion"].get<double>(), 3);
            }
            if (v.contains("ratio")) s += ", herd/single ratio " + format_fixed(v["ratio"].get<double>(), 3);
            s += "\n";
        }
    }
    s += "warnings " + std::to_string(report.warnings.size()) + "\n";
    for (const auto& w : report.warnings) s += "  " + w + "\n";
    return s;
}

std::uint64_t parse_seed(const std::string& text) {
    return parse_number<std::uint64_t>("seed", text);
}

} // namespace herdlens
