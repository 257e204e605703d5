#include "herdlens/synth.hpp"

#include "herdlens/error.hpp"
#include "herdlens/io.hpp"
#include "herdlens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace herdlens {

std::string_view to_string(Scenario scenario) {
    switch (scenario) {
    case Scenario::Motion: return "motion";
    case Scenario::Blobs: return "blobs";
    case Scenario::Grazing: return "grazing";
    case Scenario::Resting: return "resting";
    case Scenario::Gait: return "gait";
    }
    return "motion";
}

std::optional<Scenario> parse_scenario(std::string_view text) {
    for (Scenario s : kScenarios) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

void rasterize_ellipse(BitGrid& grid, Vec2 center, double radius_x, double radius_y) {
    if (!(radius_x > 0.0) || !(radius_y > 0.0)) {
        return;
    }
    const int r0 = std::max(0, static_cast<int>(std::floor(center.y - radius_y)));
    const int r1 = std::min(grid.height() - 1, static_cast<int>(std::ceil(center.y + radius_y)));
    const int c0 = std::max(0, static_cast<int>(std::floor(center.x - radius_x)));
    const int c1 = std::min(grid.width() - 1, static_cast<int>(std::ceil(center.x + radius_x)));
    for (int r = r0; r <= r1; ++r) {
        const double dy = (r - center.y) / radius_y;
        for (int c = c0; c <= c1; ++c) {
            const double dx = (c - center.x) / radius_x;
            if (dx * dx + dy * dy <= 1.0) grid.set(r, c);
        }
    }
}

namespace {

VideoManifest make_manifest(std::string id, Activity activity, int width, int height, double fps, int stride) {
    VideoManifest m;
    m.video_id = std::move(id);
    m.activity = activity;
    m.width = width;
    m.height = height;
    m.fps = fps;
    m.frame_stride = stride;
    return m;
}

void require(bool ok, const std::string& message) {
    if (!ok) fail(ErrorCode::InvalidArgument, message);
}

// Integer-cornered rectangle [x0, x1) x [y0, y1).
struct Rect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

void fill_rect(BitGrid& grid, const Rect& r) {
    for (int y = std::max(0, r.y0); y < std::min(grid.height(), r.y1); ++y) {
        for (int x = std::max(0, r.x0); x < std::min(grid.width(), r.x1); ++x) grid.set(y, x);
    }
}

void paint_rect(RgbImage& img, const Rect& r, float red, float green, float blue) {
    for (int y = std::max(0, r.y0); y < std::min(img.height, r.y1); ++y) {
        for (int x = std::max(0, r.x0); x < std::min(img.width, r.x1); ++x) img.set(y, x, red, green, blue);
    }
}

PoseSet pose_from_template(const std::vector<Vec2>& points, const BBox& box, double noise_sd, Rng& rng) {
    PoseSet pose{};
    for (std::size_t j = 0; j < kNumKeypoints; ++j) {
        double x = box.x + points[j].x * box.w;
        double y = box.y + points[j].y * box.h;
        if (noise_sd > 0.0) {
            x += rng.normal(0.0, noise_sd);
            y += rng.normal(0.0, noise_sd);
        }
        pose[j] = {x, y, 0.9};
    }
    return pose;
}

nlohmann::ordered_json number_array(const std::vector<double>& values) {
    auto out = nlohmann::ordered_json::array();
    for (double v : values) out.push_back(v);
    return out;
}

} // namespace

SynthOutput gen_motion(const MotionSpec& spec) {
    require(spec.frames >= 2, "motion needs at least two frames");
    require(!spec.depth_scales.empty(), "depth schedule is empty");
    require(spec.radius_x > 0.0 && spec.radius_y > 0.0, "radii must be positive");
    require(static_cast<int>(spec.depth_scales.size()) <= spec.frames, "more depth segments than frames");
    for (double s : spec.depth_scales) require(s > 0.0, "depth scales must be positive");

    const int segments = static_cast<int>(spec.depth_scales.size());
    const int per_segment = spec.frames / segments;
    auto scale_at = [&](int t) {
        return spec.depth_scales[static_cast<std::size_t>(std::min(t / per_segment, segments - 1))];
    };

    SynthOutput out;
    out.scenario = Scenario::Motion;
    SynthVideo sv;
    sv.video.manifest = make_manifest(spec.video_id, Activity::Running, spec.width, spec.height, spec.fps,
                                      spec.frame_stride);

    const Vec2 distractor_center{spec.width - 2.0 * spec.radius_x, spec.height - 2.0 * spec.radius_y};
    const double speed_unit = spec.fps / spec.frame_stride;
    const double v_norm = std::hypot(spec.velocity.x, spec.velocity.y);

    Vec2 p = spec.start;
    std::vector<double> scales;
    auto steps = nlohmann::ordered_json::array();
    for (int t = 0; t < spec.frames; ++t) {
        const double s = scale_at(t);
        scales.push_back(s);
        const double rx = spec.radius_x * s;
        const double ry = spec.radius_y * s;
        if (p.x - rx < 0.0 || p.y - ry < 0.0 || p.x + rx > spec.width - 1.0 || p.y + ry > spec.height - 1.0) {
            fail(ErrorCode::OutOfFrame, "ellipse leaves the frame at kept frame " + std::to_string(t));
        }
        BitGrid grid(spec.height, spec.width);
        rasterize_ellipse(grid, p, rx, ry);
        FrameRecord frame{spec.video_id, t, {}};
        Detection det;
        det.bbox = {p.x - rx, p.y - ry, 2.0 * rx, 2.0 * ry};
        det.score = 0.95;
        det.mask = encode_rle(grid);
        frame.detections.push_back(det);
        if (spec.distractor) {
            BitGrid small(spec.height, spec.width);
            const double drx = spec.radius_x * 0.5;
            const double dry = spec.radius_y * 0.5;
            rasterize_ellipse(small, distractor_center, drx, dry);
            Detection d2;
            d2.bbox = {distractor_center.x - drx, distractor_center.y - dry, 2.0 * drx, 2.0 * dry};
            d2.score = 0.5;
            d2.mask = encode_rle(small);
            frame.detections.push_back(d2);
        }
        sv.video.frames.push_back(std::move(frame));
        if (t + 1 < spec.frames) {
            steps.push_back({{"frame_index", t}, {"scale", s}, {"raw_px_per_s", v_norm * s * speed_unit}});
            p.x += spec.velocity.x * s;
            p.y += spec.velocity.y * s;
        }
    }
    // Analytic areas are proportional to s^2, so the normalized speed is
    // |v| * fps / stride * sqrt(mean(s^2)) at every step.
    double mean_sq = 0.0;
    for (double s : scales) mean_sq += s * s;
    mean_sq /= static_cast<double>(scales.size());

    out.truth = {{"scenario", "motion"},
                 {"video_id", spec.video_id},
                 {"fps", spec.fps},
                 {"frame_stride", spec.frame_stride},
                 {"velocity", number_array({spec.velocity.x, spec.velocity.y})},
                 {"depth_scales", number_array(spec.depth_scales)},
                 {"true_speed_px_per_s", v_norm * speed_unit},
                 {"true_normalized_speed", v_norm * speed_unit * std::sqrt(mean_sq)},
                 {"steps", steps}};
    out.videos.push_back(std::move(sv));
    return out;
}

BlobData gen_blob_data(const BlobSpec& spec, std::uint64_t seed) {
    require(spec.k >= 1 && spec.per_blob >= 1 && spec.dim >= 1, "blob counts must be positive");
    require(spec.sigma >= 0.0 && spec.separation >= 0.0, "sigma and separation must be nonnegative");
    Rng rng(seed);
    const auto k = static_cast<std::size_t>(spec.k);
    const auto d = static_cast<std::size_t>(spec.dim);
    double extent = std::max(1.0, spec.separation) * std::pow(2.0 * spec.k, 1.0 / spec.dim);

    BlobData data;
    data.centers = Matrix(k, d);
    std::size_t placed = 0;
    int attempts = 0;
    while (placed < k) {
        auto row = data.centers.row(placed);
        for (auto& v : row) v = rng.uniform(0.0, extent);
        bool ok = true;
        for (std::size_t c = 0; c < placed && ok; ++c) {
            ok = std::sqrt(squared_distance(row, data.centers.row(c))) >= spec.separation;
        }
        if (ok) {
            ++placed;
            attempts = 0;
        } else if (++attempts > 10000) {
            extent *= 1.25;
            attempts = 0;
        }
    }
    data.points = Matrix(k * static_cast<std::size_t>(spec.per_blob), d);
    for (std::size_t c = 0; c < k; ++c) {
        for (int i = 0; i < spec.per_blob; ++i) {
            const std::size_t r = c * static_cast<std::size_t>(spec.per_blob) + static_cast<std::size_t>(i);
            for (std::size_t j = 0; j < d; ++j) data.points(r, j) = data.centers(c, j) + rng.normal(0.0, spec.sigma);
            data.labels.push_back(static_cast<int>(c));
        }
    }
    return data;
}

SynthOutput gen_blobs(const BlobSpec& spec, std::uint64_t seed) {
    const BlobData data = gen_blob_data(spec, seed);
    SynthOutput out;
    out.scenario = Scenario::Blobs;
    std::string csv;
    for (int j = 0; j < spec.dim; ++j) csv += "x" + std::to_string(j) + ",";
    csv += "label\n";
    for (std::size_t i = 0; i < data.points.rows(); ++i) {
        for (double v : data.points.row(i)) csv += format_real(v) + ",";
        csv += std::to_string(data.labels[i]) + "\n";
    }
    out.files["points.csv"] = csv;
    auto centers = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < data.centers.rows(); ++c) {
        centers.push_back(number_array({data.centers.row(c).begin(), data.centers.row(c).end()}));
    }
    out.truth = {{"scenario", "blobs"}, {"seed", seed},       {"k", spec.k},
                 {"per_blob", spec.per_blob}, {"sigma", spec.sigma}, {"separation", spec.separation},
                 {"centers", centers},    {"labels", data.labels}};
    return out;
}

namespace {

constexpr float kGreen[3] = {51.0f / 255.0f, 204.0f / 255.0f, 51.0f / 255.0f};
constexpr float kGray = 128.0f / 255.0f;
constexpr float kFleece = 230.0f / 255.0f;

struct GrazingSheep {
    Rect body;
    Rect head;
    Vec2 nose;
    BBox box;
};

GrazingSheep grazing_sheep(int bx, int by) {
    GrazingSheep s;
    s.body = {bx, by, bx + 40, by + 24};
    s.head = {bx - 6, by + 16, bx + 2, by + 28};
    s.nose = {static_cast<double>(bx - 4), static_cast<double>(by + 30)};
    s.box = {static_cast<double>(bx - 6), static_cast<double>(by), 46.0, 31.0};
    return s;
}

} // namespace

SynthOutput gen_grazing(const GrazingSpec& spec, std::uint64_t seed) {
    require(spec.videos_per_group >= 1 && spec.frames >= 1 && spec.herd_animals >= 1, "grazing counts must be positive");
    require(spec.single_green >= 0.0 && spec.single_green <= 1.0 && spec.herd_green >= 0.0 && spec.herd_green <= 1.0,
            "green fractions must lie in [0, 1]");
    const int slot = 66;
    require(spec.width >= slot * spec.herd_animals + 10 && spec.height >= 80, "frame too small for the layout");
    constexpr double kPatchFactor = 0.4;
    const double exg_green = 2.0 * kGreen[1] - kGreen[0] - kGreen[2];

    Rng rng(seed);
    SynthOutput out;
    out.scenario = Scenario::Grazing;
    auto videos_truth = nlohmann::ordered_json::array();

    for (Social social : {Social::Single, Social::Herd}) {
        const bool herd = social == Social::Herd;
        const int animals = herd ? spec.herd_animals : 1;
        const double base_green = herd ? spec.herd_green : spec.single_green;
        for (int v = 0; v < spec.videos_per_group; ++v) {
            SynthVideo sv;
            const std::string id = std::string("grazing_") + std::string(to_string(social)) + "_" + std::to_string(v);
            sv.video.manifest = make_manifest(id, Activity::Grazing, spec.width, spec.height, spec.fps, spec.frame_stride);
            sv.video.manifest.social = social;
            auto frames_truth = nlohmann::ordered_json::array();
            double video_sum = 0.0;

            for (int t = 0; t < spec.frames; ++t) {
                RgbImage img(spec.height, spec.width);
                paint_rect(img, {0, 0, spec.width, spec.height}, kGray, kGray, kGray);
                std::vector<GrazingSheep> sheep;
                for (int a = 0; a < animals; ++a) {
                    const int first_slot = herd ? 0 : spec.herd_animals / 2;
                    sheep.push_back(grazing_sheep((first_slot + a) * slot + 20, 20));
                }
                FrameRecord frame{id, t, {}};
                double frame_sum = 0.0;
                auto patches_truth = nlohmann::ordered_json::array();
                std::vector<Rect> greens;
                std::vector<Rect> patches;
                for (const auto& s : sheep) {
                    const double frac = std::clamp(base_green + rng.uniform(-spec.green_jitter, spec.green_jitter), 0.0, 1.0);
                    const long side = std::lround(kPatchFactor * s.box.diagonal());
                    const int x0 = static_cast<int>(std::lround(s.nose.x - static_cast<double>(side) / 2.0));
                    const int y0 = static_cast<int>(std::lround(s.nose.y - static_cast<double>(side) / 2.0));
                    const Rect patch{x0, y0, x0 + static_cast<int>(side), y0 + static_cast<int>(side)};
                    const Rect green{x0, y0, x0 + static_cast<int>(std::lround(frac * static_cast<double>(side))), patch.y1};
                    patches.push_back(patch);
                    greens.push_back(green);
                    paint_rect(img, green, kGreen[0], kGreen[1], kGreen[2]);
                }
                for (const auto& s : sheep) {
                    paint_rect(img, s.body, kFleece, kFleece, kFleece);
                    paint_rect(img, s.head, kFleece, kFleece, kFleece);
                    BitGrid mask(spec.height, spec.width);
                    fill_rect(mask, s.body);
                    fill_rect(mask, s.head);
                    Detection det;
                    det.bbox = s.box;
                    det.score = 0.9;
                    PoseSet pose{};
                    for (std::size_t j = 0; j < kNumKeypoints; ++j) {
                        const double u = 0.2 + 0.6 * static_cast<double>(j) / (kNumKeypoints - 1);
                        pose[j] = {s.box.x + u * s.box.w, s.box.y + 0.5 * s.box.h, 0.9};
                    }
                    pose[2] = {s.nose.x, s.nose.y, 0.95};
                    det.keypoints = pose;
                    det.mask = encode_rle(mask);
                    frame.detections.push_back(det);
                }
                // Closed form: within each patch, count the pixels outside every
                // animal rectangle, and those among them inside the green band.
                for (std::size_t i = 0; i < sheep.size(); ++i) {
                    std::int64_t keep = 0;
                    std::int64_t green_keep = 0;
                    for (int y = patches[i].y0; y < patches[i].y1; ++y) {
                        for (int x = patches[i].x0; x < patches[i].x1; ++x) {
                            const bool covered = std::any_of(sheep.begin(), sheep.end(), [&](const GrazingSheep& s) {
                                return s.body.contains(x, y) || s.head.contains(x, y);
                            });
                            if (covered) continue;
                            ++keep;
                            if (std::any_of(greens.begin(), greens.end(), [&](const Rect& g) { return g.contains(x, y); })) {
                                ++green_keep;
                            }
                        }
                    }
                    const double score = exg_green * static_cast<double>(green_keep) / static_cast<double>(keep);
                    frame_sum += score;
                    patches_truth.push_back({{"window", {patches[i].x0, patches[i].y0, patches[i].x1, patches[i].y1}},
                                             {"keep_pixels", keep},
                                             {"green_keep_pixels", green_keep},
                                             {"score", score}});
                }
                const double frame_score = frame_sum / static_cast<double>(sheep.size());
                video_sum += frame_score;
                frames_truth.push_back({{"frame_index", t}, {"score", frame_score}, {"patches", patches_truth}});
                sv.images.emplace(t, std::move(img));
                sv.video.frames.push_back(std::move(frame));
            }
            videos_truth.push_back({{"video_id", id},
                                    {"social", std::string(to_string(social))},
                                    {"green_fraction", base_green},
                                    {"activity_index", video_sum / spec.frames},
                                    {"frames", frames_truth}});
            out.videos.push_back(std::move(sv));
        }
    }
    out.truth = {{"scenario", "grazing"},
                 {"seed", seed},
                 {"patch_factor", kPatchFactor},
                 {"green_exg", exg_green},
                 {"videos", videos_truth}};
    return out;
}

namespace {

struct Ellipse {
    double cx, cy, rx, ry;
};

using Silhouette = std::vector<Ellipse>;

std::vector<Silhouette> silhouette_bank(int count, Rng& rng) {
    std::vector<Silhouette> bank;
    for (int t = 0; t < count; ++t) {
        Silhouette s;
        // A body, a head and two limbs, all in bbox-normalized coordinates.
        s.push_back({rng.uniform(0.4, 0.6), rng.uniform(0.45, 0.65), rng.uniform(0.25, 0.45), rng.uniform(0.2, 0.35)});
        s.push_back({rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.4), rng.uniform(0.08, 0.2), rng.uniform(0.08, 0.2)});
        for (int limb = 0; limb < 2; ++limb) {
            s.push_back({rng.uniform(0.1, 0.9), rng.uniform(0.6, 0.9), rng.uniform(0.05, 0.15), rng.uniform(0.1, 0.25)});
        }
        bank.push_back(std::move(s));
    }
    return bank;
}

// Draws the silhouette into its integer bbox, flipping each bbox pixel with
// probability `flip`. Pixel centers map to bbox-normalized coordinates.
void draw_silhouette(BitGrid& grid, const Silhouette& s, const Rect& box, double flip, Rng& rng) {
    const double w = box.x1 - box.x0;
    const double h = box.y1 - box.y0;
    for (int y = box.y0; y < box.y1; ++y) {
        const double v = (y - box.y0 + 0.5) / h;
        for (int x = box.x0; x < box.x1; ++x) {
            const double u = (x - box.x0 + 0.5) / w;
            bool inside = false;
            for (const auto& e : s) {
                const double dx = (u - e.cx) / e.rx;
                const double dy = (v - e.cy) / e.ry;
                inside = inside || dx * dx + dy * dy <= 1.0;
            }
            if (flip > 0.0 && rng.uniform() < flip) inside = !inside;
            if (inside) grid.set(y, x);
        }
    }
}

} // namespace

SynthOutput gen_resting(const RestingSpec& spec, std::uint64_t seed) {
    require(spec.single_frames >= 1 && spec.herd_frames >= 1 && spec.herd_animals >= 1, "resting counts must be positive");
    require(spec.single_templates >= 1 && spec.herd_templates >= 1, "template counts must be positive");
    require(spec.flip_noise >= 0.0 && spec.flip_noise < 0.5, "flip noise must lie in [0, 0.5)");
    std::vector<double> cumulative;
    if (!spec.herd_template_weights.empty()) {
        require(static_cast<int>(spec.herd_template_weights.size()) == spec.herd_templates,
                "one weight per herd template is required");
        double total = 0.0;
        for (double w : spec.herd_template_weights) {
            require(w >= 0.0, "template weights must be nonnegative");
            total += w;
            cumulative.push_back(total);
        }
        require(total > 0.0, "template weights must not all be zero");
        for (double& c : cumulative) c /= total;
    }
    const int slot = 100;
    require(spec.width >= slot * spec.herd_animals + 10 && spec.height >= 100, "frame too small for the layout");

    Rng rng(seed);
    SynthOutput out;
    out.scenario = Scenario::Resting;
    auto videos_truth = nlohmann::ordered_json::array();
    for (View view : {View::Front, View::Side}) {
        const auto bank = silhouette_bank(std::max(spec.single_templates, spec.herd_templates), rng);
        for (Social social : {Social::Single, Social::Herd}) {
            const bool herd = social == Social::Herd;
            const int animals = herd ? spec.herd_animals : 1;
            const int templates = herd ? spec.herd_templates : spec.single_templates;
            const int frames = herd ? spec.herd_frames : spec.single_frames;
            const std::string id = "resting_" + std::string(to_string(view)) + "_" + std::string(to_string(social));
            SynthVideo sv;
            sv.video.manifest = make_manifest(id, Activity::Sitting, spec.width, spec.height, 30.0, kDefaultFrameStride);
            sv.video.manifest.view = view;
            sv.video.manifest.social = social;
            auto assignments = nlohmann::ordered_json::array();
            for (int t = 0; t < frames; ++t) {
                FrameRecord frame{id, t, {}};
                for (int a = 0; a < animals; ++a) {
                    const int w = 48 + static_cast<int>(rng.index(17));
                    const int h = 36 + static_cast<int>(rng.index(13));
                    const int first_slot = herd ? 0 : spec.herd_animals / 2;
                    const int x0 = (first_slot + a) * slot + 10 + static_cast<int>(rng.index(21));
                    const int y0 = 10 + static_cast<int>(rng.index(static_cast<std::size_t>(spec.height - h - 19)));
                    const Rect box{x0, y0, x0 + w, y0 + h};
                    int tmpl = 0;
                    if (herd && !cumulative.empty()) {
                        const double u = rng.uniform();
                        while (tmpl + 1 < templates && u >= cumulative[static_cast<std::size_t>(tmpl)]) ++tmpl;
                    } else {
                        tmpl = static_cast<int>(rng.index(static_cast<std::size_t>(templates)));
                    }
                    BitGrid mask(spec.height, spec.width);
                    draw_silhouette(mask, bank[static_cast<std::size_t>(tmpl)], box, spec.flip_noise, rng);
                    Detection det;
                    det.bbox = {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(w),
                                static_cast<double>(h)};
                    det.score = 0.9;
                    det.mask = encode_rle(mask);
                    frame.detections.push_back(det);
                    assignments.push_back({{"frame_index", t}, {"detection", a}, {"template", tmpl}});
                }
                sv.video.frames.push_back(std::move(frame));
            }
            videos_truth.push_back({{"video_id", id},
                                    {"view", std::string(to_string(view))},
                                    {"social", std::string(to_string(social))},
                                    {"templates", templates},
                                    {"assignments", assignments}});
            out.videos.push_back(std::move(sv));
        }
    }
    out.truth = {{"scenario", "resting"}, {"seed", seed}, {"flip_noise", spec.flip_noise}, {"videos", videos_truth}};
    return out;
}

SynthOutput gen_gait(const GaitSpec& spec, std::uint64_t seed) {
    require(spec.animals >= 1 && spec.templates >= 1 && spec.frames >= 2, "gait counts must be positive");
    require(spec.sigma >= 0.0, "sigma must be nonnegative");
    constexpr double kRx = 30.0;
    constexpr double kRy = 20.0;
    require(spec.height >= 2 * kRy + 20, "frame too small for the layout");

    Rng rng(seed);
    std::vector<std::vector<Vec2>> templates;
    for (int t = 0; t < spec.templates; ++t) {
        std::vector<Vec2> pts;
        for (std::size_t j = 0; j < kNumKeypoints; ++j) pts.push_back({rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)});
        templates.push_back(std::move(pts));
    }
    SynthOutput out;
    out.scenario = Scenario::Gait;
    auto animals_truth = nlohmann::ordered_json::array();
    const double travel = spec.width - 2.0 * kRx - 20.0;
    for (int a = 0; a < spec.animals; ++a) {
        const std::string id = "gait_" + std::to_string(a);
        const int tmpl = a % spec.templates;
        SynthVideo sv;
        sv.video.manifest = make_manifest(id, Activity::Running, spec.width, spec.height, spec.fps, spec.frame_stride);
        const double vx = travel / (spec.frames - 1) * (0.5 + 0.5 * rng.uniform());
        Vec2 c{kRx + 10.0, spec.height / 2.0};
        for (int t = 0; t < spec.frames; ++t) {
            BitGrid mask(spec.height, spec.width);
            rasterize_ellipse(mask, c, kRx, kRy);
            Detection det;
            det.bbox = {c.x - kRx, c.y - kRy, 2.0 * kRx, 2.0 * kRy};
            det.score = 0.9;
            det.keypoints = pose_from_template(templates[static_cast<std::size_t>(tmpl)], det.bbox,
                                               spec.sigma * det.bbox.diagonal(), rng);
            det.mask = encode_rle(mask);
            sv.video.frames.push_back({id, t, {det}});
            c.x += vx;
        }
        animals_truth.push_back({{"animal_id", id},
                                 {"template", tmpl},
                                 {"true_speed_px_per_s", vx * spec.fps / spec.frame_stride}});
        out.videos.push_back(std::move(sv));
    }
    out.truth = {{"scenario", "gait"}, {"seed", seed}, {"sigma", spec.sigma}, {"animals", animals_truth}};
    return out;
}

namespace {

// Reads spec fields from a JSON object and rejects keys it never consumed.
class ParamReader {
public:
    explicit ParamReader(const nlohmann::json& params) : params_(params) {
        if (!params_.is_null() && !params_.is_object()) {
            fail(ErrorCode::InvalidArgument, "scenario parameters must be a JSON object");
        }
    }

    template <typename T>
    void read(const char* key, T& target) {
        used_.insert(key);
        if (params_.is_null() || !params_.contains(key)) return;
        try {
            target = params_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            fail(ErrorCode::InvalidArgument, std::string("parameter '") + key + "' has the wrong type");
        }
    }

    void read_list(const char* key, std::vector<double>& target) {
        used_.insert(key);
        if (params_.is_null() || !params_.contains(key)) return;
        const auto& v = params_.at(key);
        if (v.is_string()) {
            target.clear();
            std::stringstream ss(v.get<std::string>());
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    target.push_back(std::stod(item));
                } catch (const std::exception&) {
                    fail(ErrorCode::InvalidArgument, std::string("parameter '") + key + "' is not a number list");
                }
            }
        } else {
            read(key, target);
        }
    }

    void finish() const {
        if (params_.is_null()) return;
        for (const auto& [key, value] : params_.items()) {
            if (!used_.count(key)) fail(ErrorCode::InvalidArgument, "unknown scenario parameter '" + key + "'");
        }
    }

private:
    const nlohmann::json& params_;
    std::set<std::string> used_;
};

} // namespace

SynthOutput synthesize(Scenario scenario, const nlohmann::json& params, std::uint64_t seed) {
    ParamReader p(params);
    switch (scenario) {
    case Scenario::Motion: {
        MotionSpec s;
        p.read("video_id", s.video_id);
        p.read("fps", s.fps);
        p.read("frame_stride", s.frame_stride);
        p.read("width", s.width);
        p.read("height", s.height);
        p.read("frames", s.frames);
        p.read("start_x", s.start.x);
        p.read("start_y", s.start.y);
        p.read("vx", s.velocity.x);
        p.read("vy", s.velocity.y);
        p.read("radius_x", s.radius_x);
        p.read("radius_y", s.radius_y);
        p.read_list("depth_scales", s.depth_scales);
        p.read("distractor", s.distractor);
        p.finish();
        return gen_motion(s);
    }
    case Scenario::Blobs: {
        BlobSpec s;
        p.read("k", s.k);
        p.read("per_blob", s.per_blob);
        p.read("dim", s.dim);
        p.read("sigma", s.sigma);
        p.read("separation", s.separation);
        p.finish();
        return gen_blobs(s, seed);
    }
    case Scenario::Grazing: {
        GrazingSpec s;
        p.read("videos_per_group", s.videos_per_group);
        p.read("frames", s.frames);
        p.read("width", s.width);
        p.read("height", s.height);
        p.read("fps", s.fps);
        p.read("frame_stride", s.frame_stride);
        p.read("single_green", s.single_green);
        p.read("herd_green", s.herd_green);
        p.read("green_jitter", s.green_jitter);
        p.read("herd_animals", s.herd_animals);
        p.finish();
        return gen_grazing(s, seed);
    }
    case Scenario::Resting: {
        RestingSpec s;
        p.read("single_frames", s.single_frames);
        p.read("herd_frames", s.herd_frames);
        p.read("herd_animals", s.herd_animals);
        p.read("single_templates", s.single_templates);
        p.read("herd_templates", s.herd_templates);
        p.read_list("herd_template_weights", s.herd_template_weights);
        p.read("flip_noise", s.flip_noise);
        p.read("width", s.width);
        p.read("height", s.height);
        p.finish();
        return gen_resting(s, seed);
    }
    case Scenario::Gait: {
        GaitSpec s;
        p.read("animals", s.animals);
        p.read("templates", s.templates);
        p.read("frames", s.frames);
        p.read("sigma", s.sigma);
        p.read("width", s.width);
        p.read("height", s.height);
        p.read("fps", s.fps);
        p.read("frame_stride", s.frame_stride);
        p.finish();
        return gen_gait(s, seed);
    }
    }
    fail(ErrorCode::InvalidArgument, "unknown scenario");
}

std::vector<std::filesystem::path> write_synth(const SynthOutput& output, const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    for (const auto& sv : output.videos) {
        const auto vdir = dir / sv.video.manifest.video_id;
        write_video_dir(sv.video, vdir);
        written.push_back(vdir / kManifestFile);
        written.push_back(vdir / kFramesFile);
        if (!sv.images.empty()) {
            std::map<std::int64_t, std::string> index;
            for (const auto& [frame, img] : sv.images) {
                std::string name = std::to_string(frame);
                name.insert(0, name.size() < 6 ? 6 - name.size() : 0, '0');
                name += ".ppm";
                write_ppm(vdir / kImageryDir / name, img);
                written.push_back(vdir / kImageryDir / name);
                index[frame] = name;
            }
            write_imagery_index(vdir / kImageryDir / kImageryIndexFile, index);
            written.push_back(vdir / kImageryDir / kImageryIndexFile);
        }
    }
    for (const auto& [name, content] : output.files) {
        write_file_atomic(dir / name, content);
        written.push_back(dir / name);
    }
    write_file_atomic(dir / "truth.json", output.truth.dump(2) + "\n");
    written.push_back(dir / "truth.json");
    std::sort(written.begin(), written.end());
    return written;
}

} // namespace herdlens
