#include "doctest.h"

#include "herdlens/error.hpp"
#include "herdlens/rng.hpp"
#include "herdlens/graze.hpp"
#include "herdlens/synth.hpp"

#include "../support/temp_dir.hpp"

#include <cmath>
#include <filesystem>

using namespace herdlens;

namespace {

RgbImage solid(int h, int w, float r, float g, float b) {
    RgbImage img(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) img.set(y, x, r, g, b);
    }
    return img;
}

PoseSet pose_with_nose(double x, double y, double confidence) {
    PoseSet pose{};
    for (auto& k : pose) k = {x, y, 0.9};
    pose[2] = {x, y, confidence};
    return pose;
}

std::vector<GrazeVideoInput> in_memory(const SynthOutput& out) {
    std::vector<GrazeVideoInput> inputs;
    for (const auto& sv : out.videos) {
        auto images = sv.images;
        inputs.push_back({sv.video, [images](std::int64_t f) -> std::optional<RgbImage> {
                              const auto it = images.find(f);
                              if (it == images.end()) return std::nullopt;
                              return it->second;
                          }});
    }
    return inputs;
}

} // namespace

TEST_CASE("patch is a square of side 0.4 * diagonal centered on the nose") {
    // 60 x 80 box: diagonal 100, side 40.
    const auto w = grazing_patch(pose_with_nose(100, 100, 0.9), BBox{0, 0, 60, 80}, 640, 480);
    CHECK(w == PatchWindow{80, 80, 120, 120});
    CHECK(w.width() == 40);
    CHECK(w.height() == 40);
}

TEST_CASE("patch is clipped at the frame corner") {
    const auto w = grazing_patch(pose_with_nose(5, 3, 0.9), BBox{0, 0, 60, 80}, 640, 480);
    CHECK(w == PatchWindow{0, 0, 25, 23});
}

TEST_CASE("low-confidence nose throws") {
    CHECK_THROWS_WITH_AS(grazing_patch(pose_with_nose(100, 100, 0.1), BBox{0, 0, 60, 80}, 640, 480),
                         doctest::Contains("LowConfidenceNose"), Error);
}

TEST_CASE("excess green of analytic colors") {
    const PatchWindow w{2, 2, 8, 8};
    CHECK(green_score(solid(10, 10, 0, 1, 0), w, {}).score == 2.0);
    CHECK(green_score(solid(10, 10, 0.5f, 0.5f, 0.5f), w, {}).score == 0.0);
    CHECK(green_score(solid(10, 10, 1, 0, 0), w, {}).score == -1.0);
    CHECK(green_score(solid(10, 10, 0, 1, 0), w, {}, GreenIndex::GreenChannel).score == 1.0);
}

TEST_CASE("half-occluded pure green patch still scores 2.0") {
    auto img = solid(10, 10, 0, 1, 0);
    BitGrid mask(10, 10);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 5; ++x) {
            mask.set(y, x);
            img.set(y, x, 1, 1, 1);
        }
    }
    const auto s = green_score(img, PatchWindow{0, 0, 10, 10}, std::vector<BitGrid>{mask});
    CHECK(s.keep_count == 50);
    CHECK(std::abs(*s.score - 2.0) <= 1e-9);
}

TEST_CASE("mixed patch with occlusion matches the closed form") {
    // Left third green, middle third gray, right third masked white.
    RgbImage img(9, 9);
    BitGrid mask(9, 9);
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 9; ++x) {
            if (x < 3) img.set(y, x, 0, 1, 0);
            else if (x < 6) img.set(y, x, 0.5f, 0.5f, 0.5f);
            else {
                img.set(y, x, 1, 1, 1);
                mask.set(y, x);
            }
        }
    }
    const auto s = green_score(img, PatchWindow{0, 0, 9, 9}, std::vector<BitGrid>{mask});
    CHECK(s.keep_count == 54);
    CHECK(std::abs(*s.score - 1.0) <= 1e-9);
}

TEST_CASE("fully occluded window has no score") {
    BitGrid mask(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) mask.set(y, x);
    const auto s = green_score(solid(4, 4, 0, 1, 0), PatchWindow{0, 0, 4, 4}, std::vector<BitGrid>{mask});
    CHECK(s.occluded());
    CHECK(s.keep_count == 0);
}

TEST_CASE("score is linear under channel scaling") {
    Rng rng(3);
    RgbImage img(12, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x)
            img.set(y, x, float(rng.uniform()) * 0.5f, float(rng.uniform()) * 0.5f, float(rng.uniform()) * 0.5f);
    RgbImage doubled = img;
    for (auto& v : doubled.rgb) v *= 2.0f;
    const PatchWindow w{1, 1, 11, 11};
    CHECK(*green_score(doubled, w, {}).score == doctest::Approx(2.0 * *green_score(img, w, {}).score).epsilon(1e-6));
}

TEST_CASE("adding mask pixels only removes pixels from the patch") {
    Rng rng(5);
    RgbImage img(10, 10);
    for (auto& v : img.rgb) v = float(rng.uniform());
    BitGrid small(10, 10), large(10, 10);
    for (int y = 0; y < 3; ++y) small.set(y, y);
    large = small;
    for (int y = 0; y < 10; ++y) large.set(y, 9);
    const PatchWindow w{0, 0, 10, 10};
    CHECK(green_score(img, w, std::vector<BitGrid>{large}).keep_count <
          green_score(img, w, std::vector<BitGrid>{small}).keep_count);
}

TEST_CASE("engine scores match the synthetic closed form") {
    const auto out = gen_grazing(GrazingSpec{}, 7);
    const auto report = analyze_grazing(in_memory(out), GrazeConfig{});
    REQUIRE(report.videos.size() == out.truth["videos"].size());
    for (std::size_t v = 0; v < report.videos.size(); ++v) {
        const auto& truth = out.truth["videos"][v];
        const auto& got = report.videos[v];
        CHECK(got.video_id == truth["video_id"].get<std::string>());
        CHECK(*got.activity_index == doctest::Approx(truth["activity_index"].get<double>()).epsilon(1e-6));
        for (std::size_t t = 0; t < got.series.size(); ++t) {
            CHECK(got.series[t] == doctest::Approx(truth["frames"][t]["score"].get<double>()).epsilon(1e-6));
        }
        CHECK(got.delta.size() + 1 == got.series.size());
    }
}

TEST_CASE("isolated sheep graze more than herd sheep") {
    const auto out = gen_grazing(GrazingSpec{}, 9);
    const auto report = analyze_grazing(in_memory(out), GrazeConfig{});
    REQUIRE(report.groups.size() == 2);
    const auto& single = report.groups[0].social == Social::Single ? report.groups[0] : report.groups[1];
    const auto& herd = report.groups[0].social == Social::Herd ? report.groups[0] : report.groups[1];
    CHECK(single.mean > herd.mean);
    CHECK(single.ci_low > herd.ci_high);
}

TEST_CASE("identical videos give identical group summaries") {
    GrazingSpec spec;
    spec.videos_per_group = 1;
    auto out = gen_grazing(spec, 3);
    out.videos.erase(out.videos.begin() + 1);
    auto twin = out.videos[0];
    twin.video.manifest.video_id = "twin";
    twin.video.manifest.social = Social::Herd;
    for (auto& f : twin.video.frames) f.video_id = "twin";
    out.videos.push_back(twin);
    const auto report = analyze_grazing(in_memory(out), GrazeConfig{});
    CHECK(report.groups[0].mean == report.groups[1].mean);
    CHECK(report.groups[0].ci_high - report.groups[0].ci_low == 0.0);
}

TEST_CASE("bootstrap interval brackets the mean and is seeded") {
    const std::vector<double> values{0.1, 0.4, 0.2, 0.9, 0.5};
    const auto a = bootstrap_mean(values, 1000, 1);
    const auto b = bootstrap_mean(values, 1000, 1);
    CHECK(a.mean == doctest::Approx(0.42));
    CHECK(a.ci_low <= a.mean);
    CHECK(a.ci_high >= a.mean);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
}

TEST_CASE("missing social label throws") {
    auto out = gen_grazing(GrazingSpec{}, 1);
    out.videos[0].video.manifest.social.reset();
    CHECK_THROWS_WITH_AS(analyze_grazing(in_memory(out), GrazeConfig{}), doctest::Contains("MissingSocialLabel"),
                         Error);
}

TEST_CASE("missing imagery throws") {
    auto out = gen_grazing(GrazingSpec{}, 1);
    out.videos[0].images.clear();
    CHECK_THROWS_WITH_AS(analyze_grazing(in_memory(out), GrazeConfig{}), doctest::Contains("MissingImagery"), Error);

    testing::TempDir dir("graze");
    CHECK_THROWS_WITH_AS(imagery_source(dir.path()), doctest::Contains("MissingImagery"), Error);
}

TEST_CASE("imagery written to disk reproduces the in-memory scores") {
    GrazingSpec spec;
    spec.videos_per_group = 1;
    spec.frames = 3;
    const auto out = gen_grazing(spec, 4);
    testing::TempDir dir("graze_disk");
    write_synth(out, dir.path());
    std::vector<GrazeVideoInput> inputs;
    for (const auto& sv : out.videos) {
        const auto vdir = dir.path() / sv.video.manifest.video_id;
        inputs.push_back({load_video(vdir), imagery_source(vdir)});
    }
    const auto disk = analyze_grazing(inputs, GrazeConfig{});
    const auto mem = analyze_grazing(in_memory(out), GrazeConfig{});
    for (std::size_t v = 0; v < disk.videos.size(); ++v) {
        // Synthetic colors sit on 8-bit levels, so the PPM round trip is lossless.
        CHECK(*disk.videos[v].activity_index == doctest::Approx(*mem.videos[v].activity_index).epsilon(1e-9));
    }
}

TEST_CASE("green index names round-trip") {
    for (auto g : {GreenIndex::ExcessGreen, GreenIndex::GreenChannel}) CHECK(parse_green_index(to_string(g)) == g);
}
