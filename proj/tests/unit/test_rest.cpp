#include "doctest.h"

#include "herdlens/error.hpp"
#include "herdlens/rng.hpp"
#include "herdlens/maskops.hpp"
#include "herdlens/rest.hpp"
#include "herdlens/synth.hpp"

#include <algorithm>
#include <cmath>

using namespace herdlens;

namespace {

std::vector<VideoData> videos_of(const SynthOutput& out) {
    std::vector<VideoData> v;
    for (const auto& sv : out.videos) v.push_back(sv.video);
    return v;
}

VideoData one_frame_video(View view, Social social, std::vector<Detection> dets, int w = 200, int h = 100) {
    VideoData v;
    v.manifest.video_id = "v";
    v.manifest.activity = Activity::Sitting;
    v.manifest.view = view;
    v.manifest.social = social;
    v.manifest.width = w;
    v.manifest.height = h;
    v.frames.push_back({"v", 0, std::move(dets)});
    return v;
}

Detection ellipse_detection(Vec2 c, double rx, double ry, int w = 200, int h = 100) {
    BitGrid g(h, w);
    rasterize_ellipse(g, c, rx, ry);
    Detection d;
    d.bbox = {c.x - rx, c.y - ry, 2 * rx, 2 * ry};
    d.mask = encode_rle(g);
    return d;
}

} // namespace

TEST_CASE("mask filling its box becomes an all-ones vector") {
    BitGrid g(100, 200);
    for (int y = 10; y < 30; ++y)
        for (int x = 50; x < 90; ++x) g.set(y, x);
    Detection d;
    d.bbox = {50, 10, 40, 20};
    d.mask = encode_rle(g);
    const auto s = extract_rest_samples({one_frame_video(View::Front, Social::Single, {d})});
    REQUIRE(s.size() == 1);
    CHECK(s[0].vector.size() == std::size_t(kRestSide * kRestSide));
    CHECK(std::all_of(s[0].vector.begin(), s[0].vector.end(), [](std::uint8_t v) { return v == 1; }));
}

TEST_CASE("one shape at two integer scales yields the same vector") {
    // A random 8 x 16 bitmap, and the same bitmap with every pixel doubled.
    Rng rng(6);
    BitGrid small(100, 200), big(100, 200);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 16; ++x) {
            if (rng.uniform() < 0.5) continue;
            small.set(10 + y, 10 + x);
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) big.set(40 + 2 * y + dy, 100 + 2 * x + dx);
        }
    }
    Detection ds, db;
    ds.bbox = {10, 10, 16, 8};
    ds.mask = encode_rle(small);
    db.bbox = {100, 40, 32, 16};
    db.mask = encode_rle(big);
    const auto s = extract_rest_samples({one_frame_video(View::Side, Social::Herd, {ds, db})});
    REQUIRE(s.size() == 2);
    CHECK(s[0].vector == s[1].vector);
}

TEST_CASE("every detection with a mask becomes one sample") {
    const auto v = one_frame_video(View::Front, Social::Herd,
                                   {ellipse_detection({30, 50}, 10, 8), ellipse_detection({90, 50}, 12, 9),
                                    ellipse_detection({150, 50}, 14, 10)});
    const auto s = extract_rest_samples({v});
    CHECK(s.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s[i].group == RestGroup::FrontHerd);
        CHECK(s[i].detection == i);
    }
}

TEST_CASE("missing labels throw") {
    auto v = one_frame_video(View::Front, Social::Herd, {ellipse_detection({30, 50}, 10, 8)});
    v.manifest.view.reset();
    CHECK_THROWS_WITH_AS(extract_rest_samples({v}), doctest::Contains("MissingViewLabel"), Error);
    v.manifest.view = View::Front;
    v.manifest.social.reset();
    CHECK_THROWS_WITH_AS(extract_rest_samples({v}), doctest::Contains("MissingSocialLabel"), Error);
}

TEST_CASE("dispersion of identical points is zero") {
    Matrix m(5, 2, 3.0);
    const std::vector<std::size_t> rows{0, 1, 2, 3, 4};
    CHECK(dispersion(m, rows) == 0.0);
}

TEST_CASE("dispersion is the RMS distance to the mean") {
    Matrix m(4, 2, std::vector<double>{1, 0, -1, 0, 0, 1, 0, -1});
    const std::vector<std::size_t> rows{0, 1, 2, 3};
    CHECK(dispersion(m, rows) == doctest::Approx(1.0));
    const std::vector<std::size_t> pair{0, 1};
    CHECK(dispersion(m, pair) == doctest::Approx(1.0));
}

TEST_CASE("dispersion ignores translation and duplication") {
    Rng rng(2);
    Matrix m(10, 2);
    for (auto& v : m.values()) v = rng.normal();
    std::vector<std::size_t> rows(10);
    for (std::size_t i = 0; i < 10; ++i) rows[i] = i;
    const double base = dispersion(m, rows);

    Matrix shifted = m;
    for (std::size_t i = 0; i < 10; ++i) {
        shifted(i, 0) += 100.0;
        shifted(i, 1) -= 7.0;
    }
    CHECK(dispersion(shifted, rows) == doctest::Approx(base).epsilon(1e-9));

    std::vector<std::size_t> twice = rows;
    twice.insert(twice.end(), rows.begin(), rows.end());
    CHECK(dispersion(m, twice) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("herd silhouettes scatter more than single ones in both views") {
    const auto out = gen_resting(RestingSpec{}, 13);
    const auto report = analyze_resting(extract_rest_samples(videos_of(out)), RestConfig{});
    REQUIRE(report.views.size() == 2);
    for (const auto& v : report.views) {
        REQUIRE(v.ratio);
        CHECK(*v.ratio > 1.5);
        CHECK(v.embedding.rows() == v.sample_rows.size());
    }
}

TEST_CASE("a view with too few samples throws") {
    RestingSpec spec;
    spec.single_frames = 10;
    spec.herd_frames = 5;
    CHECK_THROWS_WITH_AS(analyze_resting(extract_rest_samples(videos_of(gen_resting(spec, 1))), RestConfig{}),
                         doctest::Contains("TooFewSamples"), Error);
}

TEST_CASE("a view without samples is skipped with a warning") {
    auto samples = extract_rest_samples(videos_of(gen_resting(RestingSpec{}, 2)));
    std::erase_if(samples, [](const RestSample& s) { return view_of(s.group) == View::Side; });
    std::vector<std::string> warnings;
    const auto report = analyze_resting(samples, RestConfig{}, &warnings);
    CHECK(report.views.size() == 1);
    CHECK(report.views[0].view == View::Front);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("group mapping round-trips") {
    for (auto g : kRestGroups) CHECK(rest_group(view_of(g), social_of(g)) == g);
}
