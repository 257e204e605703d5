#include "doctest.h"

#include "herdlens/error.hpp"
#include "herdlens/rng.hpp"
#include "herdlens/speed.hpp"
#include "herdlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace herdlens;

namespace {

SpeedProfile motion_speeds(const MotionSpec& spec) {
    const auto out = gen_motion(spec);
    const auto& v = out.videos.at(0).video;
    return compute_speeds(track_primary_centroids(v), v.manifest.fps, v.manifest.frame_stride);
}

CentroidTrack make_track(const std::vector<std::tuple<std::int64_t, double, double, std::int64_t>>& pts) {
    CentroidTrack t;
    for (const auto& [f, x, y, a] : pts) t.points.push_back({f, {x, y}, a, 0});
    return t;
}

std::vector<double> sorted_raw(const SpeedProfile& p) {
    std::vector<double> v;
    for (const auto& s : p.steps) v.push_back(s.raw);
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("stationary object has zero speed") {
    MotionSpec spec;
    spec.velocity = {0.0, 0.0};
    const auto p = motion_speeds(spec);
    REQUIRE(p.steps.size() == 19);
    for (const auto& s : p.steps) {
        CHECK(s.raw == 0.0);
        CHECK(s.normalized == 0.0);
    }
}

TEST_CASE("constant velocity (3, 4) px per kept frame is 15 px/s") {
    const auto p = motion_speeds(MotionSpec{});
    for (const auto& s : p.steps) CHECK(std::abs(s.raw - 15.0) <= 0.02 * 15.0);
}

TEST_CASE("sub-pixel velocity stays within rasterization tolerance") {
    MotionSpec spec;
    spec.velocity = {2.3, 3.1};
    const auto out = gen_motion(spec);
    const double truth = out.truth["true_speed_px_per_s"].get<double>();
    const auto p = motion_speeds(spec);
    double sum = 0.0;
    for (const auto& s : p.steps) {
        sum += s.raw;
        CHECK(std::abs(s.raw - truth) <= 0.05 * truth);
    }
    CHECK(std::abs(sum / double(p.steps.size()) - truth) <= 0.02 * truth);
}

TEST_CASE("largest-mask selection ignores the stationary distractor") {
    MotionSpec spec;
    spec.distractor = true;
    const auto p = motion_speeds(spec);
    for (const auto& s : p.steps) CHECK(std::abs(s.raw - 15.0) <= 0.02 * 15.0);
}

TEST_CASE("depth change doubles raw speed but not normalized speed") {
    MotionSpec spec;
    spec.depth_scales = {1.0, 2.0};
    spec.start = {40.25, 40.75};
    const auto out = gen_motion(spec);
    const auto p = motion_speeds(spec);
    const double truth = out.truth["true_normalized_speed"].get<double>();
    double lo = 1e300, hi = 0.0;
    for (const auto& s : p.steps) {
        lo = std::min(lo, s.normalized);
        hi = std::max(hi, s.normalized);
        CHECK(std::abs(s.normalized - truth) <= 0.05 * truth);
    }
    CHECK(hi / lo <= 1.05);
    CHECK(p.steps.back().raw / p.steps.front().raw == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("normalization follows sqrt(A_ref / A_start)") {
    const auto t = make_track({{0, 0, 0, 100}, {1, 3, 4, 400}, {2, 3, 4, 100}});
    const auto p = compute_speeds(t, 30.0, 10);
    CHECK(p.reference_area == doctest::Approx(200.0));
    CHECK(p.steps[0].raw == doctest::Approx(15.0));
    CHECK(p.steps[0].normalized == doctest::Approx(15.0 * std::sqrt(2.0)));
    CHECK(p.steps[1].raw == 0.0);
    CHECK(p.steps[1].normalized == 0.0);
    const auto linear = compute_speeds(t, 30.0, 10, 1.0);
    CHECK(linear.steps[0].normalized == doctest::Approx(30.0));
}

TEST_CASE("a gap spans several kept frames") {
    const auto p = compute_speeds(make_track({{0, 0, 0, 10}, {3, 9, 12, 10}}), 30.0, 10);
    REQUIRE(p.steps.size() == 1);
    CHECK(p.steps[0].span == 3);
    CHECK(p.steps[0].raw == doctest::Approx(15.0));
}

TEST_CASE("time reversal keeps the multiset of raw speeds") {
    Rng rng(4);
    std::vector<std::tuple<std::int64_t, double, double, std::int64_t>> fwd, rev;
    for (int i = 0; i < 12; ++i) fwd.emplace_back(i, rng.uniform(0, 100), rng.uniform(0, 100), 50);
    for (int i = 0; i < 12; ++i) {
        auto [f, x, y, a] = fwd[static_cast<std::size_t>(11 - i)];
        rev.emplace_back(i, x, y, a);
    }
    const auto a = sorted_raw(compute_speeds(make_track(fwd), 30.0, 10));
    const auto b = sorted_raw(compute_speeds(make_track(rev), 30.0, 10));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("uniform rescaling multiplies raw and normalized speeds alike") {
    Rng rng(6);
    std::vector<std::tuple<std::int64_t, double, double, std::int64_t>> base, big;
    for (int i = 0; i < 10; ++i) {
        const double x = rng.uniform(0, 50), y = rng.uniform(0, 50);
        const auto a = static_cast<std::int64_t>(100 + rng.index(300));
        base.emplace_back(i, x, y, a);
        big.emplace_back(i, 3.0 * x, 3.0 * y, 9 * a);
    }
    const auto p = compute_speeds(make_track(base), 30.0, 10);
    const auto q = compute_speeds(make_track(big), 30.0, 10);
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        CHECK(q.steps[i].raw == doctest::Approx(3.0 * p.steps[i].raw).epsilon(1e-9));
        CHECK(q.steps[i].normalized / q.steps[i].raw ==
              doctest::Approx(p.steps[i].normalized / p.steps[i].raw).epsilon(1e-9));
    }
}

TEST_CASE("terciles are contiguous with the remainder last") {
    const auto t = tercile_means({1, 2, 3, 4, 5, 6, 7});
    CHECK(*t[0] == doctest::Approx(1.5));
    CHECK(*t[1] == doctest::Approx(3.5));
    CHECK(*t[2] == doctest::Approx(6.0));
    const auto short_series = tercile_means({4, 8});
    CHECK_FALSE(short_series[0]);
    CHECK_FALSE(short_series[1]);
    CHECK(*short_series[2] == doctest::Approx(6.0));
}

TEST_CASE("equal terciles average to the global mean") {
    Rng rng(8);
    std::vector<double> s(30);
    for (auto& v : s) v = rng.uniform();
    const auto t = tercile_means(s);
    CHECK((*t[0] + *t[1] + *t[2]) / 3.0 == doctest::Approx(std::accumulate(s.begin(), s.end(), 0.0) / 30.0));
}

TEST_CASE("a single tracked frame is too short") {
    CHECK_THROWS_WITH_AS(compute_speeds(make_track({{0, 0, 0, 1}}), 30.0, 10), doctest::Contains("TooFewPoints"),
                         Error);
}

TEST_CASE("frames without masks become gaps") {
    MotionSpec spec;
    auto out = gen_motion(spec);
    auto& video = out.videos[0].video;
    video.frames[4].detections[0].mask.reset();
    const auto track = track_primary_centroids(video);
    CHECK(track.gaps == std::vector<std::int64_t>{4});
    const auto p = compute_speeds(track, 30.0, 10);
    CHECK(p.steps[3].span == 2);
    CHECK(p.steps[3].raw == doctest::Approx(15.0).epsilon(0.02));
}

TEST_CASE("a video without masks has no usable frames") {
    auto out = gen_motion(MotionSpec{});
    auto& video = out.videos[0].video;
    for (auto& f : video.frames) f.detections[0].mask.reset();
    CHECK_THROWS_WITH_AS(track_primary_centroids(video), doctest::Contains("NoUsableFrames"), Error);
}

TEST_CASE("leaving the frame throws OutOfFrame") {
    MotionSpec spec;
    spec.velocity = {40.0, 0.0};
    CHECK_THROWS_WITH_AS(gen_motion(spec), doctest::Contains("OutOfFrame"), Error);
}
