#include "doctest.h"

#include "herdlens/error.hpp"
#include "herdlens/rng.hpp"
#include "herdlens/gait.hpp"
#include "herdlens/synth.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace herdlens;

namespace {

PoseSet random_pose(Rng& rng, double confidence = 0.9) {
    PoseSet pose;
    for (auto& k : pose) k = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 80.0), confidence};
    return pose;
}

std::vector<VideoData> videos_of(const SynthOutput& out) {
    std::vector<VideoData> v;
    for (const auto& sv : out.videos) v.push_back(sv.video);
    return v;
}

} // namespace

TEST_CASE("pose feature is invariant to translation and scale") {
    Rng rng(1);
    const auto pose = random_pose(rng);
    const BBox box{0.0, 0.0, 100.0, 80.0};
    const auto base = pose_to_feature(pose, box, 0.3, 13);
    REQUIRE(base);

    PoseSet moved = pose;
    for (auto& k : moved) {
        k.x = 3.0 * k.x + 17.0;
        k.y = 3.0 * k.y - 5.0;
    }
    const auto scaled = pose_to_feature(moved, BBox{17.0, -5.0, 300.0, 240.0}, 0.3, 13);
    REQUIRE(scaled);
    for (std::size_t i = 0; i < kGaitFeatureSize; ++i) CHECK((*scaled)[i] == doctest::Approx((*base)[i]).epsilon(1e-12));
}

TEST_CASE("pose feature centers on the confident keypoints") {
    Rng rng(2);
    auto pose = random_pose(rng);
    pose[4].confidence = 0.1;
    const auto f = pose_to_feature(pose, BBox{0, 0, 30, 40}, 0.3, 13);
    REQUIRE(f);
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < kNumKeypoints; ++j) {
        sx += (*f)[2 * j];
        sy += (*f)[2 * j + 1];
    }
    CHECK(sx == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sy == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((*f)[8] == 0.0);
    CHECK((*f)[9] == 0.0);
    // Diagonal of a 30 x 40 box is 50.
    double mx = 0.0;
    for (std::size_t j = 0; j < kNumKeypoints; ++j) {
        if (j != 4) mx += pose[j].x;
    }
    mx /= 16.0;
    CHECK((*f)[0] == doctest::Approx((pose[0].x - mx) / 50.0));
}

TEST_CASE("too few confident keypoints drops the pose") {
    Rng rng(3);
    auto pose = random_pose(rng);
    for (int j = 0; j < 4; ++j) pose[static_cast<std::size_t>(j)].confidence = 0.2;
    CHECK(pose_to_feature(pose, BBox{0, 0, 10, 10}, 0.3, 13).has_value());
    pose[4].confidence = 0.2;
    CHECK_FALSE(pose_to_feature(pose, BBox{0, 0, 10, 10}, 0.3, 13).has_value());
}

TEST_CASE("zero-diagonal box throws DegenerateBBox") {
    Rng rng(4);
    CHECK_THROWS_WITH_AS(pose_to_feature(random_pose(rng), BBox{5, 5, 0, 0}, 0.3, 13),
                         doctest::Contains("DegenerateBBox"), Error);
}

TEST_CASE("single-template animals stay in one cluster") {
    GaitSpec spec;
    const auto out = gen_gait(spec, 21);
    GaitConfig cfg;
    const auto report = analyze_running(videos_of(out), cfg);
    REQUIRE(report.animals.size() == 10);
    for (const auto& a : report.animals) CHECK(a.dominance >= 0.8);
}

TEST_CASE("two disjoint templates separate with k = 2") {
    GaitSpec spec;
    spec.animals = 6;
    spec.templates = 2;
    const auto out = gen_gait(spec, 5);
    GaitConfig cfg;
    cfg.cluster.k = 2;
    const auto report = analyze_running(videos_of(out), cfg);

    std::map<std::string, int> template_of;
    for (const auto& a : out.truth["animals"]) template_of[a["animal_id"].get<std::string>()] = a["template"].get<int>();
    std::map<int, std::map<int, int>> counts;
    for (std::size_t i = 0; i < report.features.size(); ++i) {
        ++counts[template_of.at(report.features[i].animal_id)][report.labels[i]];
    }
    std::set<int> dominants;
    double agree = 0.0;
    for (const auto& [tmpl, hist] : counts) {
        int best = -1, best_n = -1;
        for (const auto& [label, n] : hist) {
            if (n > best_n) {
                best = label;
                best_n = n;
            }
        }
        dominants.insert(best);
        agree += best_n;
    }
    CHECK(dominants.size() == 2);
    CHECK(agree / static_cast<double>(report.features.size()) >= 0.9);
}

TEST_CASE("feature-space clustering is also available") {
    GaitSpec spec;
    spec.animals = 4;
    spec.templates = 4;
    spec.frames = 20;
    GaitConfig cfg;
    cfg.space = ClusterSpace::Features;
    cfg.cluster.k = 4;
    const auto report = analyze_running(videos_of(gen_gait(spec, 8)), cfg);
    for (const auto& a : report.animals) CHECK(a.dominance == 1.0);
}

TEST_CASE("gait analysis needs enough features") {
    GaitSpec spec;
    spec.animals = 1;
    spec.frames = 2;
    CHECK_THROWS_WITH_AS(analyze_running(videos_of(gen_gait(spec, 1)), GaitConfig{}),
                         doctest::Contains("TooFew"), Error);
}

TEST_CASE("cluster space names round-trip") {
    for (auto s : {ClusterSpace::Embedding, ClusterSpace::Features}) CHECK(parse_cluster_space(to_string(s)) == s);
    CHECK_FALSE(parse_cluster_space("pixels"));
}
