#include "doctest.h"

#include "herdlens/error.hpp"
#include "herdlens/pipeline.hpp"
#include "herdlens/synth.hpp"

#include "../support/temp_dir.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

using namespace herdlens;

TEST_CASE("every scenario is byte-identical for a fixed seed") {
    for (auto scenario : kScenarios) {
        nlohmann::json params = nlohmann::json::object();
        if (scenario == Scenario::Motion) params = {{"vx", 3}, {"vy", 4}};
        testing::TempDir a("synth_a"), b("synth_b");
        write_synth(synthesize(scenario, params, 17), a.path());
        write_synth(synthesize(scenario, params, 17), b.path());
        CHECK(testing::tree(a.path()) == testing::tree(b.path()));
    }
}

TEST_CASE("different seeds give different data") {
    testing::TempDir a("synth_a"), b("synth_b");
    write_synth(synthesize(Scenario::Gait, {}, 1), a.path());
    write_synth(synthesize(Scenario::Gait, {}, 2), b.path());
    CHECK(testing::tree(a.path()) != testing::tree(b.path()));
}

TEST_CASE("synthetic videos pass validation") {
    for (auto scenario : kScenarios) {
        if (scenario == Scenario::Blobs) continue;
        nlohmann::json params = nlohmann::json::object();
        if (scenario == Scenario::Motion) params = {{"vx", 3}, {"vy", 4}};
        testing::TempDir dir("synth_valid");
        write_synth(synthesize(scenario, params, 3), dir.path());
        const auto outcome = validate_inputs({dir.path()});
        CHECK(outcome.ok());
        CHECK(outcome.videos > 0);
    }
}

TEST_CASE("unknown scenario parameters are rejected") {
    CHECK_THROWS_WITH_AS(synthesize(Scenario::Gait, {{"animalz", 3}}, 1), doctest::Contains("InvalidArgument"),
                         Error);
}

TEST_CASE("a single blob keeps every label at zero") {
    BlobSpec spec;
    spec.k = 1;
    const auto d = gen_blob_data(spec, 4);
    CHECK(d.points.rows() == 100);
    for (int l : d.labels) CHECK(l == 0);
}

TEST_CASE("blob centers respect the minimum separation") {
    BlobSpec spec;
    spec.dim = 34;
    spec.k = 3;
    const auto d = gen_blob_data(spec, 5);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            CHECK(std::sqrt(squared_distance(d.centers.row(i), d.centers.row(j))) >= spec.separation);
}

TEST_CASE("resting template draws follow the weights") {
    RestingSpec spec;
    spec.herd_frames = 400;
    spec.herd_templates = 3;
    spec.herd_template_weights = {0.7, 0.2, 0.1};
    const auto out = gen_resting(spec, 8);
    std::array<double, 3> counts{};
    double total = 0.0;
    for (const auto& v : out.truth["videos"]) {
        if (v["social"] != "herd") continue;
        for (const auto& a : v["assignments"]) {
            counts[a["template"].get<std::size_t>()] += 1.0;
            total += 1.0;
        }
    }
    // 4-sigma binomial bands.
    for (std::size_t t = 0; t < 3; ++t) {
        const double p = spec.herd_template_weights[t];
        CHECK(std::abs(counts[t] / total - p) <= 4.0 * std::sqrt(p * (1.0 - p) / total));
    }
}

TEST_CASE("motion truth follows the constant velocity") {
    const auto out = gen_motion(MotionSpec{});
    CHECK(out.truth["true_speed_px_per_s"].get<double>() == doctest::Approx(15.0));
    CHECK(out.videos.at(0).video.frames.size() == 20);
}

TEST_CASE("motion leaving the frame throws OutOfFrame") {
    MotionSpec spec;
    spec.velocity = {0.0, -10.0};
    CHECK_THROWS_WITH_AS(gen_motion(spec), doctest::Contains("OutOfFrame"), Error);
}

TEST_CASE("ellipse rasterization tests pixel centers") {
    // Pixel (r, c) is centered at (c, r); a unit circle at (2.5, 2.5) holds
    // exactly the four surrounding centers.
    BitGrid g(5, 5);
    rasterize_ellipse(g, {2.5, 2.5}, 1.0, 1.0);
    int set = 0;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) set += g(r, c) ? 1 : 0;
    CHECK(set == 4);
    CHECK(g(2, 2));
    CHECK(g(3, 3));
}

TEST_CASE("scenario names round-trip") {
    for (auto s : kScenarios) CHECK(parse_scenario(to_string(s)) == s);
    CHECK_FALSE(parse_scenario("cows"));
}
