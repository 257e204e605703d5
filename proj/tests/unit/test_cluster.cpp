#include "doctest.h"

#include "herdlens/cluster.hpp"
#include "herdlens/error.hpp"
#include "herdlens/rng.hpp"
#include "herdlens/synth.hpp"

#include <algorithm>
#include <vector>

using namespace herdlens;

namespace {

void check_monotone(const ClusterResult& r) {
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
        CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] * (1.0 + 1e-12));
    }
}

} // namespace

TEST_CASE("ARI matches sklearn reference values") {
    struct Case {
        std::vector<int> a;
        std::vector<int> b;
        double ari;
    };
    // sklearn.metrics.adjusted_rand_score
    const Case cases[] = {
        {{0, 0, 1, 1}, {0, 0, 1, 2}, 0.5714285714285714},
        {{0, 0, 0, 1, 1, 1}, {0, 0, 1, 1, 2, 2}, 0.24242424242424243},
        {{0, 1, 2, 0, 1, 2}, {1, 1, 0, 0, 2, 2}, -0.25},
    };
    for (const auto& c : cases) CHECK(adjusted_rand_index(c.a, c.b) == doctest::Approx(c.ari).epsilon(1e-12));
}

TEST_CASE("ARI is one under relabeling and rejects unequal lengths") {
    const std::vector<int> a{0, 0, 1, 1, 2, 2};
    const std::vector<int> b{5, 5, 3, 3, 9, 9};
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(1.0));
    CHECK_THROWS_WITH_AS(adjusted_rand_index(a, std::vector<int>{0}), doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("ten well-separated blobs are recovered") {
    BlobSpec spec;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto blobs = gen_blob_data(spec, seed);
        ClusterConfig cfg;
        cfg.seed = seed;
        const auto r = kmeans(blobs.points, cfg);
        CHECK(adjusted_rand_index(r.labels, blobs.labels) >= 0.95);
        CHECK(r.converged);
        check_monotone(r);
    }
}

TEST_CASE("inertia never increases on random data") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m(150, 3);
        for (auto& v : m.values()) v = rng.normal();
        ClusterConfig cfg;
        cfg.k = 2 + trial % 8;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto r = kmeans(m, cfg);
        check_monotone(r);
        CHECK(r.inertia == doctest::Approx(inertia(m, r.labels, r.centroids)));
    }
}

TEST_CASE("converged centroids are the means of their members") {
    Rng rng(9);
    Matrix m(100, 2);
    for (auto& v : m.values()) v = rng.uniform();
    ClusterConfig cfg;
    cfg.k = 4;
    cfg.tol = 1e-12;
    const auto r = kmeans(m, cfg);
    REQUIRE(r.converged);
    for (std::size_t c = 0; c < 4; ++c) {
        double sx = 0.0, sy = 0.0, n = 0.0;
        for (std::size_t i = 0; i < 100; ++i) {
            if (r.labels[i] == static_cast<int>(c)) {
                sx += m(i, 0);
                sy += m(i, 1);
                n += 1.0;
            }
        }
        REQUIRE(n > 0.0);
        CHECK(r.centroids(c, 0) == doctest::Approx(sx / n).epsilon(1e-9));
        CHECK(r.centroids(c, 1) == doctest::Approx(sy / n).epsilon(1e-9));
    }
    // Every point sits with its nearest centroid.
    for (std::size_t i = 0; i < 100; ++i) {
        const double own = squared_distance(m.row(i), r.centroids.row(std::size_t(r.labels[i])));
        for (std::size_t c = 0; c < 4; ++c) CHECK(own <= squared_distance(m.row(i), r.centroids.row(c)) + 1e-12);
    }
}

TEST_CASE("k = 1 puts every point in one cluster at the mean") {
    Matrix m(3, 1, std::vector<double>{1.0, 2.0, 6.0});
    ClusterConfig cfg;
    cfg.k = 1;
    const auto r = kmeans(m, cfg);
    CHECK(std::all_of(r.labels.begin(), r.labels.end(), [](int l) { return l == 0; }));
    CHECK(r.centroids(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("k above n throws TooFewPoints") {
    ClusterConfig cfg;
    cfg.k = 4;
    CHECK_THROWS_WITH_AS(kmeans(Matrix(3, 2), cfg), doctest::Contains("TooFewPoints"), Error);
}

TEST_CASE("duplicate points are handled without empty-cluster failure") {
    Matrix m(6, 2, std::vector<double>{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1});
    ClusterConfig cfg;
    cfg.k = 3;
    const auto r = kmeans(m, cfg);
    CHECK(r.inertia == doctest::Approx(0.0));
    CHECK(r.labels[0] == r.labels[1]);
    CHECK(r.labels[3] == r.labels[4]);
    CHECK(count_distinct_rows(m) == 2);
}

TEST_CASE("kmeans is deterministic for a seed") {
    const auto blobs = gen_blob_data(BlobSpec{}, 5);
    ClusterConfig cfg;
    cfg.seed = 11;
    const auto a = kmeans(blobs.points, cfg);
    const auto b = kmeans(blobs.points, cfg);
    CHECK(a.labels == b.labels);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("cluster distribution reports dominance per group") {
    const std::vector<int> labels{0, 0, 1, 2, 2, 2, 1};
    const std::vector<int> groups{0, 0, 0, 1, 1, 1, 1};
    const auto d = cluster_distribution(labels, groups, 2, 3);
    CHECK(d[0].counts == std::vector<std::int64_t>{2, 1, 0});
    CHECK(d[0].dominant == 0);
    CHECK(d[0].dominance == doctest::Approx(2.0 / 3.0));
    CHECK(d[0].occupied == 2);
    CHECK(d[1].dominant == 2);
    CHECK(d[1].dominance == doctest::Approx(0.75));
}

TEST_CASE("dominance ties go to the lowest cluster id") {
    const auto d = cluster_distribution(std::vector<int>{2, 1}, std::vector<int>{0, 0}, 1, 3);
    CHECK(d[0].dominant == 1);
}

TEST_CASE("a group without points throws EmptyGroup") {
    CHECK_THROWS_WITH_AS(cluster_distribution(std::vector<int>{0}, std::vector<int>{0}, 2, 1),
                         doctest::Contains("EmptyGroup"), Error);
}
