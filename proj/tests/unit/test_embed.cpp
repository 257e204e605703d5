#include "doctest.h"

#include "herdlens/embed.hpp"
#include "herdlens/error.hpp"
#include "herdlens/synth.hpp"

#include "../support/oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>

using namespace herdlens;

namespace {

Matrix random_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, d);
    for (auto& v : m.values()) v = rng.normal();
    return m;
}

Eigen::MatrixXd weight_matrix(const FuzzyGraph& g) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.n_points),
                                              static_cast<Eigen::Index>(g.n_points));
    for (const auto& e : g.edges) w(e.from, e.to) = e.weight;
    return w;
}

// Checks every spectral column against the symmetric normalized Laplacian
// solved by Eigen: D^1/2 u must be an eigenvector whose eigenvalue is the
// matching nontrivial one.
void check_spectral(const FuzzyGraph& g, const Matrix& coords, double tol) {
    const Eigen::MatrixXd w = weight_matrix(g);
    const Eigen::VectorXd deg = w.rowwise().sum();
    const Eigen::VectorXd isd = deg.cwiseSqrt().cwiseInverse();
    const Eigen::Index n = w.rows();
    const Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) - isd.asDiagonal() * w * isd.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    REQUIRE(solver.info() == Eigen::Success);
    for (std::size_t c = 0; c < coords.cols(); ++c) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = coords(static_cast<std::size_t>(i), c) * std::sqrt(deg(i));
        v.normalize();
        const double lambda = v.dot(lap * v);
        CHECK(lambda == doctest::Approx(solver.eigenvalues()(static_cast<Eigen::Index>(c) + 1)).epsilon(tol));
        CHECK((lap * v - lambda * v).norm() < tol);
    }
}

} // namespace

TEST_CASE("exact kNN matches the brute-force oracle") {
    const auto data = random_cloud(80, 5, 1);
    const auto knn = knn_exact(data, 7);
    const auto ref = oracle::knn(data, 7);
    for (std::size_t i = 0; i < 80; ++i) {
        for (std::size_t s = 0; s < 7; ++s) {
            CHECK(knn.index(i, s) == ref[i][s].second);
            CHECK(knn.distance(i, s) == doctest::Approx(ref[i][s].first).epsilon(1e-12));
        }
    }
}

TEST_CASE("kNN breaks distance ties by lower index") {
    Matrix line(4, 1, std::vector<double>{0.0, 1.0, -1.0, 2.0});
    const auto knn = knn_exact(line, 2);
    CHECK(knn.index(0, 0) == 1);
    CHECK(knn.index(0, 1) == 2);
}

TEST_CASE("kNN rejects k >= n") {
    CHECK_THROWS_WITH_AS(knn_exact(random_cloud(5, 2, 1), 5), doctest::Contains("TooFewPoints"), Error);
}

TEST_CASE("bandwidth search hits log2(k) within 1e-5") {
    const auto data = random_cloud(200, 6, 2);
    for (std::size_t k : {5u, 15u, 40u}) {
        const auto knn = knn_exact(data, k);
        const auto g = fuzzy_simplicial_set(knn);
        double worst = 0.0;
        for (std::size_t i = 0; i < 200; ++i) {
            worst = std::max(worst, std::abs(membership_sum(knn, i, g.rho[i], g.sigma[i]) - std::log2(double(k))));
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("nearest neighbour always has membership one") {
    const auto knn = knn_exact(random_cloud(50, 3, 3), 10);
    const auto g = fuzzy_simplicial_set(knn);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(g.rho[i] == knn.distance(i, 0));
        CHECK(g.directed[i * 10] == doctest::Approx(1.0));
    }
}

TEST_CASE("fuzzy union is symmetric and equals a + b - ab") {
    const auto knn = knn_exact(random_cloud(60, 4, 4), 8);
    const auto g = fuzzy_simplicial_set(knn);
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> directed;
    for (std::size_t i = 0; i < 60; ++i) {
        for (std::size_t s = 0; s < 8; ++s) directed[{std::uint32_t(i), knn.index(i, s)}] = g.directed[i * 8 + s];
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> merged;
    for (const auto& e : g.edges) merged[{e.from, e.to}] = e.weight;
    for (const auto& [key, w] : merged) {
        const auto back = merged.find({key.second, key.first});
        REQUIRE(back != merged.end());
        CHECK(back->second == w);
        const double a = directed.count(key) ? directed[key] : 0.0;
        const double b = directed.count({key.second, key.first}) ? directed[{key.second, key.first}] : 0.0;
        CHECK(w == doctest::Approx(a + b - a * b).epsilon(1e-12));
    }
    for (const auto& [key, a] : directed) {
        if (a > 0.0) CHECK(merged.count(key) == 1);
    }
}

TEST_CASE("curve fit agrees with scipy and is a least-squares minimum") {
    for (const auto& ref : oracle::kScipyCurves) {
        const auto fit = fit_curve(ref.min_dist);
        CHECK(fit.a == doctest::Approx(ref.a).epsilon(1e-4));
        CHECK(fit.b == doctest::Approx(ref.b).epsilon(1e-4));
        const double sse = oracle::curve_sse(ref.min_dist, fit.a, fit.b);
        for (double da : {-1e-3, 1e-3}) {
            for (double db : {-1e-3, 1e-3}) {
                CHECK(sse <= oracle::curve_sse(ref.min_dist, fit.a + da, fit.b + db));
            }
        }
    }
}

TEST_CASE("curve fit rejects min_dist outside (0, 1)") {
    CHECK_THROWS_AS(fit_curve(0.0), Error);
    CHECK_THROWS_AS(fit_curve(1.0), Error);
}

TEST_CASE("dense spectral layout matches the Eigen Laplacian") {
    const auto g = fuzzy_simplicial_set(knn_exact(random_cloud(60, 3, 5), 10));
    REQUIRE(is_connected(g));
    const auto init = spectral_init(g, 2, 9, SpectralSolver::Dense);
    CHECK_FALSE(init.fallback);
    check_spectral(g, init.coords, 1e-4);
}

TEST_CASE("subspace iteration reaches the same eigenvectors") {
    const auto g = fuzzy_simplicial_set(knn_exact(random_cloud(300, 3, 6), 15));
    REQUIRE(is_connected(g));
    const auto init = spectral_init(g, 2, 9, SpectralSolver::Sparse);
    check_spectral(g, init.coords, 1e-4);
}

TEST_CASE("spectral layout has max-abs 10 and a positive extreme per column") {
    const auto g = fuzzy_simplicial_set(knn_exact(random_cloud(60, 3, 7), 10));
    const auto init = spectral_init(g, 2, 1);
    double overall = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
        double best = 0.0;
        double signed_best = 0.0;
        for (std::size_t i = 0; i < 60; ++i) {
            if (std::abs(init.coords(i, c)) > best) {
                best = std::abs(init.coords(i, c));
                signed_best = init.coords(i, c);
            }
        }
        CHECK(signed_best > 0.0);
        overall = std::max(overall, best);
    }
    CHECK(overall == doctest::Approx(kInitExtent).epsilon(1e-3));
}

TEST_CASE("path graph Fiedler coordinate is monotone along the path") {
    Matrix line(40, 1);
    for (std::size_t i = 0; i < 40; ++i) line(i, 0) = std::pow(1.05, double(i));
    const auto g = fuzzy_simplicial_set(knn_exact(line, 2));
    REQUIRE(is_connected(g));
    const auto init = spectral_init(g, 1, 3);
    const double dir = init.coords(39, 0) > init.coords(0, 0) ? 1.0 : -1.0;
    for (std::size_t i = 1; i < 40; ++i) CHECK(dir * (init.coords(i, 0) - init.coords(i - 1, 0)) > 0.0);
}

TEST_CASE("disconnected graph falls back to uniform [-10, 10]") {
    Matrix two(20, 1);
    for (std::size_t i = 0; i < 20; ++i) two(i, 0) = (i < 10 ? 0.0 : 1000.0) + double(i % 10);
    const auto g = fuzzy_simplicial_set(knn_exact(two, 3));
    CHECK_FALSE(is_connected(g));
    const auto init = spectral_init(g, 2, 3);
    CHECK(init.fallback);
    for (double v : init.coords.values()) {
        CHECK(v >= -kInitExtent);
        CHECK(v <= kInitExtent);
    }
}

TEST_CASE("umap is bit-identical for a fixed seed and separates blobs") {
    BlobSpec spec;
    spec.k = 3;
    spec.per_blob = 60;
    spec.dim = 10;
    spec.sigma = 0.5;
    const auto blobs = gen_blob_data(spec, 11);
    EmbeddingConfig cfg;
    cfg.n_epochs = 200;
    const auto a = umap(blobs.points, cfg);
    const auto b = umap(blobs.points, cfg);
    CHECK(a.embedding == b.embedding);
    CHECK(oracle::knn_purity(a.embedding, blobs.labels, 10) >= 0.9);
    cfg.seed = 43;
    CHECK_FALSE(umap(blobs.points, cfg).embedding == a.embedding);
}

TEST_CASE("umap clamps n_neighbors for tiny inputs and rejects one point") {
    EmbeddingConfig cfg;
    cfg.n_epochs = 10;
    const auto r = umap(random_cloud(6, 2, 1), cfg);
    CHECK(r.effective_neighbors == 5);
    CHECK(r.embedding.rows() == 6);
    CHECK_THROWS_WITH_AS(umap(random_cloud(1, 2, 1), cfg), doctest::Contains("TooFewPoints"), Error);
}

TEST_CASE("zero epochs returns the initial layout") {
    const auto g = fuzzy_simplicial_set(knn_exact(random_cloud(30, 2, 8), 5));
    const auto init = spectral_init(g, 2, 1);
    EmbeddingConfig cfg;
    CHECK(optimize_layout(g, init.coords, cfg, fit_curve(0.1), 0) == init.coords);
}

TEST_CASE("default epoch count depends on size") {
    CHECK(default_epochs(9999) == 500);
    CHECK(default_epochs(10000) == 200);
}
