#ifndef HERDLENS_EMBED_HPP
#define HERDLENS_EMBED_HPP

#include "herdlens/matrix.hpp"

#include <cstdint>
#include <optional>
#include <vector>

/**
 * @file embed.hpp
 *
 * @brief UMAP built from its parts: exact kNN, fuzzy simplicial set,
 * spectral initialization and SGD layout.
 *
 * Every stage is single-threaded and seeded, so a fixed configuration
 * reproduces bit-identical coordinates on one platform.
 */

namespace herdlens {

enum class Metric { Euclidean };

struct EmbeddingConfig {
    int n_neighbors = 15;
    double min_dist = 0.1;
    int n_components = 2;
    Metric metric = Metric::Euclidean;
    /// Unset means 500 epochs below 10,000 points, 200 otherwise.
    std::optional<int> n_epochs;
    double learning_rate = 1.0;
    int negative_sample_rate = 5;
    std::uint64_t seed = 42;
};

int default_epochs(std::size_t n_points);

/// Row-major n x k neighbour table, each row sorted by (distance, index).
struct KnnResult {
    std::size_t n_points = 0;
    std::size_t k = 0;
    std::vector<std::uint32_t> indices;
    std::vector<double> distances;

    std::uint32_t index(std::size_t point, std::size_t slot) const { return indices[point * k + slot]; }
    double distance(std::size_t point, std::size_t slot) const { return distances[point * k + slot]; }
};

/// Exact Euclidean neighbours, self excluded, ties broken by lower index.
/// Throws TooFewPoints unless n > k >= 1.
KnnResult knn_exact(const Matrix& data, std::size_t k);

struct FuzzyEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    double weight = 0.0;
};

struct FuzzyGraph {
    std::size_t n_points = 0;
    /// Symmetrized edges listed in both directions, sorted by (from, to).
    std::vector<FuzzyEdge> edges;
    std::vector<double> rho;
    std::vector<double> sigma;
    /// Directed membership strengths before the fuzzy union, laid out like
    /// KnnResult.
    std::vector<double> directed;
};

inline constexpr double kSigmaFloor = 1e-8;
inline constexpr double kSigmaCeiling = 1e4;
inline constexpr int kSigmaIterations = 64;

/// Calibrates each point's bandwidth so its neighbour memberships sum to
/// log2(k), then merges directions with w = a + b - a*b.
FuzzyGraph fuzzy_simplicial_set(const KnnResult& knn);

/// Sum of the directed memberships of one point, the quantity the bandwidth
/// search drives to log2(k).
double membership_sum(const KnnResult& knn, std::size_t point, double rho, double sigma);

struct CurveParams {
    double a = 0.0;
    double b = 0.0;
};

/// Least-squares fit of 1 / (1 + a d^(2b)) to the offset exponential
/// (1 for d <= min_dist, exp(-(d - min_dist)) beyond) on 300 points in [0, 3].
CurveParams fit_curve(double min_dist);

double low_dim_kernel(const CurveParams& curve, double distance);

struct SpectralInit {
    Matrix coords;
    /// True when the graph was disconnected (or too small) and the uniform
    /// random fallback was used.
    bool fallback = false;
};

inline constexpr double kInitExtent = 10.0;
inline constexpr double kInitJitter = 1e-4;

bool is_connected(const FuzzyGraph& graph);

/// Auto picks the dense LAPACK solver up to 4096 points and block subspace
/// iteration beyond.
enum class SpectralSolver { Auto, Dense, Sparse };

/// Laplacian-eigenmap coordinates from the normalized graph Laplacian,
/// scaled to max-abs 10 with N(0, 1e-4) jitter; seeded uniform [-10, 10]
/// when the graph is disconnected.
SpectralInit spectral_init(const FuzzyGraph& graph, int n_components, std::uint64_t seed,
                           SpectralSolver solver = SpectralSolver::Auto);

/// SGD over the fuzzy graph: edges sampled in proportion to weight,
/// negative sampling for repulsion, clipped gradients and a linearly
/// decaying learning rate. `epochs` of zero returns `init` untouched.
Matrix optimize_layout(const FuzzyGraph& graph, Matrix init, const EmbeddingConfig& config,
                       const CurveParams& curve, int epochs);

struct UmapResult {
    Matrix embedding;
    bool spectral_fallback = false;
    /// n_neighbors after clamping to n - 1 for tiny inputs.
    int effective_neighbors = 0;
    int epochs = 0;
    CurveParams curve;
};

UmapResult umap(const Matrix& data, const EmbeddingConfig& config);

} // namespace herdlens

#endif
