#ifndef HERDLENS_CLUSTER_HPP
#define HERDLENS_CLUSTER_HPP

#include "herdlens/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace herdlens {

struct ClusterConfig {
    int k = 10;
    int max_iters = 300;
    /// Convergence threshold on the largest centroid shift, measured relative
    /// to the data's overall standard deviation.
    double tol = 1e-6;
    std::uint64_t seed = 42;
};

struct ClusterResult {
    std::vector<int> labels;
    Matrix centroids;
    double inertia = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Inertia after every Lloyd update, for monotonicity checks.
    std::vector<double> inertia_history;
};

/// K-means with k-means++ seeding and Lloyd iterations. Empty clusters claim
/// the point farthest from its centroid; a cluster stays empty only when every
/// point already sits on its centroid. Throws TooFewPoints when n < k.
ClusterResult kmeans(const Matrix& data, const ClusterConfig& config);

/// Sum of squared distances from each point to its assigned centroid.
double inertia(const Matrix& data, std::span<const int> labels, const Matrix& centroids);

/// Chance-corrected agreement of two labelings. Throws LengthMismatch.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

struct GroupDistribution {
    std::vector<std::int64_t> counts;
    int dominant = 0;
    /// Largest count over the group size.
    double dominance = 0.0;
    std::int64_t total = 0;
    int occupied = 0;
};

/// Histogram of cluster labels per group; the dominant cluster is the
/// argmax, ties to the lowest id. Throws EmptyGroup for a group without
/// points and LengthMismatch for unaligned inputs.
std::vector<GroupDistribution> cluster_distribution(std::span<const int> labels,
                                                    std::span<const int> group_of_point,
                                                    int n_groups, int k);

std::size_t count_distinct_rows(const Matrix& data);

} // namespace herdlens

#endif
