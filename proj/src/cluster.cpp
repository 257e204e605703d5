#include "herdlens/cluster.hpp"

#include "herdlens/error.hpp"
#include "herdlens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace herdlens {

namespace {

Matrix kmeanspp_seed(const Matrix& data, int k, Rng& rng) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    Matrix centers(static_cast<std::size_t>(k), d);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

    std::size_t chosen = rng.index(n);
    for (int c = 0; c < k; ++c) {
        std::copy(data.row(chosen).begin(), data.row(chosen).end(), centers.row(static_cast<std::size_t>(c)).begin());
        if (c + 1 == k) {
            break;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(data.row(i), centers.row(static_cast<std::size_t>(c))));
            total += nearest[i];
        }
        if (!(total > 0.0)) {
            // Every point already coincides with a center; duplicates follow.
            continue;
        }
        // D^2 sampling. Zero-weight points are never drawn; if rounding keeps
        // the running sum below the target, the last positive point wins.
        const double target = rng.uniform() * total;
        double running = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest[i] > 0.0) {
                chosen = i;
                running += nearest[i];
                if (running > target) {
                    break;
                }
            }
        }
    }
    return centers;
}

// Assigns each point to its nearest centroid (ties to the lowest index) and
// returns per-point squared distances.
std::vector<double> assign(const Matrix& data, const Matrix& centers, std::vector<int>& labels) {
    const std::size_t n = data.rows();
    const std::size_t k = centers.rows();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double dd = squared_distance(data.row(i), centers.row(c));
            if (dd < best) {
                best = dd;
                arg = static_cast<int>(c);
            }
        }
        labels[i] = arg;
        dist[i] = best;
    }
    return dist;
}

void repair_empty(std::vector<int>& labels, std::vector<double>& dist, int k) {
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] > 0) {
            continue;
        }
        std::size_t far = 0;
        double far_dist = 0.0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (sizes[static_cast<std::size_t>(labels[i])] > 1 && dist[i] > far_dist) {
                far_dist = dist[i];
                far = i;
            }
        }
        if (!(far_dist > 0.0)) {
            continue;
        }
        --sizes[static_cast<std::size_t>(labels[far])];
        labels[far] = c;
        ++sizes[static_cast<std::size_t>(c)];
        dist[far] = 0.0;
    }
}

Matrix update(const Matrix& data, const std::vector<int>& labels, const Matrix& previous) {
    const std::size_t k = previous.rows();
    const std::size_t d = data.cols();
    Matrix sums(k, d);
    std::vector<std::int64_t> sizes(k, 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        ++sizes[c];
        auto row = data.row(i);
        auto acc = sums.row(c);
        for (std::size_t j = 0; j < d; ++j) acc[j] += row[j];
    }
    Matrix out = previous;
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
            continue;
        }
        for (std::size_t j = 0; j < d; ++j) {
            out(c, j) = sums(c, j) / static_cast<double>(sizes[c]);
        }
    }
    return out;
}

double data_scale(const Matrix& data) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += data(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = data(i, j) - mean;
            var += diff * diff;
        }
        total += var / static_cast<double>(n);
    }
    return std::sqrt(total);
}

} // namespace

double inertia(const Matrix& data, std::span<const int> labels, const Matrix& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        total += squared_distance(data.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
    }
    return total;
}

ClusterResult kmeans(const Matrix& data, const ClusterConfig& config) {
    if (config.k < 1 || config.max_iters < 1 || !(config.tol > 0.0)) {
        fail(ErrorCode::InvalidArgument, "k, max_iters and tol must be positive");
    }
    const std::size_t n = data.rows();
    if (n < static_cast<std::size_t>(config.k)) {
        fail(ErrorCode::TooFewPoints,
             "k = " + std::to_string(config.k) + " exceeds the " + std::to_string(n) + " points");
    }
    Rng rng(config.seed);
    ClusterResult result;
    result.labels.assign(n, 0);
    Matrix centers = kmeanspp_seed(data, config.k, rng);
    const double scale = data_scale(data);

    for (int it = 0; it < config.max_iters; ++it) {
        auto dist = assign(data, centers, result.labels);
        repair_empty(result.labels, dist, config.k);
        Matrix next = update(data, result.labels, centers);

        double shift = 0.0;
        for (std::size_t c = 0; c < next.rows(); ++c) {
            shift = std::max(shift, std::sqrt(squared_distance(next.row(c), centers.row(c))));
        }
        centers = std::move(next);
        result.iterations = it + 1;
        result.inertia_history.push_back(inertia(data, result.labels, centers));
        if (!(scale > 0.0) || shift / scale < config.tol) {
            result.converged = true;
            break;
        }
    }
    result.centroids = std::move(centers);
    result.inertia = result.inertia_history.back();
    return result;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        fail(ErrorCode::LengthMismatch,
             std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " labels");
    }
    const std::size_t n = a.size();
    if (n < 2) {
        return 1.0;
    }
    std::map<std::pair<int, int>, std::int64_t> cells;
    std::map<int, std::int64_t> rows;
    std::map<int, std::int64_t> cols;
    for (std::size_t i = 0; i < n; ++i) {
        ++cells[{a[i], b[i]}];
        ++rows[a[i]];
        ++cols[b[i]];
    }
    auto pairs = [](std::int64_t m) { return static_cast<double>(m) * static_cast<double>(m - 1) / 2.0; };
    double index = 0.0;
    for (const auto& [key, count] : cells) index += pairs(count);
    double sum_rows = 0.0;
    for (const auto& [key, count] : rows) sum_rows += pairs(count);
    double sum_cols = 0.0;
    for (const auto& [key, count] : cols) sum_cols += pairs(count);
    const double expected = sum_rows * sum_cols / pairs(static_cast<std::int64_t>(n));
    const double maximum = 0.5 * (sum_rows + sum_cols);
    if (maximum == expected) {
        return 1.0;
    }
    return (index - expected) / (maximum - expected);
}

std::vector<GroupDistribution> cluster_distribution(std::span<const int> labels,
                                                    std::span<const int> group_of_point,
                                                    int n_groups, int k) {
    if (labels.size() != group_of_point.size()) {
        fail(ErrorCode::LengthMismatch, "labels and groups differ in length");
    }
    std::vector<GroupDistribution> out(static_cast<std::size_t>(std::max(n_groups, 0)));
    for (auto& g : out) {
        g.counts.assign(static_cast<std::size_t>(k), 0);
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int g = group_of_point[i];
        const int l = labels[i];
        if (g < 0 || g >= n_groups || l < 0 || l >= k) {
            fail(ErrorCode::InvalidArgument, "label or group id out of range");
        }
        ++out[static_cast<std::size_t>(g)].counts[static_cast<std::size_t>(l)];
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        auto& dist = out[g];
        for (std::size_t c = 0; c < dist.counts.size(); ++c) {
            dist.total += dist.counts[c];
            if (dist.counts[c] > 0) ++dist.occupied;
            if (dist.counts[c] > dist.counts[static_cast<std::size_t>(dist.dominant)]) {
                dist.dominant = static_cast<int>(c);
            }
        }
        if (dist.total == 0) {
            fail(ErrorCode::EmptyGroup, "group " + std::to_string(g) + " has no points");
        }
        dist.dominance = static_cast<double>(dist.counts[static_cast<std::size_t>(dist.dominant)]) /
                         static_cast<double>(dist.total);
    }
    return out;
}

std::size_t count_distinct_rows(const Matrix& data) {
    std::set<std::vector<double>> rows;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        rows.emplace(data.row(i).begin(), data.row(i).end());
    }
    return rows.size();
}

} // namespace herdlens
