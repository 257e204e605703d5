#include "herdlens/embed.hpp"

#include "herdlens/error.hpp"
#include "herdlens/rng.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace herdlens {

int default_epochs(std::size_t n_points) { return n_points < 10000 ? 500 : 200; }

KnnResult knn_exact(const Matrix& data, std::size_t k) {
    const std::size_t n = data.rows();
    if (k < 1 || n <= k) {
        fail(ErrorCode::TooFewPoints,
             "need more than k = " + std::to_string(k) + " points, got " + std::to_string(n));
    }
    KnnResult out;
    out.n_points = n;
    out.k = k;
    out.indices.resize(n * k);
    out.distances.resize(n * k);

    std::vector<std::pair<double, std::uint32_t>> candidates;
    candidates.reserve(n - 1);
    auto closer = [](const auto& a, const auto& b) {
        return a.first < b.first || (a.first == b.first && a.second < b.second);
    };
    for (std::size_t i = 0; i < n; ++i) {
        candidates.clear();
        const auto xi = data.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                candidates.emplace_back(std::sqrt(squared_distance(xi, data.row(j))),
                                        static_cast<std::uint32_t>(j));
            }
        }
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                          candidates.end(), closer);
        for (std::size_t s = 0; s < k; ++s) {
            out.distances[i * k + s] = candidates[s].first;
            out.indices[i * k + s] = candidates[s].second;
        }
    }
    return out;
}

double membership_sum(const KnnResult& knn, std::size_t point, double rho, double sigma) {
    double sum = 0.0;
    for (std::size_t s = 0; s < knn.k; ++s) {
        const double gap = std::max(0.0, knn.distance(point, s) - rho);
        sum += std::exp(-gap / sigma);
    }
    return sum;
}

FuzzyGraph fuzzy_simplicial_set(const KnnResult& knn) {
    const std::size_t n = knn.n_points;
    const std::size_t k = knn.k;
    const double target = std::log2(static_cast<double>(k));

    FuzzyGraph graph;
    graph.n_points = n;
    graph.rho.assign(n, 0.0);
    graph.sigma.assign(n, kSigmaFloor);
    graph.directed.assign(n * k, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        double rho = 0.0;
        bool spread = false;
        for (std::size_t s = 0; s < k; ++s) {
            const double d = knn.distance(i, s);
            if (d > 0.0) {
                if (rho == 0.0) {
                    rho = d;
                } else if (d > rho) {
                    spread = true;
                }
            }
        }
        graph.rho[i] = rho;

        double sigma = kSigmaFloor;
        if (spread) {
            double lo = kSigmaFloor;
            double hi = kSigmaCeiling;
            for (int it = 0; it < kSigmaIterations; ++it) {
                sigma = 0.5 * (lo + hi);
                if (membership_sum(knn, i, rho, sigma) > target) {
                    hi = sigma;
                } else {
                    lo = sigma;
                }
            }
        }
        graph.sigma[i] = sigma;
        for (std::size_t s = 0; s < k; ++s) {
            const double gap = std::max(0.0, knn.distance(i, s) - rho);
            graph.directed[i * k + s] = std::exp(-gap / sigma);
        }
    }

    // Fuzzy union of the two directions. Each directed entry is listed once as
    // (i, j, w_ij) and once transposed so merging sorted runs pairs them up.
    struct Entry {
        std::uint32_t from;
        std::uint32_t to;
        double forward;
        double backward;
    };
    std::vector<Entry> entries;
    entries.reserve(2 * n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < k; ++s) {
            const auto j = knn.index(i, s);
            const double w = graph.directed[i * k + s];
            if (w <= 0.0) {
                continue;
            }
            entries.push_back({static_cast<std::uint32_t>(i), j, w, 0.0});
            entries.push_back({j, static_cast<std::uint32_t>(i), 0.0, w});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.from < b.from || (a.from == b.from && a.to < b.to);
    });
    for (std::size_t e = 0; e < entries.size();) {
        const auto from = entries[e].from;
        const auto to = entries[e].to;
        double forward = 0.0;
        double backward = 0.0;
        for (; e < entries.size() && entries[e].from == from && entries[e].to == to; ++e) {
            forward = std::max(forward, entries[e].forward);
            backward = std::max(backward, entries[e].backward);
        }
        const double w = forward + backward - forward * backward;
        if (w > 0.0) {
            graph.edges.push_back({from, to, w});
        }
    }
    return graph;
}

namespace {

constexpr int kCurveSamples = 300;
constexpr double kCurveSpan = 3.0;

struct CurveSample {
    std::vector<double> x;
    std::vector<double> y;
};

CurveSample curve_target(double min_dist) {
    CurveSample s;
    s.x.resize(kCurveSamples);
    s.y.resize(kCurveSamples);
    for (int i = 0; i < kCurveSamples; ++i) {
        const double x = kCurveSpan * i / (kCurveSamples - 1);
        s.x[static_cast<std::size_t>(i)] = x;
        s.y[static_cast<std::size_t>(i)] = x <= min_dist ? 1.0 : std::exp(-(x - min_dist));
    }
    return s;
}

double curve_sse(const CurveSample& s, double a, double b) {
    double sse = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double r = 1.0 / (1.0 + a * std::pow(s.x[i], 2.0 * b)) - s.y[i];
        sse += r * r;
    }
    return sse;
}

} // namespace

CurveParams fit_curve(double min_dist) {
    if (!(min_dist > 0.0 && min_dist < 1.0)) {
        fail(ErrorCode::InvalidArgument, "min_dist must lie in (0, 1)");
    }
    const auto s = curve_target(min_dist);

    // Levenberg-Marquardt on the two parameters, starting from (1, 1).
    double a = 1.0;
    double b = 1.0;
    double lambda = 1e-3;
    double sse = curve_sse(s, a, b);
    for (int it = 0; it < 1000; ++it) {
        double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double x = s.x[i];
            if (x <= 0.0) {
                continue; // both derivatives vanish at the origin
            }
            const double p = std::pow(x, 2.0 * b);
            const double denom = 1.0 + a * p;
            const double f = 1.0 / denom;
            const double r = f - s.y[i];
            const double da = -p / (denom * denom);
            const double db = -a * p * 2.0 * std::log(x) / (denom * denom);
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        bool accepted = false;
        while (lambda < 1e20) {
            const double maa = jaa * (1.0 + lambda);
            const double mbb = jbb * (1.0 + lambda);
            const double det = maa * mbb - jab * jab;
            if (det == 0.0) {
                lambda *= 10.0;
                continue;
            }
            const double step_a = -(mbb * ga - jab * gb) / det;
            const double step_b = -(maa * gb - jab * ga) / det;
            const double na = a + step_a;
            const double nb = b + step_b;
            if (na > 0.0 && nb > 0.0) {
                const double nsse = curve_sse(s, na, nb);
                if (nsse <= sse) {
                    const double change = std::abs(step_a) / a + std::abs(step_b) / b;
                    a = na;
                    b = nb;
                    const double improvement = sse - nsse;
                    sse = nsse;
                    lambda = std::max(lambda / 10.0, 1e-12);
                    accepted = true;
                    if (change < 1e-13 || improvement <= 1e-18 * std::max(sse, 1e-300)) {
                        return {a, b};
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            break;
        }
    }
    return {a, b};
}

double low_dim_kernel(const CurveParams& curve, double distance) {
    return 1.0 / (1.0 + curve.a * std::pow(distance, 2.0 * curve.b));
}

bool is_connected(const FuzzyGraph& graph) {
    const std::size_t n = graph.n_points;
    if (n == 0) {
        return true;
    }
    std::vector<std::size_t> offsets(n + 1, 0);
    for (const auto& e : graph.edges) {
        ++offsets[e.from + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (std::size_t e = offsets[v]; e < offsets[v + 1]; ++e) {
            const auto u = graph.edges[e].to;
            if (!seen[u]) {
                seen[u] = 1;
                ++visited;
                stack.push_back(u);
            }
        }
    }
    return visited == n;
}

namespace {

constexpr std::size_t kDenseEigenLimit = 4096;

std::vector<double> degrees(const FuzzyGraph& graph) {
    std::vector<double> deg(graph.n_points, 0.0);
    for (const auto& e : graph.edges) {
        deg[e.from] += e.weight;
    }
    return deg;
}

// Eigenvectors 2..m+1 (ascending eigenvalue) of I - D^-1/2 W D^-1/2, dense.
Matrix laplacian_vectors_dense(const FuzzyGraph& graph, const std::vector<double>& inv_sqrt_deg,
                               int m) {
    const auto n = static_cast<lapack_int>(graph.n_points);
    std::vector<double> lap(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (lapack_int i = 0; i < n; ++i) {
        lap[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = 1.0;
    }
    for (const auto& e : graph.edges) {
        lap[static_cast<std::size_t>(e.from) * static_cast<std::size_t>(n) + e.to] -=
            e.weight * inv_sqrt_deg[e.from] * inv_sqrt_deg[e.to];
    }
    lapack_int found = 0;
    std::vector<double> eigenvalues(static_cast<std::size_t>(n));
    std::vector<double> vectors(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(m));
    const lapack_int info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'V', 'I', 'U', n, lap.data(), n, 0.0, 0.0,
                                           2, m + 1, 0.0, &found, eigenvalues.data(), vectors.data(),
                                           m, support.data());
    if (info != 0 || found != m) {
        fail(ErrorCode::InvalidArgument, "eigensolver failed (info " + std::to_string(info) + ")");
    }
    return Matrix(graph.n_points, static_cast<std::size_t>(m), std::move(vectors));
}

void orthonormalize(Matrix& block, const std::vector<double>& fixed) {
    const std::size_t n = block.rows();
    const std::size_t p = block.cols();
    for (std::size_t c = 0; c < p; ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += block(i, c) * fixed[i];
            for (std::size_t i = 0; i < n; ++i) block(i, c) -= dot * fixed[i];
            for (std::size_t prev = 0; prev < c; ++prev) {
                double d = 0.0;
                for (std::size_t i = 0; i < n; ++i) d += block(i, c) * block(i, prev);
                for (std::size_t i = 0; i < n; ++i) block(i, c) -= d * block(i, prev);
            }
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += block(i, c) * block(i, c);
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) block(i, c) /= norm;
    }
}

// Same vectors as the dense route, via subspace iteration on (I + N) / 2 with
// N = D^-1/2 W D^-1/2 and the trivial eigenvector projected out.
Matrix laplacian_vectors_sparse(const FuzzyGraph& graph, const std::vector<double>& inv_sqrt_deg,
                                const std::vector<double>& deg, int m, Rng& rng) {
    const std::size_t n = graph.n_points;
    const std::size_t p = static_cast<std::size_t>(m) + 8;
    std::vector<double> trivial(n);
    double tnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        trivial[i] = std::sqrt(deg[i]);
        tnorm += deg[i];
    }
    tnorm = std::sqrt(tnorm);
    for (auto& v : trivial) v /= tnorm;

    auto apply = [&](const Matrix& in, Matrix& out) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < p; ++c) out(i, c) = 0.5 * in(i, c);
        }
        for (const auto& e : graph.edges) {
            const double w = 0.5 * e.weight * inv_sqrt_deg[e.from] * inv_sqrt_deg[e.to];
            for (std::size_t c = 0; c < p; ++c) out(e.from, c) += w * in(e.to, c);
        }
    };

    Matrix block(n, p);
    for (auto& v : block.values()) v = rng.normal();
    orthonormalize(block, trivial);
    Matrix image(n, p);
    std::vector<double> ritz_values(p);
    std::vector<double> small(p * p);
    for (int it = 0; it < 3000; ++it) {
        apply(block, image);
        std::swap(block, image);
        orthonormalize(block, trivial);
        if (it % 10 != 9) {
            continue;
        }
        // Rayleigh-Ritz rotation and convergence check.
        apply(block, image);
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += block(i, a) * image(i, b);
                small[a * p + b] = dot;
            }
        }
        if (LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'V', 'U', static_cast<lapack_int>(p), small.data(),
                          static_cast<lapack_int>(p), ritz_values.data()) != 0) {
            break;
        }
        Matrix rotated(n, p);
        Matrix rotated_image(n, p);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < p; ++c) {
                double v = 0.0, av = 0.0;
                for (std::size_t a = 0; a < p; ++a) {
                    v += block(i, a) * small[a * p + c];
                    av += image(i, a) * small[a * p + c];
                }
                rotated(i, c) = v;
                rotated_image(i, c) = av;
            }
        }
        block = std::move(rotated);
        double worst = 0.0;
        for (int c = 0; c < m; ++c) {
            const std::size_t col = p - 1 - static_cast<std::size_t>(c);
            double res = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = rotated_image(i, col) - ritz_values[col] * block(i, col);
                res += r * r;
            }
            worst = std::max(worst, std::sqrt(res));
        }
        if (worst < 1e-8) {
            break;
        }
    }
    // dsyev sorts ascending, so the leading Ritz vectors sit in the last columns.
    Matrix out(n, static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < m; ++c) {
            out(i, static_cast<std::size_t>(c)) = block(i, p - 1 - static_cast<std::size_t>(c));
        }
    }
    return out;
}

Matrix random_init(std::size_t n, int n_components, Rng& rng) {
    Matrix coords(n, static_cast<std::size_t>(n_components));
    for (auto& v : coords.values()) {
        v = rng.uniform(-kInitExtent, kInitExtent);
    }
    return coords;
}

} // namespace

SpectralInit spectral_init(const FuzzyGraph& graph, int n_components, std::uint64_t seed, SpectralSolver solver) {
    if (n_components < 1) {
        fail(ErrorCode::InvalidArgument, "n_components must be positive");
    }
    Rng rng(seed);
    const std::size_t n = graph.n_points;
    SpectralInit out;
    if (n <= static_cast<std::size_t>(n_components) + 1 || !is_connected(graph)) {
        out.coords = random_init(n, n_components, rng);
        out.fallback = true;
        return out;
    }

    const auto deg = degrees(graph);
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg[i]);
    }
    const bool dense = solver == SpectralSolver::Dense || (solver == SpectralSolver::Auto && n <= kDenseEigenLimit);
    Matrix vectors = dense ? laplacian_vectors_dense(graph, inv_sqrt_deg, n_components)
                         : laplacian_vectors_sparse(graph, inv_sqrt_deg, deg, n_components, rng);

    // Map back to random-walk eigenvectors and fix each sign so the entry of
    // largest magnitude is positive.
    double max_abs = 0.0;
    for (int c = 0; c < n_components; ++c) {
        const auto col = static_cast<std::size_t>(c);
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            vectors(i, col) *= inv_sqrt_deg[i];
            if (std::abs(vectors(i, col)) > best) {
                best = std::abs(vectors(i, col));
                arg = i;
            }
        }
        if (vectors(arg, col) < 0.0) {
            for (std::size_t i = 0; i < n; ++i) vectors(i, col) = -vectors(i, col);
        }
        max_abs = std::max(max_abs, best);
    }
    if (!(max_abs > 0.0) || !std::isfinite(max_abs)) {
        out.coords = random_init(n, n_components, rng);
        out.fallback = true;
        return out;
    }
    const double expansion = kInitExtent / max_abs;
    for (auto& v : vectors.values()) {
        v = v * expansion + rng.normal(0.0, kInitJitter);
    }
    out.coords = std::move(vectors);
    return out;
}

namespace {

inline double clip_gradient(double g) { return std::clamp(g, -4.0, 4.0); }

} // namespace

Matrix optimize_layout(const FuzzyGraph& graph, Matrix coords, const EmbeddingConfig& config,
                       const CurveParams& curve, int epochs) {
    if (epochs <= 0 || graph.edges.empty()) {
        return coords;
    }
    if (coords.rows() != graph.n_points) {
        fail(ErrorCode::DimensionMismatch, "initial layout does not match the graph");
    }
    const std::size_t n = graph.n_points;
    const std::size_t dim = coords.cols();
    const auto& edges = graph.edges;
    const std::size_t n_edges = edges.size();
    const double a = curve.a;
    const double b = curve.b;

    double max_weight = 0.0;
    for (const auto& e : edges) max_weight = std::max(max_weight, e.weight);

    std::vector<double> epochs_per_sample(n_edges);
    std::vector<double> next_sample(n_edges);
    std::vector<double> epochs_per_negative(n_edges);
    std::vector<double> next_negative(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) {
        epochs_per_sample[e] = max_weight / edges[e].weight;
        next_sample[e] = epochs_per_sample[e];
        epochs_per_negative[e] = epochs_per_sample[e] / config.negative_sample_rate;
        next_negative[e] = epochs_per_negative[e];
    }

    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<double> delta(dim);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const double alpha = config.learning_rate * (1.0 - static_cast<double>(epoch) / epochs);
        const double now = static_cast<double>(epoch);
        for (std::size_t e = 0; e < n_edges; ++e) {
            if (next_sample[e] > now) {
                continue;
            }
            const std::size_t i = edges[e].from;
            const std::size_t j = edges[e].to;
            auto yi = coords.row(i);
            auto yj = coords.row(j);

            double dist_sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                delta[d] = yi[d] - yj[d];
                dist_sq += delta[d] * delta[d];
            }
            double coeff = 0.0;
            if (dist_sq > 0.0) {
                const double pb = std::pow(dist_sq, b);
                coeff = (-2.0 * a * b * pb / dist_sq) / (a * pb + 1.0);
            }
            for (std::size_t d = 0; d < dim; ++d) {
                const double g = clip_gradient(coeff * delta[d]) * alpha;
                yi[d] += g;
                yj[d] -= g;
            }
            next_sample[e] += epochs_per_sample[e];

            const double pending = (now - next_negative[e]) / epochs_per_negative[e];
            const int n_negative = pending > 0.0 ? static_cast<int>(pending) : 0;
            for (int s = 0; s < n_negative; ++s) {
                const std::size_t k = rng.index(n);
                auto yk = coords.row(k);
                dist_sq = 0.0;
                for (std::size_t d = 0; d < dim; ++d) {
                    delta[d] = yi[d] - yk[d];
                    dist_sq += delta[d] * delta[d];
                }
                if (dist_sq > 0.0) {
                    const double pb = std::pow(dist_sq, b);
                    coeff = 2.0 * b / ((0.001 + dist_sq) * (a * pb + 1.0));
                } else if (k == i) {
                    continue;
                } else {
                    coeff = 0.0;
                }
                for (std::size_t d = 0; d < dim; ++d) {
                    const double g = coeff > 0.0 ? clip_gradient(coeff * delta[d]) : 4.0;
                    yi[d] += g * alpha;
                }
            }
            next_negative[e] += n_negative * epochs_per_negative[e];
        }
    }
    return coords;
}

UmapResult umap(const Matrix& data, const EmbeddingConfig& config) {
    if (config.n_neighbors < 1) {
        fail(ErrorCode::InvalidArgument, "n_neighbors must be positive");
    }
    if (config.n_components < 1) {
        fail(ErrorCode::InvalidArgument, "n_components must be positive");
    }
    if (config.learning_rate <= 0.0 || config.negative_sample_rate < 1) {
        fail(ErrorCode::InvalidArgument, "learning_rate and negative_sample_rate must be positive");
    }
    if (config.n_epochs && *config.n_epochs < 0) {
        fail(ErrorCode::InvalidArgument, "n_epochs must be nonnegative");
    }
    const std::size_t n = data.rows();
    if (n < 2) {
        fail(ErrorCode::TooFewPoints, "UMAP needs at least two points");
    }
    for (double v : data.values()) {
        if (!std::isfinite(v)) {
            fail(ErrorCode::InvalidArgument, "input contains non-finite values");
        }
    }
    UmapResult result;
    result.effective_neighbors =
        static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(config.n_neighbors), n - 1));
    result.curve = fit_curve(config.min_dist);
    result.epochs = config.n_epochs ? *config.n_epochs : default_epochs(n);

    const auto knn = knn_exact(data, static_cast<std::size_t>(result.effective_neighbors));
    const auto graph = fuzzy_simplicial_set(knn);
    auto init = spectral_init(graph, config.n_components, config.seed);
    result.spectral_fallback = init.fallback;
    result.embedding = optimize_layout(graph, std::move(init.coords), config, result.curve, result.epochs);
    return result;
}

} // namespace herdlens
