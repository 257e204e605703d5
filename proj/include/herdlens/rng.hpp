#ifndef HERDLENS_RNG_HPP
#define HERDLENS_RNG_HPP

#include <cstdint>
#include <random>

namespace herdlens {

/// Seeded generator shared by every stochastic stage. Index draws avoid
/// std::uniform_int_distribution so they are identical across standard
/// libraries; the real-valued draws rely on <random>.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n must be positive.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal(double mean = 0.0, double stddev = 1.0) {
        std::normal_distribution<double> dist(mean, stddev);
        return dist(engine_);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace herdlens

#endif
