#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>

#include "lvrep/errors.hpp"

namespace lvrep {

// Deterministic random-number generator (xoshiro256** over a splitmix64-seeded
// state) with hand-rolled distributions. The standard library's distribution
// objects are implementation-defined, so sampling goes through explicit
// algorithms here to keep runs bit-reproducible across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    // Independent child stream: used to split one master seed into
    // per-purpose streams (data collection, fitting, ...) deterministically.
    Rng child(std::uint64_t stream_id) const {
        std::uint64_t x = s_[0] ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
        x ^= s_[2] + 0xbf58476d1ce4e5b9ULL * (stream_id + 0x2545f4914f6cdd1dULL);
        return Rng(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 bits of randomness.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    int uniform_int(int n) {
        if (n <= 0) throw config_error("uniform_int: n must be positive");
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max()
                                    - std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
        std::uint64_t x = next_u64();
        while (x >= bound) x = next_u64();
        return static_cast<int>(x % static_cast<std::uint64_t>(n));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via Box-Muller (no cached spare: keeps the stream
    // position a pure function of the number of draws).
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Sample an index from an (unnormalized is fine) nonnegative weight vector
    // by CDF walk; the final bucket absorbs rounding slack.
    int categorical(const Eigen::VectorXd& weights) {
        const double total = weights.sum();
        if (!(total > 0.0)) throw numeric_error("categorical: weights sum to zero");
        double u = uniform01() * total;
        for (int i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return i;
        }
        return static_cast<int>(weights.size()) - 1;
    }

    // Dirichlet(concentration * 1) row via Gamma(shape) marginals
    // (Marsaglia-Tsang squeeze, boosted for shape < 1).
    Eigen::VectorXd dirichlet(int dim, double concentration) {
        Eigen::VectorXd g(dim);
        for (int i = 0; i < dim; ++i) g[i] = gamma(concentration);
        const double total = g.sum();
        if (total <= 0.0) {
            // All-zero draw is a measure-zero event hit only by underflow at
            // tiny concentrations; fall back to a uniform row.
            return Eigen::VectorXd::Constant(dim, 1.0 / dim);
        }
        return g / total;
    }

    double gamma(double shape) {
        if (shape <= 0.0) throw config_error("gamma: shape must be positive");
        if (shape < 1.0) {
            // Boost: Gamma(a) = Gamma(a+1) * U^{1/a}.
            const double u = std::max(uniform01(), 1e-300);
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

}  // namespace lvrep
