#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace voltide::rng {

/// Derives a child seed from a master seed, a purpose label and an index.
/// Every consumer of randomness takes its own named sub-seed so that results
/// are reproducible at any level of parallelism.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

/// Seeded generator with portable draw functions (the distribution mappings
/// are implemented here, not delegated to implementation-defined stdlib
/// distributions, so streams are identical across toolchains).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0,1), both endpoints excluded.
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via the inverse-CDF method.
    double normal();

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n);

    /// Geometric count of Bernoulli(p) failures before the first success,
    /// in {1, 2, ...}: the block-length draw for the stationary bootstrap.
    std::uint64_t geometric(double p);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Sample of `k` distinct indices from [0, n), in increasing order.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k);

}  // namespace voltide::rng
