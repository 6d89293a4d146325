#include "voltide/rng.hpp"

#include <algorithm>
#include <cmath>

#include "voltide/errors.hpp"
#include "voltide/stats.hpp"

namespace voltide::rng {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ fnv1a(label)) ^ index);
}

double Rng::uniform() {
    // 53-bit mantissa shifted into (0,1): never exactly 0 or 1.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return stats::normal_quantile(uniform()); }

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    if (n == 0) throw NumericError("uniform_int over empty range");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

std::uint64_t Rng::geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw NumericError("geometric needs p in (0,1]");
    if (p == 1.0) return 1;
    return 1 + static_cast<std::uint64_t>(std::floor(std::log(uniform()) / std::log1p(-p)));
}

std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
    if (k > n) throw NumericError("cannot sample more elements than population");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace voltide::rng
