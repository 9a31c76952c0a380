#include "cheapsub/resampling.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace cheapsub {

IndexSet subsample(std::size_t n, std::size_t m, SeedSpec seed)
{
    if (m == 0 || m >= n) {
        throw std::invalid_argument("subsample size must satisfy 1 <= m < n (m < n violated: m=" +
                                    std::to_string(m) + ", n=" + std::to_string(n) + ")");
    }
    StreamRng rng(seed);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return IndexSet{std::move(pool), n, false};
}

IndexSet resample_with_replacement(std::size_t n, std::size_t k, SeedSpec seed)
{
    if (k == 0) throw std::invalid_argument("resample size k must be >= 1");
    if (n == 0) throw std::invalid_argument("cannot resample from an empty source");
    StreamRng rng(seed);
    std::vector<std::size_t> draws(k);
    for (auto& d : draws) d = static_cast<std::size_t>(rng.below(n));
    return IndexSet{std::move(draws), n, true};
}

}  // namespace cheapsub
