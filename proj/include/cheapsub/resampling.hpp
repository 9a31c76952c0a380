#pragma once

#include <cstddef>
#include <vector>

#include "cheapsub/rng.hpp"

namespace cheapsub {

/// Record positions drawn from a source of size n.
struct IndexSet {
    std::vector<std::size_t> indices;
    std::size_t n = 0;
    bool with_replacement = false;

    std::size_t size() const noexcept { return indices.size(); }
};

/// Uniformly random m-subset of [0, n) via partial Fisher-Yates, in draw order.
/// Requires 1 <= m < n; throws std::invalid_argument otherwise.
IndexSet subsample(std::size_t n, std::size_t m, SeedSpec seed);

/// k i.i.d. uniform draws from [0, n). Requires k >= 1 and n >= 1.
IndexSet resample_with_replacement(std::size_t n, std::size_t k, SeedSpec seed);

}  // namespace cheapsub
