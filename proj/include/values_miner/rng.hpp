#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace values_miner {

// All randomness in the project goes through std::mt19937_64, whose output
// sequence is fixed by the C++ standard. The standard distributions are not
// portable across library vendors, so bounded draws and shuffles are done
// here with explicit algorithms instead.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stable sub-seed for a named stream (e.g. one venue) under a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) noexcept;

} // namespace values_miner
