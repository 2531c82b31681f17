#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rowswarm {

// All randomness in the project flows from a single user-supplied seed.
// Sub-streams (per run, per epoch, per purpose) are derived with stable
// keys so that adding one consumer never shifts the draws of another.

// Derive the RNG seed for run `run_id` from the top-level seed.
inline std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run_id) {
    return seed ^ run_id;
}

// Derive a named sub-stream seed (e.g. "shuffle", "init", "val-comm").
// FNV-1a over the label, mixed with the base seed and an index.
inline std::uint64_t sub_seed(std::uint64_t seed, std::string_view label,
                              std::uint64_t index = 0) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return seed ^ h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace rowswarm
