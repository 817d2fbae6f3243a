#pragma once

#include <cstdint>
#include <utility>

namespace cdl {

// Triangular block layout: block i (1-indexed) has length i and spans
// positions [T(i-1), T(i)) with T(i) = i(i+1)/2.
namespace blocks {

constexpr std::uint64_t triangular(std::uint64_t i) { return i * (i + 1) / 2; }

struct Bounds {
    std::uint64_t start;
    std::uint64_t end;  // exclusive
    friend bool operator==(const Bounds&, const Bounds&) = default;
};

// Throws std::invalid_argument for i == 0.
Bounds block_bounds(std::uint64_t i);

struct Containing {
    std::uint64_t complete;  // k_m: largest k with T(k) <= m
    std::uint64_t holding;   // block index holding position m, i.e. k_m + 1
    friend bool operator==(const Containing&, const Containing&) = default;
};

Containing block_containing(std::uint64_t m);

// Smallest K with T(K) >= n (number of blocks needed to cover n bits).
std::uint64_t blocks_to_cover(std::uint64_t n);

}  // namespace blocks
}  // namespace cdl
