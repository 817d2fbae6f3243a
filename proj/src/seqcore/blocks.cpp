#include "cdlab/seqcore/blocks.hpp"

#include <cmath>
#include <stdexcept>

namespace cdl::blocks {

Bounds block_bounds(std::uint64_t i) {
    if (i == 0) throw std::invalid_argument("blocks are 1-indexed; block 0 does not exist");
    return {triangular(i - 1), triangular(i)};
}

Containing block_containing(std::uint64_t m) {
    // Float estimate, then exact integer correction.
    auto k = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(m) + 1.0) - 1.0) / 2.0);
    while (k > 0 && triangular(k) > m) --k;
    while (triangular(k + 1) <= m) ++k;
    return {k, k + 1};
}

std::uint64_t blocks_to_cover(std::uint64_t n) {
    auto c = block_containing(n);
    return triangular(c.complete) == n ? c.complete : c.complete + 1;
}

}  // namespace cdl::blocks
