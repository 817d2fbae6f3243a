#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cdlab/seqcore/bit_sequence.hpp"

namespace cdl {

// Binary incremental-parsing (LZ78) coder. Each phrase is the longest known
// phrase plus one fresh bit and is written as (phrase index, bit) with the
// index in ceil(log2 dictionary size) bits. The output length is implied by
// the caller, so a final phrase that ends exactly on a known phrase is
// written as an index alone.
//
// prime() parses a context through the dictionary without emitting, which
// gives conditional coding; the unfinished tail phrase of the context is
// dropped so that w always starts a fresh phrase.
class Lz78Coder {
public:
    Lz78Coder();

    void prime(BitView bits);
    std::vector<Bit> encode(BitView w) const;
    std::size_t encoded_length(BitView w) const;
    // encoded_length(w[0..n-1]) for each ascending n in `lengths`, in one pass.
    std::vector<std::size_t> prefix_lengths(BitView w, const std::vector<std::uint64_t>& lengths) const;
    using Source = std::function<std::optional<Bit>()>;
    std::optional<BitSequence> decode(const Source& source, std::size_t length) const;
    std::size_t dictionary_size() const { return parent_.size(); }

private:
    std::size_t child(std::size_t node, Bit b) const { return children_[2 * node + b]; }
    std::size_t add(std::size_t parent, Bit b);

    std::vector<std::size_t> children_;  // 2 per node, 0 = absent (root is never a child)
    std::vector<std::size_t> parent_;
    std::vector<Bit> last_bit_;
};

}  // namespace cdl
