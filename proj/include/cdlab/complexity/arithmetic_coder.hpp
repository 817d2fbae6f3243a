#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cdlab/seqcore/bit_sequence.hpp"

namespace cdl {

// Binary arithmetic coder over a 32-bit window, carryless (bits leave the
// window as soon as both ends agree on them). Probabilities are P(bit = 1)
// scaled to 16 bits and must lie in [1, 65535].
//
// The stream is self-delimiting once the symbol count is known: finish()
// appends the shortest suffix z whose whole dyadic interval sits inside the
// final coding interval, so a decoder never needs bits past the stream end.
class ArithmeticEncoder {
public:
    void encode(Bit bit, std::uint32_t p1);
    // Stream length if finish() were called now.
    std::size_t finished_length() const;
    std::vector<Bit> finish();
    std::size_t emitted() const { return out_.size(); }

private:
    std::uint32_t x1_ = 0;
    std::uint32_t x2_ = 0xffffffffu;
    std::vector<Bit> out_;
};

// Decoder that reads its input lazily and strictly left to right through a
// bit source. Every stream bit is read exactly once and checked, so a stream
// is accepted only if it is the exact encoder output for the decoded bits.
class ArithmeticDecoder {
public:
    using Source = std::function<std::optional<Bit>()>;
    explicit ArithmeticDecoder(Source source) : source_(std::move(source)) {}

    // nullopt if the source ran dry or the stream is inconsistent.
    std::optional<Bit> decode(std::uint32_t p1);
    // Reads and checks the flush suffix; false if the stream is malformed.
    bool finish();
    std::size_t consumed() const { return consumed_; }

private:
    bool pull();
    bool shift_out();

    Source source_;
    std::uint32_t x1_ = 0;
    std::uint32_t x2_ = 0xffffffffu;
    std::uint32_t known_bits_ = 0;  // top `known_` bits of the window, rest zero
    unsigned known_ = 0;
    std::size_t consumed_ = 0;
    bool failed_ = false;
};

// Bits of the flush suffix for a final interval [x1, x2]; exposed for tests.
std::vector<Bit> arithmetic_flush(std::uint32_t x1, std::uint32_t x2);

// Quantizes a probability of a one into the coder's 16-bit range.
std::uint32_t quantize_probability(double p1);

}  // namespace cdl
