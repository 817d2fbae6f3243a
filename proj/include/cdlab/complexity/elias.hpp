#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cdlab/seqcore/bit_sequence.hpp"

namespace cdl {

// Append-only bit buffer used by every encoder in the project.
class BitWriter {
public:
    void put(Bit b) { bits_.push_back(b ? 1 : 0); }
    void put_bits(BitView bits) { bits_.insert(bits_.end(), bits.begin(), bits.end()); }
    // Fixed width, most significant bit first.
    void put_uint(std::uint64_t value, unsigned width);
    std::size_t size() const { return bits_.size(); }
    const std::vector<Bit>& bits() const { return bits_; }
    std::vector<Bit> take() { return std::move(bits_); }

private:
    std::vector<Bit> bits_;
};

// Cursor over a finite bit view; reads past the end return nullopt.
class BitReader {
public:
    explicit BitReader(BitView bits) : bits_(bits) {}
    std::optional<Bit> get() {
        if (pos_ >= bits_.size()) return std::nullopt;
        return bits_[pos_++];
    }
    std::optional<std::uint64_t> get_uint(unsigned width);
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bits_.size() - pos_; }
    bool at_end() const { return pos_ == bits_.size(); }

private:
    BitView bits_;
    std::size_t pos_ = 0;
};

// Pull-style bit input: yields the next bit or nullopt when exhausted.
using BitSource = std::function<std::optional<Bit>()>;
BitSource source_of(BitReader& reader);

namespace elias {

// Elias gamma for n >= 1: floor(log2 n) zeros, then n in binary.
void put_gamma(BitWriter& out, std::uint64_t n);
std::optional<std::uint64_t> get_gamma(BitReader& in);
std::optional<std::uint64_t> get_gamma(const BitSource& in);
// |gamma(n)| = 2 floor(log2 n) + 1.
unsigned gamma_length(std::uint64_t n);

unsigned floor_log2(std::uint64_t n);  // n >= 1
unsigned ceil_log2(std::uint64_t n);   // ceil(log2 n), 0 for n <= 1

}  // namespace elias
}  // namespace cdl
