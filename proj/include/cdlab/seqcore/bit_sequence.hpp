#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdl {

using Bit = std::uint8_t;
using BitView = std::span<const Bit>;

// Finite binary string, S[0] leftmost. One byte per bit: sequences here top
// out around 10^6 bits and random access speed matters more than footprint.
class BitSequence {
public:
    BitSequence() = default;
    explicit BitSequence(std::size_t length, Bit fill = 0) : bits_(length, fill ? 1 : 0) {}
    explicit BitSequence(std::vector<Bit> bits);
    BitSequence(std::initializer_list<int> bits);

    // "0110" -> {0,1,1,0}; anything but '0'/'1' throws.
    static BitSequence from_string(std::string_view text);

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    Bit operator[](std::size_t i) const { return bits_[i]; }
    Bit at(std::size_t i) const { return bits_.at(i); }
    void set(std::size_t i, Bit b) { bits_.at(i) = b ? 1 : 0; }
    void push_back(Bit b) { bits_.push_back(b ? 1 : 0); }
    void append(BitView more);
    void reserve(std::size_t n) { bits_.reserve(n); }

    BitView view() const { return bits_; }
    BitView prefix(std::size_t n) const { return BitView(bits_).first(n); }
    BitView slice(std::size_t from, std::size_t to) const {
        return BitView(bits_).subspan(from, to - from);
    }
    const std::vector<Bit>& raw() const { return bits_; }

    std::string to_string() const;

    friend bool operator==(const BitSequence&, const BitSequence&) = default;
    friend bool operator==(const BitSequence& a, BitView b) {
        return a.size() == b.size() && std::equal(b.begin(), b.end(), a.bits_.begin());
    }

private:
    std::vector<Bit> bits_;
};

class HorizonError : public std::out_of_range {
public:
    HorizonError(std::uint64_t position, std::uint64_t horizon);
    std::uint64_t position() const { return position_; }
    std::uint64_t horizon() const { return horizon_; }

private:
    std::uint64_t position_;
    std::uint64_t horizon_;
};

// Deterministic producer of S[0], S[1], ... up to an optional horizon.
// Reads past the horizon throw HorizonError; nothing is ever fabricated.
class PrefixOracle {
public:
    using Provider = std::function<Bit(std::uint64_t)>;

    PrefixOracle(Provider provider, std::optional<std::uint64_t> horizon);
    // Oracle over a finite sequence; the horizon is its length.
    static PrefixOracle of(BitSequence seq);

    Bit bit(std::uint64_t position) const;
    std::optional<std::uint64_t> horizon() const { return horizon_; }
    bool readable(std::uint64_t length) const { return !horizon_ || length <= *horizon_; }

    // S[0..n-1]; throws HorizonError when n exceeds the horizon.
    BitSequence take(std::uint64_t n) const;

private:
    Provider provider_;
    std::optional<std::uint64_t> horizon_;
};

}  // namespace cdl
