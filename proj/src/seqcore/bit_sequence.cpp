#include "cdlab/seqcore/bit_sequence.hpp"

#include <memory>

namespace cdl {

BitSequence::BitSequence(std::vector<Bit> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
        if (b > 1) throw std::invalid_argument("bit value outside {0,1}");
    }
}

BitSequence::BitSequence(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("bit value outside {0,1}");
        bits_.push_back(static_cast<Bit>(b));
    }
}

BitSequence BitSequence::from_string(std::string_view text) {
    std::vector<Bit> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c == '0') {
            bits.push_back(0);
        } else if (c == '1') {
            bits.push_back(1);
        } else {
            throw std::invalid_argument("bit string may only contain '0' and '1'");
        }
    }
    return BitSequence(std::move(bits));
}

void BitSequence::append(BitView more) {
    bits_.insert(bits_.end(), more.begin(), more.end());
}

std::string BitSequence::to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (Bit b : bits_) out.push_back(b ? '1' : '0');
    return out;
}

HorizonError::HorizonError(std::uint64_t position, std::uint64_t horizon)
    : std::out_of_range("read at position " + std::to_string(position) + " beyond horizon " +
                        std::to_string(horizon)),
      position_(position),
      horizon_(horizon) {}

PrefixOracle::PrefixOracle(Provider provider, std::optional<std::uint64_t> horizon)
    : provider_(std::move(provider)), horizon_(horizon) {
    if (!provider_) throw std::invalid_argument("prefix oracle needs a provider");
}

PrefixOracle PrefixOracle::of(BitSequence seq) {
    auto shared = std::make_shared<const BitSequence>(std::move(seq));
    const std::uint64_t n = shared->size();
    return PrefixOracle([shared](std::uint64_t i) { return (*shared)[i]; }, n);
}

Bit PrefixOracle::bit(std::uint64_t position) const {
    if (horizon_ && position >= *horizon_) throw HorizonError(position, *horizon_);
    return provider_(position) ? 1 : 0;
}

BitSequence PrefixOracle::take(std::uint64_t n) const {
    if (horizon_ && n > *horizon_) throw HorizonError(n - 1, *horizon_);
    std::vector<Bit> bits(n);
    for (std::uint64_t i = 0; i < n; ++i) bits[i] = provider_(i) ? 1 : 0;
    return BitSequence(std::move(bits));
}

}  // namespace cdl
