#include "cdlab/complexity/elias.hpp"

#include <bit>
#include <stdexcept>

namespace cdl {

void BitWriter::put_uint(std::uint64_t value, unsigned width) {
    for (unsigned k = width; k-- > 0;) bits_.push_back(static_cast<Bit>((value >> k) & 1u));
}

std::optional<std::uint64_t> BitReader::get_uint(unsigned width) {
    if (remaining() < width) return std::nullopt;
    std::uint64_t v = 0;
    for (unsigned k = 0; k < width; ++k) v = (v << 1) | bits_[pos_++];
    return v;
}

BitSource source_of(BitReader& reader) {
    return [&reader] { return reader.get(); };
}

namespace elias {

unsigned floor_log2(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("floor_log2(0)");
    return 63u - static_cast<unsigned>(std::countl_zero(n));
}

unsigned ceil_log2(std::uint64_t n) {
    if (n <= 1) return 0;
    return floor_log2(n - 1) + 1;
}

unsigned gamma_length(std::uint64_t n) { return 2 * floor_log2(n) + 1; }

void put_gamma(BitWriter& out, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Elias gamma is defined for n >= 1");
    unsigned width = floor_log2(n);
    for (unsigned k = 0; k < width; ++k) out.put(0);
    out.put_uint(n, width + 1);
}

std::optional<std::uint64_t> get_gamma(BitReader& in) { return get_gamma(source_of(in)); }

std::optional<std::uint64_t> get_gamma(const BitSource& in) {
    unsigned zeros = 0;
    for (;;) {
        auto b = in();
        if (!b) return std::nullopt;
        if (*b) break;
        if (++zeros > 63) return std::nullopt;
    }
    std::uint64_t v = 1;
    for (unsigned k = 0; k < zeros; ++k) {
        auto b = in();
        if (!b) return std::nullopt;
        v = (v << 1) | *b;
    }
    return v;
}

}  // namespace elias
}  // namespace cdl
