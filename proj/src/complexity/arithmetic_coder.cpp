#include "cdlab/complexity/arithmetic_coder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdl {

namespace {

constexpr std::uint32_t kTop = 0x80000000u;

std::uint32_t split(std::uint32_t x1, std::uint32_t x2, std::uint32_t p1) {
    if (p1 == 0 || p1 > 65535) throw std::invalid_argument("probability must be in [1, 65535]");
    const std::uint64_t range = x2 - x1;
    return x1 + static_cast<std::uint32_t>((range * p1) >> 16);
}

}  // namespace

std::uint32_t quantize_probability(double p1) {
    const double scaled = std::round(p1 * 65536.0);
    if (!(scaled >= 1.0)) return 1;
    if (scaled > 65535.0) return 65535;
    return static_cast<std::uint32_t>(scaled);
}

std::vector<Bit> arithmetic_flush(std::uint32_t x1, std::uint32_t x2) {
    for (unsigned len = 0; len <= 32; ++len) {
        const unsigned free_bits = 32 - len;
        const std::uint64_t unit = std::uint64_t{1} << free_bits;
        const std::uint64_t z = (static_cast<std::uint64_t>(x1) + unit - 1) >> free_bits;
        const std::uint64_t lo = z << free_bits;
        if (lo + unit - 1 <= x2) {
            std::vector<Bit> bits(len);
            for (unsigned k = 0; k < len; ++k) bits[k] = static_cast<Bit>((z >> (len - 1 - k)) & 1u);
            return bits;
        }
    }
    throw std::logic_error("arithmetic_flush: empty interval");
}

void ArithmeticEncoder::encode(Bit bit, std::uint32_t p1) {
    const std::uint32_t mid = split(x1_, x2_, p1);
    if (bit) {
        x2_ = mid;
    } else {
        x1_ = mid + 1;
    }
    while (((x1_ ^ x2_) & kTop) == 0) {
        out_.push_back(static_cast<Bit>(x2_ >> 31));
        x1_ <<= 1;
        x2_ = (x2_ << 1) | 1u;
    }
}

std::size_t ArithmeticEncoder::finished_length() const {
    return out_.size() + arithmetic_flush(x1_, x2_).size();
}

std::vector<Bit> ArithmeticEncoder::finish() {
    auto tail = arithmetic_flush(x1_, x2_);
    out_.insert(out_.end(), tail.begin(), tail.end());
    x1_ = 0;
    x2_ = 0xffffffffu;
    return std::move(out_);
}

bool ArithmeticDecoder::pull() {
    if (known_ >= 32) return false;
    auto b = source_();
    if (!b) return false;
    ++consumed_;
    if (*b) known_bits_ |= kTop >> known_;
    ++known_;
    return true;
}

bool ArithmeticDecoder::shift_out() {
    while (((x1_ ^ x2_) & kTop) == 0) {
        const Bit top = static_cast<Bit>(x1_ >> 31);
        if (known_ == 0 && !pull()) return false;
        if (static_cast<Bit>(known_bits_ >> 31) != top) return false;
        known_bits_ <<= 1;
        --known_;
        x1_ <<= 1;
        x2_ = (x2_ << 1) | 1u;
    }
    return true;
}

std::optional<Bit> ArithmeticDecoder::decode(std::uint32_t p1) {
    if (failed_) return std::nullopt;
    const std::uint32_t mid = split(x1_, x2_, p1);
    Bit bit = 0;
    for (;;) {
        const std::uint32_t lo = known_bits_;
        const std::uint32_t hi = known_ >= 32 ? known_bits_ : (known_bits_ | (0xffffffffu >> known_));
        if (hi <= mid) {
            bit = 1;
            break;
        }
        if (lo > mid) {
            bit = 0;
            break;
        }
        if (!pull()) {
            failed_ = true;
            return std::nullopt;
        }
    }
    if (bit) {
        x2_ = mid;
    } else {
        x1_ = mid + 1;
    }
    if (!shift_out()) {
        failed_ = true;
        return std::nullopt;
    }
    return bit;
}

bool ArithmeticDecoder::finish() {
    if (failed_) return false;
    const auto tail = arithmetic_flush(x1_, x2_);
    if (known_ > tail.size()) return false;
    while (known_ < tail.size()) {
        if (!pull()) return false;
    }
    for (unsigned k = 0; k < tail.size(); ++k) {
        if (static_cast<Bit>((known_bits_ >> (31 - k)) & 1u) != tail[k]) return false;
    }
    return true;
}

}  // namespace cdl
