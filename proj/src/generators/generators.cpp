#include "cdlab/generators/generators.hpp"

#include <stdexcept>

namespace cdl::gen {

std::string to_string(Kind kind) {
    switch (kind) {
        case Kind::zeros: return "zeros";
        case Kind::prng: return "prng";
        case Kind::dilute: return "dilute";
        case Kind::oscillate: return "oscillate";
    }
    return "?";
}

std::optional<Kind> parse_kind(const std::string& name) {
    if (name == "zeros") return Kind::zeros;
    if (name == "prng") return Kind::prng;
    if (name == "dilute") return Kind::dilute;
    if (name == "oscillate") return Kind::oscillate;
    return std::nullopt;
}

namespace {

void check_rate(const Rational& r, const char* name) {
    if (r <= Rational(0) || r > Rational(1)) {
        throw std::invalid_argument(std::string(name) + " must lie in (0, 1], got " + r.to_fraction());
    }
}

std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

void validate(const GeneratorSpec& spec) {
    if (spec.kind == Kind::dilute) check_rate(spec.alpha, "alpha");
    if (spec.kind == Kind::oscillate) {
        check_rate(spec.alpha, "alpha");
        check_rate(spec.beta, "beta");
        if (spec.beta < spec.alpha) throw std::invalid_argument("oscillate needs alpha <= beta");
        if (spec.schedule.base < 2 || spec.schedule.first_length == 0) {
            throw std::invalid_argument("schedule needs base >= 2 and first_length >= 1");
        }
    }
}

Bit prng_bit(std::uint64_t seed, std::uint64_t k) {
    const std::uint64_t word = splitmix64(seed + (k / 64 + 1) * 0x9e3779b97f4a7c15ull);
    return static_cast<Bit>((word >> (k % 64)) & 1u);
}

PrefixOracle prng_oracle(std::uint64_t seed) {
    return PrefixOracle([seed](std::uint64_t k) { return prng_bit(seed, k); }, std::nullopt);
}

BitSequence zeros(std::uint64_t n) { return BitSequence(n, 0); }

BitSequence prng(std::uint64_t seed, std::uint64_t n) {
    BitSequence out;
    out.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) out.push_back(prng_bit(seed, k));
    return out;
}

bool is_slot(const Rational& rate, std::uint64_t k) {
    const auto a = static_cast<unsigned __int128>(rate.num());
    const auto b = static_cast<unsigned __int128>(rate.den());
    return ((k + 1) * a) / b > (k * a) / b;
}

BitSequence dilute(const PrefixOracle& source, const Rational& alpha, std::uint64_t n) {
    check_rate(alpha, "alpha");
    BitSequence out;
    out.reserve(n);
    std::uint64_t used = 0;
    for (std::uint64_t k = 0; k < n; ++k) out.push_back(is_slot(alpha, k) ? source.bit(used++) : 0);
    return out;
}

std::vector<std::uint64_t> macro_boundaries(const Schedule& schedule, std::uint64_t n) {
    std::vector<std::uint64_t> out;
    std::uint64_t end = 0, len = schedule.first_length;
    while (end + len <= n) {
        end += len;
        out.push_back(end);
        len *= schedule.base;
    }
    return out;
}

BitSequence oscillate(const PrefixOracle& source, const Rational& alpha, const Rational& beta, std::uint64_t n,
                      const Schedule& schedule) {
    validate(GeneratorSpec{Kind::oscillate, alpha, beta, 0, schedule});
    BitSequence out;
    out.reserve(n);
    std::uint64_t used = 0, block_end = schedule.first_length, len = schedule.first_length, j = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        while (k >= block_end) {
            len *= schedule.base;
            block_end += len;
            ++j;
        }
        const Rational& rate = j % 2 == 0 ? beta : alpha;
        out.push_back(is_slot(rate, k) ? source.bit(used++) : 0);
    }
    return out;
}

BitSequence generate(const GeneratorSpec& spec, std::uint64_t n) {
    validate(spec);
    switch (spec.kind) {
        case Kind::zeros: return zeros(n);
        case Kind::prng: return prng(spec.seed, n);
        case Kind::dilute: return dilute(prng_oracle(spec.seed), spec.alpha, n);
        case Kind::oscillate: return oscillate(prng_oracle(spec.seed), spec.alpha, spec.beta, n, spec.schedule);
    }
    throw std::logic_error("unknown generator kind");
}

}  // namespace cdl::gen
