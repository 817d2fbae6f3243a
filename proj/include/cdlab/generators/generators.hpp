#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cdlab/rational.hpp"
#include "cdlab/seqcore/bit_sequence.hpp"

namespace cdl::gen {

enum class Kind { zeros, prng, dilute, oscillate };

std::string to_string(Kind kind);
std::optional<Kind> parse_kind(const std::string& name);

// Macro-block j of an oscillating sequence has length first_length * base^j.
struct Schedule {
    std::uint64_t base = 4;
    std::uint64_t first_length = 1;
    friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct GeneratorSpec {
    Kind kind = Kind::prng;
    Rational alpha{1};
    Rational beta{1};
    std::uint64_t seed = 1;
    Schedule schedule;
    friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

// Throws std::invalid_argument unless 0 < alpha <= beta <= 1 (where used).
void validate(const GeneratorSpec& spec);

// Counter-based pseudo-random bits: bit k is bit (k mod 64) of
// splitmix64(seed + (floor(k/64) + 1) * 0x9e3779b97f4a7c15), splitmix64 being
// the usual xor-shift/multiply finalizer. Random access, no state.
Bit prng_bit(std::uint64_t seed, std::uint64_t k);
PrefixOracle prng_oracle(std::uint64_t seed);

BitSequence zeros(std::uint64_t n);
BitSequence prng(std::uint64_t seed, std::uint64_t n);

// Position k carries the next unused source bit iff floor((k+1)a) > floor(ka),
// otherwise 0.
bool is_slot(const Rational& rate, std::uint64_t k);
BitSequence dilute(const PrefixOracle& source, const Rational& alpha, std::uint64_t n);

// Dilution whose rate alternates by macro-block: even blocks (starting with
// block 0) use beta, odd blocks alpha. The slot rule uses the global position.
BitSequence oscillate(const PrefixOracle& source, const Rational& alpha, const Rational& beta, std::uint64_t n,
                      const Schedule& schedule = {});

// End positions (exclusive) of the macro-blocks that fit in [0, n].
std::vector<std::uint64_t> macro_boundaries(const Schedule& schedule, std::uint64_t n);

// The sequence described by spec, with prng(seed) as source.
BitSequence generate(const GeneratorSpec& spec, std::uint64_t n);

}  // namespace cdl::gen
