#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdlab/complexity/elias.hpp"
#include "cdlab/complexity/mixture_model.hpp"
#include "cdlab/complexity/program_search.hpp"
#include "cdlab/seqcore/bit_sequence.hpp"

namespace cdl {

// exact   shortest toy-machine program, found by exhaustive search
// mixture context-mixing arithmetic coder (the reference proxy)
// lz78    incremental-parsing dictionary coder
enum class OracleKind { exact, mixture, lz78 };

std::string to_string(OracleKind kind);
std::optional<OracleKind> parse_oracle_kind(const std::string& name);

struct OracleSettings {
    OracleKind kind = OracleKind::mixture;
    std::uint64_t budget = 2'000'000;      // work units per exact search
    std::uint64_t max_program_len = 64;    // exact search cap, bits
    // Proxies try an exact toy-program search for inputs up to this length.
    std::uint64_t proxy_search_limit = 24;
    MixtureConfig mixture;
};

enum class EstimateStatus {
    exact,             // minimum over all programs
    length_capped,     // nothing within max_program_len; bits is an upper bound
    budget_exhausted,  // search stopped early; bits is an upper bound
    proxy,             // length of a decodable proxy description
};

std::string to_string(EstimateStatus status);

struct Estimate {
    std::uint64_t bits = 0;
    EstimateStatus status = EstimateStatus::proxy;
    bool confirmed() const { return status == EstimateStatus::exact || status == EstimateStatus::proxy; }
};

// complexity(w) <= |w| + kCLit for every |w| <= toy::kMaxOutput under every kind.
inline constexpr std::uint64_t kCLit = 62;

// Incremental conditional coder used by the block codec. It holds the
// already-coded prefix as context; describe() returns a payload for the next
// block that is self-delimiting once the block length is known, reconstruct()
// reads such a payload strictly left to right, commit() appends a block to
// the context.
class ConditionalCoder {
public:
    virtual ~ConditionalCoder() = default;
    virtual std::vector<Bit> describe(BitView block) const = 0;
    virtual std::optional<BitSequence> reconstruct(const BitSource& in, std::size_t length) const = 0;
    virtual void commit(BitView block) = 0;
    virtual std::unique_ptr<ConditionalCoder> clone() const = 0;
    virtual std::size_t context_size() const = 0;
};

// Stateless facade over the three complexity estimators. Every estimate is
// the length of an actual description, so reconstruct(describe(w)) == w.
class ComplexityOracle {
public:
    explicit ComplexityOracle(OracleSettings settings = {});

    Estimate complexity(BitView w) const;
    Estimate cond_complexity(BitView w, BitView x) const;
    // complexity(s[0..n-1]) for each n in `lengths` (ascending). Proxy kinds
    // share one left-to-right pass; the values equal the one-shot calls.
    std::vector<Estimate> prefix_complexities(BitView s, std::span<const std::uint64_t> lengths) const;

    std::vector<Bit> describe(BitView w) const;
    std::vector<Bit> describe_given(BitView w, BitView x) const;
    std::optional<BitSequence> reconstruct(BitView description) const;
    std::optional<BitSequence> reconstruct_given(BitView description, BitView x) const;

    std::unique_ptr<ConditionalCoder> make_coder() const;
    const OracleSettings& settings() const { return settings_; }

private:
    struct Described {
        std::vector<Bit> bits;
        EstimateStatus status;
    };
    Described describe_impl(BitView w, BitView x, bool conditional) const;
    std::optional<BitSequence> reconstruct_impl(BitView d, BitView x, bool conditional) const;

    OracleSettings settings_;
};

}  // namespace cdl
