#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdlab/codec/codec.hpp"
#include "cdlab/complexity/oracle.hpp"
#include "cdlab/dimension/profile.hpp"
#include "cdlab/rational.hpp"
#include "cdlab/seqcore/bit_sequence.hpp"

// Extension search that inverts the block codec. The output R' is a record
// stream r'_1 r'_2 ... that decodes to S, built stage by stage; a stage
// appends records for one or more blocks and must leave
//
//   (a) decode(r') = S[0..N-1] at the new boundary N,
//   (b) usage(N) <= d N,
//   (c) usage(m) <= D m for every n0 <= m <= N.
//
// usage(m) is the codec's query usage: the end of the record holding bit m-1.
namespace cdl::ext {

struct ExtractorParams {
    Rational epsilon{3, 20};
    Rational delta{3, 80};
    Rational d{1, 2};
    Rational D{1};
    std::uint64_t n0 = 0;
    std::uint64_t search_budget = 200'000;  // candidates per stage
    unsigned full_lookahead = 8;            // every mode assignment for j <= this
    std::uint64_t exhaustive_cap = 0;       // 0 disables the exhaustive fallback
};

// delta = epsilon/4, d = rho_minus + delta/2, D = rho_plus + 7 delta/2.
ExtractorParams derive_params(const Rational& epsilon, const Rational& rho_minus, const Rational& rho_plus,
                              std::uint64_t n0);
// Throws std::invalid_argument naming the broken invariant.
void validate(const ExtractorParams& p);

enum class Condition { a, b, c };
std::string to_string(Condition c);

struct CheckResult {
    std::optional<Condition> failed;  // empty: all three hold
    // Block index for (a), N for (b), the offending m for (c).
    std::uint64_t position = 0;
    std::uint64_t blocks = 0;  // whole records decoded
    std::uint64_t N = 0;       // T(blocks)
    std::vector<std::uint64_t> boundary_usage;
    std::string detail;
    bool ok() const { return !failed; }
};

// Full check of a candidate stream from scratch.
CheckResult check_conditions(BitView candidate, const PrefixOracle& S, const ExtractorParams& p,
                             const ComplexityOracle& oracle);

struct StageRecord {
    std::uint64_t stage = 0;
    std::uint64_t first_block = 0;  // blocks first_block..last_block appended
    std::uint64_t last_block = 0;
    std::uint64_t N = 0;
    std::uint64_t usage = 0;        // |R'| after the stage
    std::uint64_t candidates = 0;   // candidates examined
    std::string modes;              // 'L' / 'C' per appended block
    bool exhaustive = false;
    Rational c_peak;                // max usage(m)/m over the stage's m >= n0; 0 if none
};

struct ExtractorState {
    BitSequence emitted;
    std::uint64_t blocks_done = 0;
    BitSequence decoded_prefix;
    std::vector<std::uint64_t> boundary_usage;  // |r'_1..r'_k|, k = 1..blocks_done
    std::vector<StageRecord> log;
};

// First candidate in length-lex order with |r''| <= cap such that
// state.emitted + r'' passes all three conditions and covers at least one
// more block. Candidates are checked in parallel; the result does not depend
// on the thread count.
struct ExhaustiveResult {
    std::optional<BitSequence> found;
    std::uint64_t tried = 0;
};
ExhaustiveResult exhaustive_extension(const ExtractorState& state, const PrefixOracle& S, const ExtractorParams& p,
                                      const ComplexityOracle& oracle, std::uint64_t cap);

struct Extension {
    bool found = false;
    BitSequence bits;
    StageRecord record;
    std::string reason;  // on exhaustion
    std::string hint;
};

class Extractor {
public:
    Extractor(PrefixOracle S, ExtractorParams params, const ComplexityOracle& oracle);

    // Searches the next stage and appends it on success. Structured
    // candidates come first: the codec records of blocks i+1..i+j under
    // every literal/conditional assignment for j <= full_lookahead, in order
    // of (length, j, assignment), then the shortest assignment alone for
    // larger j. The shortest assignment has the smallest usage at every m,
    // so no other assignment of that j can pass when it fails. With
    // exhaustive_cap > 0 the exhaustive search runs when these run out.
    Extension next_extension();

    const ExtractorState& state() const { return state_; }
    const ExtractorParams& params() const { return params_; }

private:
    struct Pending {
        BitSequence block;
        codec::CodeRecord literal, conditional;
        bool literal_ok = false, conditional_ok = false;  // decodes back to the block
    };
    const Pending& pending(std::size_t j);  // record data for block blocks_done + 1 + j
    void accept(const std::vector<const codec::CodeRecord*>& records, std::uint64_t candidates, bool exhaustive);
    void accept_bits(const BitSequence& bits, std::uint64_t candidates);

    PrefixOracle S_;
    ExtractorParams params_;
    const ComplexityOracle& oracle_;
    ExtractorState state_;
    codec::Encoder encoder_;   // context = blocks through the last pending one
    codec::Decoder decoder_;   // same context, for record verification
    std::deque<Pending> pending_;
};

// Post-hoc verification of a finished run by an independent decode of the
// whole stream.
struct Verification {
    bool decode_ok = false;                     // (a)
    std::vector<std::uint64_t> b_violations;    // boundaries N with usage(N) > d N
    std::vector<std::uint64_t> c_violations;    // m with usage(m) > D m (first 32)
    std::uint64_t c_violation_count = 0;
    std::uint64_t N = 0;
    std::string detail;
    bool ok() const { return decode_ok && b_violations.empty() && c_violation_count == 0; }
};
Verification verify_run(const BitSequence& R, const PrefixOracle& S, const ExtractorParams& p,
                        const std::vector<std::uint64_t>& stage_boundaries, const ComplexityOracle& oracle);

enum class ParamSource {
    codec_ratio,  // d, D from the codec's usage ratios (default)
    complexity,   // d, D from C(S[0..n-1])/n
};

struct ExtractOptions {
    Rational epsilon{3, 20};
    std::uint64_t target_N = 20'000;
    std::uint64_t profile_N = 0;  // horizon for measuring S; 0 means target_N
    std::uint64_t grid_start = dim::kDefaultGridStart;
    double grid_ratio = dim::kDefaultGridRatio;
    ParamSource source = ParamSource::codec_ratio;
    Rational precondition_floor{1, 20};  // dim_hat_P(S) must exceed this
    // Overrides applied after derivation.
    std::optional<Rational> d, D;
    std::optional<std::uint64_t> n0;
    std::uint64_t search_budget = 200'000;
    unsigned full_lookahead = 8;
    std::uint64_t exhaustive_cap = 0;
};

struct ExtractReport {
    ExtractorParams params;
    dim::DimensionProfile source_profile;  // C(S[0..n-1])/n
    dim::RatioProfile source_ratio;        // codec usage/n
    Rational source_H, source_P;
    Rational target_H, target_P;           // dim_H/dim_P - eps, 1 - eps
    dim::DimensionProfile output_profile;  // C(R'[0..n-1])/n
    Rational output_H, output_P;
    std::vector<StageRecord> stages;
    std::uint64_t covered = 0;             // source bits decoded from R'
    bool prefix_stable = true;
    Verification verification;
};

struct ExtractResult {
    BitSequence R;
    ExtractReport report;
};

class ExtractionError : public std::runtime_error {
public:
    enum class Kind { precondition, exhausted };
    ExtractionError(Kind kind, const std::string& what, ExtractReport partial);
    Kind kind() const { return kind_; }
    const ExtractReport& partial() const { return partial_; }

private:
    Kind kind_;
    ExtractReport partial_;
};

// Measures S, derives the parameters, runs stages until R' covers target_N
// source bits, then re-verifies and profiles R'.
ExtractResult extract(const PrefixOracle& S, const ExtractOptions& options, const ComplexityOracle& oracle);

}  // namespace cdl::ext
