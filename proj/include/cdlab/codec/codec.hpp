#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "cdlab/complexity/oracle.hpp"
#include "cdlab/dimension/profile.hpp"
#include "cdlab/seqcore/bit_sequence.hpp"

// Block codec over the triangular layout |s_i| = i. Record r_i is
//
//     0 s_i            literal
//     1 payload        conditional: the oracle's conditional description of
//                      s_i given s_1..s_{i-1}, self-delimiting given |s_i|
//
// The encoder takes the shorter record, literal on ties, so
// |r_i| <= i + kHeaderBits always.
namespace cdl::codec {

enum class Mode { literal, conditional };

inline constexpr std::uint64_t kHeaderBits = 1;

// The documented per-record bound i + 2 ceil(log2(i+1)) + kHeaderBits.
std::uint64_t record_bound(std::uint64_t i);

struct CodeRecord {
    Mode mode = Mode::literal;
    std::vector<Bit> bits;  // whole record, mode bit included
    std::size_t size() const { return bits.size(); }
};

// Incremental encoder: holds s_1..s_i as conditioning context.
class Encoder {
public:
    explicit Encoder(const ComplexityOracle& oracle);
    Encoder(const Encoder& other);
    Encoder& operator=(const Encoder& other);

    CodeRecord literal_record(BitView block) const;
    CodeRecord conditional_record(BitView block) const;
    // Shorter of the two (literal on ties); does not commit.
    CodeRecord best_record(BitView block) const;
    // best_record + commit.
    CodeRecord encode_block(BitView block);
    void commit(BitView block);

    std::uint64_t blocks_done() const { return blocks_; }
    std::uint64_t context_size() const { return coder_->context_size(); }

private:
    std::unique_ptr<ConditionalCoder> coder_;
    std::uint64_t blocks_ = 0;
};

// Record for s_next given context = s_1..s_i (|context| = T(i), |s_next| = i+1).
CodeRecord encode_block(BitView s_next, BitView context, const ComplexityOracle& oracle);

struct Encoded {
    BitSequence stream;                       // r_1 r_2 ... r_K
    std::vector<std::uint64_t> record_lengths;
    std::vector<Mode> modes;
};

// Encodes blocks 1..K with K = blocks_to_cover(n); S must supply T(K) bits.
Encoded encode(const PrefixOracle& S, std::uint64_t n, const ComplexityOracle& oracle);

class DecodeError : public std::runtime_error {
public:
    enum class Kind { malformed, horizon };
    DecodeError(Kind kind, std::uint64_t block, const std::string& what);
    Kind kind() const { return kind_; }
    std::uint64_t block() const { return block_; }

private:
    Kind kind_;
    std::uint64_t block_;
};

// Stage-wise decoder: stage i reads record r_i strictly left to right and
// uses only r_i and the already-decoded s_1..s_{i-1}.
class Decoder {
public:
    explicit Decoder(const ComplexityOracle& oracle);
    Decoder(const Decoder& other);
    Decoder& operator=(const Decoder& other);

    // Decoder resuming after the given complete blocks (supplied externally).
    static Decoder with_context(const ComplexityOracle& oracle, BitView blocks_prefix);

    // Decodes the next block, reading its record from `in`; nullopt when the
    // record is malformed or the source ends inside it.
    std::optional<BitSequence> next_block(const BitSource& in);
    std::uint64_t blocks_done() const { return blocks_; }

private:
    std::unique_ptr<ConditionalCoder> coder_;
    std::uint64_t blocks_ = 0;
};

struct DecodeTrace {
    std::vector<std::uint64_t> record_lengths;  // |r_i|, i = 1..K
    std::vector<std::uint64_t> boundary_usage;  // |r_1..r_k|, k = 1..K
    std::vector<std::uint64_t> usage;           // usage[m], m = 0..n
};

struct Decoded {
    BitSequence prefix;
    DecodeTrace trace;
};

// S[0..n-1] from the record stream R. usage[m] is the rightmost R index read
// while producing the first m bits, plus one.
Decoded decode(const PrefixOracle& R, std::uint64_t n, const ComplexityOracle& oracle);

struct CompressionTrace {
    Encoded encoded;
    Decoded decoded;
    dim::RatioProfile profile;
};

// Encode through the block covering N, decode, and sample usage/n.
CompressionTrace compression_trace(const PrefixOracle& S, std::uint64_t N, const ComplexityOracle& oracle,
                                   std::vector<std::uint64_t> points, std::uint64_t tail_start);

}  // namespace cdl::codec
