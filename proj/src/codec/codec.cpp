#include "cdlab/codec/codec.hpp"

#include <algorithm>

#include "cdlab/complexity/elias.hpp"
#include "cdlab/seqcore/blocks.hpp"

namespace cdl::codec {

std::uint64_t record_bound(std::uint64_t i) { return i + 2 * elias::ceil_log2(i + 1) + kHeaderBits; }

Encoder::Encoder(const ComplexityOracle& oracle) : coder_(oracle.make_coder()) {}
Encoder::Encoder(const Encoder& other) : coder_(other.coder_->clone()), blocks_(other.blocks_) {}
Encoder& Encoder::operator=(const Encoder& other) {
    if (this != &other) {
        coder_ = other.coder_->clone();
        blocks_ = other.blocks_;
    }
    return *this;
}

CodeRecord Encoder::literal_record(BitView block) const {
    CodeRecord r{Mode::literal, std::vector<Bit>(block.size() + 1, 0)};
    std::copy(block.begin(), block.end(), r.bits.begin() + 1);
    return r;
}

CodeRecord Encoder::conditional_record(BitView block) const {
    CodeRecord r{Mode::conditional, {1}};
    auto payload = coder_->describe(block);
    r.bits.insert(r.bits.end(), payload.begin(), payload.end());
    return r;
}

CodeRecord Encoder::best_record(BitView block) const {
    auto cond = conditional_record(block);
    if (cond.size() < block.size() + 1) return cond;
    return literal_record(block);
}

CodeRecord Encoder::encode_block(BitView block) {
    auto r = best_record(block);
    commit(block);
    return r;
}

void Encoder::commit(BitView block) {
    coder_->commit(block);
    ++blocks_;
}

CodeRecord encode_block(BitView s_next, BitView context, const ComplexityOracle& oracle) {
    Encoder enc(oracle);
    for (std::uint64_t i = 1; blocks::triangular(i) <= context.size(); ++i) {
        const auto b = blocks::block_bounds(i);
        enc.commit(context.subspan(b.start, i));
    }
    if (blocks::triangular(enc.blocks_done()) != context.size() || s_next.size() != enc.blocks_done() + 1) {
        throw std::invalid_argument("encode_block needs |context| = T(i) and |s_next| = i + 1");
    }
    return enc.best_record(s_next);
}

Encoded encode(const PrefixOracle& S, std::uint64_t n, const ComplexityOracle& oracle) {
    const std::uint64_t K = blocks::blocks_to_cover(n);
    const BitSequence s = S.take(blocks::triangular(K));
    Encoded out;
    Encoder enc(oracle);
    for (std::uint64_t i = 1; i <= K; ++i) {
        const auto b = blocks::block_bounds(i);
        auto r = enc.encode_block(s.slice(b.start, b.end));
        out.record_lengths.push_back(r.size());
        out.modes.push_back(r.mode);
        out.stream.append(r.bits);
    }
    return out;
}

DecodeError::DecodeError(Kind kind, std::uint64_t block, const std::string& what)
    : std::runtime_error(what), kind_(kind), block_(block) {}

Decoder::Decoder(const ComplexityOracle& oracle) : coder_(oracle.make_coder()) {}
Decoder::Decoder(const Decoder& other) : coder_(other.coder_->clone()), blocks_(other.blocks_) {}
Decoder& Decoder::operator=(const Decoder& other) {
    if (this != &other) {
        coder_ = other.coder_->clone();
        blocks_ = other.blocks_;
    }
    return *this;
}

Decoder Decoder::with_context(const ComplexityOracle& oracle, BitView blocks_prefix) {
    Decoder d(oracle);
    std::uint64_t i = 1;
    for (; blocks::triangular(i) <= blocks_prefix.size(); ++i) {
        d.coder_->commit(blocks_prefix.subspan(blocks::triangular(i - 1), i));
        ++d.blocks_;
    }
    if (blocks::triangular(i - 1) != blocks_prefix.size()) {
        throw std::invalid_argument("decoder context must be a whole number of blocks");
    }
    return d;
}

std::optional<BitSequence> Decoder::next_block(const BitSource& in) {
    const std::uint64_t length = blocks_ + 1;
    auto mode = in();
    if (!mode) return std::nullopt;
    std::optional<BitSequence> block;
    if (*mode == 0) {
        BitSequence lit;
        lit.reserve(length);
        for (std::uint64_t k = 0; k < length; ++k) {
            auto b = in();
            if (!b) return std::nullopt;
            lit.push_back(*b);
        }
        block = std::move(lit);
    } else {
        block = coder_->reconstruct(in, length);
        if (!block || block->size() != length) return std::nullopt;
    }
    coder_->commit(block->view());
    ++blocks_;
    return block;
}

Decoded decode(const PrefixOracle& R, std::uint64_t n, const ComplexityOracle& oracle) {
    Decoded out;
    out.trace.usage.assign(n + 1, 0);
    Decoder dec(oracle);
    std::uint64_t pos = 0;
    bool horizon_hit = false;
    BitSource in = [&]() -> std::optional<Bit> {
        if (!R.readable(pos + 1)) {
            horizon_hit = true;
            return std::nullopt;
        }
        return R.bit(pos++);
    };
    std::uint64_t used_before = 0;
    while (out.prefix.size() < n) {
        const std::uint64_t i = dec.blocks_done() + 1;
        auto block = dec.next_block(in);
        if (!block) {
            if (horizon_hit) {
                throw DecodeError(DecodeError::Kind::horizon, i,
                                  "record stream ends inside record " + std::to_string(i));
            }
            throw DecodeError(DecodeError::Kind::malformed, i, "record " + std::to_string(i) + " is malformed");
        }
        out.trace.record_lengths.push_back(pos - used_before);
        out.trace.boundary_usage.push_back(pos);
        used_before = pos;
        for (Bit b : block->view()) {
            if (out.prefix.size() == n) break;
            out.prefix.push_back(b);
            out.trace.usage[out.prefix.size()] = pos;
        }
    }
    return out;
}

CompressionTrace compression_trace(const PrefixOracle& S, std::uint64_t N, const ComplexityOracle& oracle,
                                   std::vector<std::uint64_t> points, std::uint64_t tail_start) {
    CompressionTrace t;
    t.encoded = encode(S, N, oracle);
    t.decoded = decode(PrefixOracle::of(t.encoded.stream), N, oracle);
    t.profile = dim::ratio_profile(t.decoded.trace.usage, std::move(points), tail_start);
    return t;
}

}  // namespace cdl::codec
