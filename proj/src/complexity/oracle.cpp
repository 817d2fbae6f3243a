#include "cdlab/complexity/oracle.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <variant>

#include "cdlab/complexity/arithmetic_coder.hpp"
#include "cdlab/complexity/lz78.hpp"
#include "cdlab/complexity/toy_machine.hpp"

namespace cdl {

std::string to_string(OracleKind kind) {
    switch (kind) {
        case OracleKind::exact: return "exact";
        case OracleKind::mixture: return "mixture";
        case OracleKind::lz78: return "lz78";
    }
    return "?";
}

std::optional<OracleKind> parse_oracle_kind(const std::string& name) {
    if (name == "exact") return OracleKind::exact;
    if (name == "mixture") return OracleKind::mixture;
    if (name == "lz78") return OracleKind::lz78;
    return std::nullopt;
}

std::string to_string(EstimateStatus status) {
    switch (status) {
        case EstimateStatus::exact: return "exact";
        case EstimateStatus::length_capped: return "length_capped";
        case EstimateStatus::budget_exhausted: return "budget_exhausted";
        case EstimateStatus::proxy: return "proxy";
    }
    return "?";
}

namespace {

struct ToyDescription {
    std::vector<Bit> bits;
    EstimateStatus status;
};

// Shortest toy program for w given x: exhaustive search when `search` is set,
// falling back to the single-instruction structured program.
ToyDescription toy_description(BitView w, BitView x, const OracleSettings& s, bool search,
                               std::uint64_t cap) {
    auto structured = toy::structured_program(w, x);
    const std::uint64_t bound = toy::program_length(structured);
    if (!search) return {toy::encode(structured), EstimateStatus::proxy};
    const std::uint64_t max_len = std::min(cap, bound);
    auto found = find_short_program(w, max_len, s.budget, x);
    if (found.status == SearchStatus::found) return {toy::encode(*found.program), EstimateStatus::exact};
    const auto status =
        found.status == SearchStatus::budget_exhausted ? EstimateStatus::budget_exhausted : EstimateStatus::length_capped;
    return {toy::encode(structured), status};
}

// The sequential model behind a proxy stream.
using StreamState = std::variant<MixtureModel, Lz78Coder>;

StreamState fresh_state(const OracleSettings& s) {
    if (s.kind == OracleKind::lz78) return Lz78Coder{};
    return MixtureModel{s.mixture};
}

void advance(StreamState& state, BitView bits) {
    std::visit([&](auto& m) { m.prime(bits); }, state);
}

// Codes w from `state`; when `after` is given it receives the model advanced
// past w, which saves a second pass when the block is then committed.
std::vector<Bit> encode_stream(const StreamState& state, BitView w, StreamState* after = nullptr) {
    if (auto* lz = std::get_if<Lz78Coder>(&state)) {
        if (after) {
            *after = *lz;
            advance(*after, w);
        }
        return lz->encode(w);
    }
    MixtureModel model = std::get<MixtureModel>(state);
    ArithmeticEncoder enc;
    for (Bit b : w) {
        enc.encode(b, model.predict16());
        model.update(b);
    }
    if (after) *after = std::move(model);
    return enc.finish();
}

std::optional<BitSequence> decode_stream(const StreamState& state, const BitSource& in, std::size_t length) {
    if (auto* lz = std::get_if<Lz78Coder>(&state)) return lz->decode(in, length);
    MixtureModel model = std::get<MixtureModel>(state);
    ArithmeticDecoder dec(in);
    BitSequence out;
    out.reserve(length);
    for (std::size_t k = 0; k < length; ++k) {
        auto b = dec.decode(model.predict16());
        if (!b) return std::nullopt;
        model.update(*b);
        out.push_back(*b);
    }
    if (!dec.finish()) return std::nullopt;
    return out;
}

std::optional<BitSequence> read_toy(const BitSource& in, BitView x, std::optional<std::size_t> length) {
    auto program = toy::read_program(in);
    if (!program) return std::nullopt;
    if (length) {
        std::uint64_t total = 0;
        for (const auto& ins : program->instructions) total += ins.length;
        if (total != *length) return std::nullopt;
    }
    auto out = toy::run(*program, x);
    if (!out || (length && out->size() != *length)) return std::nullopt;
    return out;
}

void put_all(std::vector<Bit>& out, BitView bits) { out.insert(out.end(), bits.begin(), bits.end()); }

class ExactCoder final : public ConditionalCoder {
public:
    explicit ExactCoder(OracleSettings s) : s_(std::move(s)) {}
    std::vector<Bit> describe(BitView block) const override {
        return toy_description(block, context_.view(), s_, true, s_.max_program_len).bits;
    }
    std::optional<BitSequence> reconstruct(const BitSource& in, std::size_t length) const override {
        return read_toy(in, context_.view(), length);
    }
    void commit(BitView block) override { context_.append(block); }
    std::unique_ptr<ConditionalCoder> clone() const override { return std::make_unique<ExactCoder>(*this); }
    std::size_t context_size() const override { return context_.size(); }

private:
    OracleSettings s_;
    BitSequence context_;
};

// Payload: '0' primed stream | '10' toy program | '11' fresh stream.
// describe() remembers the primed model advanced past the block it coded, so
// the usual describe-then-commit sequence costs one model pass. A coder is
// therefore not safe to share between threads; clone() one per thread.
// Model states are immutable and shared between clones, which keeps clone()
// cheap for the extension search that forks a decoder per candidate.
class ProxyCoder final : public ConditionalCoder {
public:
    explicit ProxyCoder(OracleSettings s)
        : s_(std::move(s)),
          primed_(std::make_shared<const StreamState>(fresh_state(s_))),
          fresh_(std::make_shared<const StreamState>(fresh_state(s_))) {}

    std::vector<Bit> describe(BitView block) const override {
        std::vector<Bit> best{0};
        StreamState after = *fresh_;
        put_all(best, encode_stream(*primed_, block, &after));
        cache_block_.assign(block.begin(), block.end());
        cache_state_ = std::move(after);
        auto toy = toy_description(block, context_.view(), s_, block.size() <= s_.proxy_search_limit,
                                   s_.max_program_len);
        if (toy.bits.size() + 2 < best.size()) {
            best = {1, 0};
            put_all(best, toy.bits);
        }
        if (!context_.empty()) {
            auto plain = encode_stream(*fresh_, block);
            if (plain.size() + 2 < best.size()) {
                best = {1, 1};
                put_all(best, plain);
            }
        }
        return best;
    }

    std::optional<BitSequence> reconstruct(const BitSource& in, std::size_t length) const override {
        auto tag = in();
        if (!tag) return std::nullopt;
        if (*tag == 0) return decode_stream(*primed_, in, length);
        auto sub = in();
        if (!sub) return std::nullopt;
        if (*sub == 0) return read_toy(in, context_.view(), length);
        return decode_stream(*fresh_, in, length);
    }

    void commit(BitView block) override {
        if (cache_state_ && cache_block_.size() == block.size() &&
            std::equal(block.begin(), block.end(), cache_block_.begin())) {
            primed_ = std::make_shared<const StreamState>(std::move(*cache_state_));
        } else {
            auto next = std::make_shared<StreamState>(*primed_);
            advance(*next, block);
            primed_ = std::move(next);
        }
        cache_state_.reset();
        cache_block_.clear();
        context_.append(block);
    }
    std::unique_ptr<ConditionalCoder> clone() const override { return std::make_unique<ProxyCoder>(*this); }
    std::size_t context_size() const override { return context_.size(); }

private:
    OracleSettings s_;
    std::shared_ptr<const StreamState> primed_;
    std::shared_ptr<const StreamState> fresh_;
    BitSequence context_;
    mutable std::vector<Bit> cache_block_;
    mutable std::optional<StreamState> cache_state_;
};

}  // namespace

ComplexityOracle::ComplexityOracle(OracleSettings settings) : settings_(std::move(settings)) {}

ComplexityOracle::Described ComplexityOracle::describe_impl(BitView w, BitView x, bool conditional) const {
    const auto& s = settings_;
    if (s.kind == OracleKind::exact) {
        auto toy = toy_description(w, conditional ? x : BitView{}, s, true, s.max_program_len);
        return {std::move(toy.bits), toy.status};
    }
    auto with_length = [&](const StreamState& state, std::vector<Bit> tag) {
        BitWriter out;
        out.put_bits(tag);
        elias::put_gamma(out, w.size() + 1);
        out.put_bits(encode_stream(state, w));
        return out.take();
    };
    const StreamState fresh = fresh_state(s);
    const bool search = w.size() <= s.proxy_search_limit;
    if (!conditional) {
        auto best = with_length(fresh, {0});
        auto toy = toy_description(w, {}, s, search, s.max_program_len);
        if (toy.bits.size() + 1 < best.size()) {
            best = {1};
            put_all(best, toy.bits);
        }
        return {std::move(best), EstimateStatus::proxy};
    }
    StreamState primed = fresh;
    advance(primed, x);
    auto best = with_length(primed, {0});
    auto toy = toy_description(w, x, s, search, s.max_program_len);
    if (toy.bits.size() + 2 < best.size()) {
        best = {1, 0};
        put_all(best, toy.bits);
    }
    auto plain = with_length(fresh, {1, 1});
    if (plain.size() < best.size()) best = std::move(plain);
    return {std::move(best), EstimateStatus::proxy};
}

std::optional<BitSequence> ComplexityOracle::reconstruct_impl(BitView d, BitView x, bool conditional) const {
    BitReader reader(d);
    auto in = source_of(reader);
    std::optional<BitSequence> out;
    const auto& s = settings_;
    auto stream = [&](const StreamState& state) -> std::optional<BitSequence> {
        auto len = elias::get_gamma(in);
        if (!len || *len - 1 > toy::kMaxOutput) return std::nullopt;
        return decode_stream(state, in, *len - 1);
    };
    if (s.kind == OracleKind::exact) {
        out = read_toy(in, conditional ? x : BitView{}, std::nullopt);
    } else if (!conditional) {
        auto tag = in();
        if (!tag) return std::nullopt;
        out = *tag == 0 ? stream(fresh_state(s)) : read_toy(in, {}, std::nullopt);
    } else {
        auto tag = in();
        if (!tag) return std::nullopt;
        if (*tag == 0) {
            StreamState primed = fresh_state(s);
            advance(primed, x);
            out = stream(primed);
        } else {
            auto sub = in();
            if (!sub) return std::nullopt;
            out = *sub == 0 ? read_toy(in, x, std::nullopt) : stream(fresh_state(s));
        }
    }
    if (!out || !reader.at_end()) return std::nullopt;
    return out;
}

Estimate ComplexityOracle::complexity(BitView w) const {
    auto d = describe_impl(w, {}, false);
    return {d.bits.size(), d.status};
}

Estimate ComplexityOracle::cond_complexity(BitView w, BitView x) const {
    auto d = describe_impl(w, x, true);
    return {d.bits.size(), d.status};
}

std::vector<Estimate> ComplexityOracle::prefix_complexities(BitView s, std::span<const std::uint64_t> lengths) const {
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        if (lengths[k] > s.size() || (k > 0 && lengths[k] <= lengths[k - 1])) {
            throw std::invalid_argument("prefix lengths must be strictly increasing and within the input");
        }
    }
    std::vector<Estimate> out;
    out.reserve(lengths.size());
    if (settings_.kind == OracleKind::exact) {
        for (auto n : lengths) out.push_back(complexity(s.first(n)));
        return out;
    }
    const std::uint64_t end = lengths.empty() ? 0 : lengths.back();
    // Stream lengths for every requested prefix.
    std::vector<std::size_t> stream(lengths.size());
    if (settings_.kind == OracleKind::lz78) {
        std::vector<std::uint64_t> ls(lengths.begin(), lengths.end());
        auto lz = Lz78Coder{}.prefix_lengths(s, ls);
        std::copy(lz.begin(), lz.end(), stream.begin());
    } else {
        MixtureModel model(settings_.mixture);
        ArithmeticEncoder enc;
        std::size_t next = 0;
        while (next < lengths.size() && lengths[next] == 0) stream[next++] = enc.finished_length();
        for (std::uint64_t i = 0; i < end; ++i) {
            enc.encode(s[i], model.predict16());
            model.update(s[i]);
            while (next < lengths.size() && lengths[next] == i + 1) stream[next++] = enc.finished_length();
        }
    }
    // Online prefix function: minimal period of every prefix.
    std::vector<std::size_t> pi(end, 0);
    std::size_t next = 0;
    for (std::uint64_t i = 0; i <= end && next < lengths.size(); ++i) {
        if (i > 0 && i < end) {
            std::size_t k = pi[i - 1];
            while (k > 0 && s[i] != s[k]) k = pi[k - 1];
            if (s[i] == s[k]) ++k;
            pi[i] = k;
        }
        while (next < lengths.size() && lengths[next] == i) {
            const std::uint64_t n = i;
            if (n <= settings_.proxy_search_limit) {
                out.push_back(complexity(s.first(n)));
            } else {
                const std::uint64_t period = n - pi[n - 1];
                std::uint64_t toy = toy::literal_cost(n);
                if (period == 1) {
                    toy = std::min<std::uint64_t>(toy, toy::run_cost(n));
                } else if (period < n) {
                    toy = std::min<std::uint64_t>(toy, toy::repeat_cost(period, n));
                }
                const std::uint64_t coded = 1 + elias::gamma_length(n + 1) + stream[next];
                out.push_back({std::min(coded, 1 + toy + 1), EstimateStatus::proxy});
            }
            ++next;
        }
    }
    return out;
}

std::vector<Bit> ComplexityOracle::describe(BitView w) const { return describe_impl(w, {}, false).bits; }

std::vector<Bit> ComplexityOracle::describe_given(BitView w, BitView x) const {
    return describe_impl(w, x, true).bits;
}

std::optional<BitSequence> ComplexityOracle::reconstruct(BitView description) const {
    return reconstruct_impl(description, {}, false);
}

std::optional<BitSequence> ComplexityOracle::reconstruct_given(BitView description, BitView x) const {
    return reconstruct_impl(description, x, true);
}

std::unique_ptr<ConditionalCoder> ComplexityOracle::make_coder() const {
    if (settings_.kind == OracleKind::exact) return std::make_unique<ExactCoder>(settings_);
    return std::make_unique<ProxyCoder>(settings_);
}

}  // namespace cdl
