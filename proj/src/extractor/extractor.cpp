#include "cdlab/extractor/extractor.hpp"

#include <algorithm>
#include <tuple>

#include "cdlab/seqcore/blocks.hpp"

namespace cdl::ext {

namespace {

using i128 = __int128;

// usage <= r * n
bool within(std::uint64_t usage, const Rational& r, std::uint64_t n) {
    return static_cast<i128>(usage) * r.den() <= static_cast<i128>(r.num()) * static_cast<i128>(n);
}

// Smallest m >= n0 inside block k, if any: usage is constant over the block,
// so the bound D m is tightest there.
std::optional<std::uint64_t> tightest_m(std::uint64_t k, std::uint64_t n0) {
    const std::uint64_t lo = std::max(blocks::triangular(k - 1) + 1, std::max<std::uint64_t>(n0, 1));
    if (lo > blocks::triangular(k)) return std::nullopt;
    return lo;
}

BitSource source_over(BitView bits, std::size_t& pos) {
    return [bits, &pos]() -> std::optional<Bit> {
        if (pos >= bits.size()) return std::nullopt;
        return bits[pos++];
    };
}

bool matches_source(const BitSequence& block, const PrefixOracle& S, std::uint64_t k) {
    const auto b = blocks::block_bounds(k);
    if (!S.readable(b.end)) return false;
    for (std::uint64_t x = 0; x < block.size(); ++x) {
        if (block[x] != S.bit(b.start + x)) return false;
    }
    return true;
}

}  // namespace

ExtractorParams derive_params(const Rational& epsilon, const Rational& rho_minus, const Rational& rho_plus,
                              std::uint64_t n0) {
    ExtractorParams p;
    p.epsilon = epsilon;
    p.delta = epsilon * Rational(1, 4);
    p.d = rho_minus + p.delta * Rational(1, 2);
    p.D = rho_plus + p.delta * Rational(7, 2);
    p.n0 = n0;
    return p;
}

void validate(const ExtractorParams& p) {
    auto fail = [](const std::string& what) { throw std::invalid_argument("extractor parameters: " + what); };
    if (p.epsilon <= Rational(0)) fail("epsilon must be positive");
    if (p.delta <= Rational(0) || p.delta > p.epsilon * Rational(1, 4)) fail("need 0 < delta <= epsilon/4");
    if (p.d <= Rational(0)) fail("d must be positive");
    if (p.D < p.d) fail("need D >= d");
    if (p.search_budget == 0) fail("search_budget must be at least 1");
    if (p.full_lookahead > 16) fail("full_lookahead above 16 enumerates too many assignments");
    if (p.exhaustive_cap > 24) fail("exhaustive_cap above 24 is not supported");
}

std::string to_string(Condition c) {
    switch (c) {
        case Condition::a: return "a";
        case Condition::b: return "b";
        case Condition::c: return "c";
    }
    return "?";
}

CheckResult check_conditions(BitView candidate, const PrefixOracle& S, const ExtractorParams& p,
                             const ComplexityOracle& oracle) {
    CheckResult r;
    codec::Decoder dec(oracle);
    std::size_t pos = 0;
    const BitSource in = source_over(candidate, pos);
    while (pos < candidate.size()) {
        const std::uint64_t k = dec.blocks_done() + 1;
        auto block = dec.next_block(in);
        if (!block) {
            r.failed = Condition::a;
            r.position = k;
            r.detail = "record " + std::to_string(k) + " does not parse";
            return r;
        }
        if (!matches_source(*block, S, k)) {
            r.failed = Condition::a;
            r.position = k;
            r.detail = "record " + std::to_string(k) + " does not decode to block " + std::to_string(k) + " of S";
            return r;
        }
        r.boundary_usage.push_back(pos);
    }
    r.blocks = dec.blocks_done();
    r.N = blocks::triangular(r.blocks);
    if (r.blocks > 0 && !within(candidate.size(), p.d, r.N)) {
        r.failed = Condition::b;
        r.position = r.N;
        r.detail = "usage " + std::to_string(candidate.size()) + " exceeds d*N at N = " + std::to_string(r.N);
        return r;
    }
    for (std::uint64_t k = 1; k <= r.blocks; ++k) {
        const auto m = tightest_m(k, p.n0);
        if (m && !within(r.boundary_usage[k - 1], p.D, *m)) {
            r.failed = Condition::c;
            r.position = *m;
            r.detail = "usage " + std::to_string(r.boundary_usage[k - 1]) + " exceeds D*m at m = " +
                       std::to_string(*m);
            return r;
        }
    }
    return r;
}

ExhaustiveResult exhaustive_extension(const ExtractorState& state, const PrefixOracle& S, const ExtractorParams& p,
                                      const ComplexityOracle& oracle, std::uint64_t cap) {
    ExhaustiveResult out;
    const codec::Decoder base = codec::Decoder::with_context(oracle, state.decoded_prefix.view());
    const std::uint64_t U0 = state.emitted.size();

    auto passes = [&](unsigned len, std::uint64_t value) {
        std::vector<Bit> bits(len);
        for (unsigned t = 0; t < len; ++t) bits[t] = static_cast<Bit>((value >> (len - 1 - t)) & 1u);
        try {
            codec::Decoder dec = base;
            std::size_t pos = 0;
            const BitSource in = source_over(bits, pos);
            while (pos < len) {
                const std::uint64_t k = dec.blocks_done() + 1;
                auto block = dec.next_block(in);
                if (!block || !matches_source(*block, S, k)) return false;
                const auto m = tightest_m(k, p.n0);
                if (m && !within(U0 + pos, p.D, *m)) return false;
            }
            return within(U0 + len, p.d, blocks::triangular(dec.blocks_done()));
        } catch (const std::exception&) {
            return false;
        }
    };

    constexpr std::uint64_t kChunk = 1u << 14;
    for (unsigned len = 1; len <= cap; ++len) {
        const std::uint64_t count = std::uint64_t{1} << len;
        for (std::uint64_t start = 0; start < count; start += kChunk) {
            const std::uint64_t n = std::min(kChunk, count - start);
            std::vector<char> ok(n, 0);
#pragma omp parallel for schedule(dynamic, 256)
            for (std::int64_t x = 0; x < static_cast<std::int64_t>(n); ++x) {
                ok[static_cast<std::size_t>(x)] = passes(len, start + static_cast<std::uint64_t>(x)) ? 1 : 0;
            }
            const auto hit = std::find(ok.begin(), ok.end(), 1);
            if (hit != ok.end()) {
                const std::uint64_t value = start + static_cast<std::uint64_t>(hit - ok.begin());
                out.tried += static_cast<std::uint64_t>(hit - ok.begin()) + 1;
                BitSequence bits;
                for (unsigned t = 0; t < len; ++t) bits.push_back(static_cast<Bit>((value >> (len - 1 - t)) & 1u));
                out.found = std::move(bits);
                return out;
            }
            out.tried += n;
        }
    }
    return out;
}

Extractor::Extractor(PrefixOracle S, ExtractorParams params, const ComplexityOracle& oracle)
    : S_(std::move(S)), params_(std::move(params)), oracle_(oracle), encoder_(oracle), decoder_(oracle) {
    validate(params_);
}

const Extractor::Pending& Extractor::pending(std::size_t j) {
    while (pending_.size() <= j) {
        const std::uint64_t k = state_.blocks_done + pending_.size() + 1;
        const auto b = blocks::block_bounds(k);
        if (!S_.readable(b.end)) throw HorizonError(b.end - 1, *S_.horizon());
        Pending P;
        P.block.reserve(k);
        for (std::uint64_t x = b.start; x < b.end; ++x) P.block.push_back(S_.bit(x));
        P.literal = encoder_.literal_record(P.block.view());
        P.conditional = encoder_.conditional_record(P.block.view());
        encoder_.commit(P.block.view());

        auto decodes = [&](codec::Decoder& dec, const codec::CodeRecord& rec) {
            std::size_t pos = 0;
            auto out = dec.next_block(source_over(rec.bits, pos));
            return out && *out == P.block && pos == rec.size();
        };
        codec::Decoder probe = decoder_;
        P.conditional_ok = decodes(probe, P.conditional);
        P.literal_ok = decodes(decoder_, P.literal);
        pending_.push_back(std::move(P));
    }
    return pending_[j];
}

Extension Extractor::next_extension() {
    Extension ext;
    const std::uint64_t i = state_.blocks_done;
    const std::uint64_t U0 = state_.emitted.size();
    std::uint64_t tried = 0;
    bool horizon = false;

    auto available = [&](std::size_t j) {
        if (horizon) return false;
        try {
            pending(j);
            return true;
        } catch (const HorizonError&) {
            horizon = true;
            return false;
        }
    };
    auto pick = [&](std::size_t t, std::uint64_t mask) -> const codec::CodeRecord& {
        const Pending& P = pending_[t];
        return (mask >> t) & 1u ? P.conditional : P.literal;
    };
    auto decodes = [&](std::size_t t, std::uint64_t mask) {
        return (mask >> t) & 1u ? pending_[t].conditional_ok : pending_[t].literal_ok;
    };
    // Passing status of the assignment `mask` over blocks i+1..i+j; stops at
    // the first violation and reports the block index (1-based within the
    // stage) where (a) or (c) broke, 0 when only (b) failed.
    auto check = [&](std::size_t j, std::uint64_t mask, std::size_t& broke_at) {
        std::uint64_t U = U0;
        for (std::size_t t = 0; t < j; ++t) {
            if (!decodes(t, mask)) {
                broke_at = t + 1;
                return false;
            }
            U += pick(t, mask).size();
            const auto m = tightest_m(i + t + 1, params_.n0);
            if (m && !within(U, params_.D, *m)) {
                broke_at = t + 1;
                return false;
            }
        }
        broke_at = 0;
        return within(U, params_.d, blocks::triangular(i + j));
    };
    auto take = [&](std::size_t j, std::uint64_t mask, bool exhaustive) {
        std::vector<const codec::CodeRecord*> recs;
        for (std::size_t t = 0; t < j; ++t) recs.push_back(&pick(t, mask));
        ext.found = true;
        for (auto* r : recs) ext.bits.append(r->bits);
        accept(recs, tried, exhaustive);
        ext.record = state_.log.back();
        return ext;
    };

    // Full enumeration for short lookahead.
    std::size_t J = 0;
    while (J < params_.full_lookahead && available(J)) ++J;
    struct Cand {
        std::uint64_t length;
        std::size_t j;
        std::uint64_t mask;
    };
    std::vector<Cand> cands;
    for (std::size_t j = 1; j <= J; ++j) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << j); ++mask) {
            std::uint64_t len = 0;
            for (std::size_t t = 0; t < j; ++t) len += pick(t, mask).size();
            cands.push_back({len, j, mask});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return std::tie(a.length, a.j, a.mask) < std::tie(b.length, b.j, b.mask);
    });
    for (const auto& c : cands) {
        if (tried == params_.search_budget) break;
        ++tried;
        std::size_t broke_at = 0;
        if (check(c.j, c.mask, broke_at)) return take(c.j, c.mask, false);
    }

    // Longer stages: only the shortest assignment can pass first. Its usage
    // is accumulated block by block; once (a) or (c) breaks, every longer
    // stage breaks at the same block.
    bool dead = false;
    std::vector<const codec::CodeRecord*> best;
    std::uint64_t U = U0;
    for (std::size_t j = 1; tried < params_.search_budget && J == params_.full_lookahead; ++j) {
        if (!available(j - 1)) break;
        const Pending& P = pending_[j - 1];
        const bool cond = P.conditional_ok && (!P.literal_ok || P.conditional.size() < P.literal.size());
        const auto m = tightest_m(i + j, params_.n0);
        if (!(cond || P.literal_ok) ||
            (m && !within(U + (cond ? P.conditional : P.literal).size(), params_.D, *m))) {
            dead = true;
            break;
        }
        best.push_back(cond ? &P.conditional : &P.literal);
        U += best.back()->size();
        if (j <= J) continue;
        ++tried;
        if (within(U, params_.d, blocks::triangular(i + j))) {
            ext.found = true;
            for (auto* r : best) ext.bits.append(r->bits);
            accept(best, tried, false);
            ext.record = state_.log.back();
            return ext;
        }
    }

    if (params_.exhaustive_cap > 0) {
        auto ex = exhaustive_extension(state_, S_, params_, oracle_, params_.exhaustive_cap);
        tried += ex.tried;
        if (ex.found) {
            ext.found = true;
            ext.bits = *ex.found;
            accept_bits(*ex.found, tried);
            ext.record = state_.log.back();
            return ext;
        }
    }

    ext.found = false;
    if (horizon) {
        ext.reason = "source horizon reached before any candidate satisfied (b)";
    } else if (dead) {
        ext.reason = "condition (c) fails for every extension of the shortest encoding";
    } else {
        ext.reason = "search budget of " + std::to_string(params_.search_budget) + " candidates exhausted";
    }
    ext.record.stage = state_.log.size() + 1;
    ext.record.first_block = i + 1;
    ext.record.candidates = tried;
    const Rational d2 = params_.d + params_.delta * Rational(1, 2);
    ext.hint = "increase d by delta/2 (d = " + d2.to_fraction() + ")";
    return ext;
}

void Extractor::accept(const std::vector<const codec::CodeRecord*>& records, std::uint64_t candidates,
                       bool exhaustive) {
    StageRecord rec;
    rec.stage = state_.log.size() + 1;
    rec.first_block = state_.blocks_done + 1;
    rec.candidates = candidates;
    rec.exhaustive = exhaustive;
    for (std::size_t t = 0; t < records.size(); ++t) {
        const auto* r = records[t];
        state_.emitted.append(r->bits);
        const std::uint64_t k = state_.blocks_done + 1;
        state_.blocks_done = k;
        state_.boundary_usage.push_back(state_.emitted.size());
        state_.decoded_prefix.append(pending_[t].block.view());
        rec.modes.push_back(r->mode == codec::Mode::literal ? 'L' : 'C');
        if (const auto m = tightest_m(k, params_.n0)) {
            const Rational q(static_cast<std::int64_t>(state_.emitted.size()), static_cast<std::int64_t>(*m));
            if (q > rec.c_peak) rec.c_peak = q;
        }
    }
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(records.size()));
    rec.last_block = state_.blocks_done;
    rec.N = blocks::triangular(state_.blocks_done);
    rec.usage = state_.emitted.size();
    state_.log.push_back(std::move(rec));
}

void Extractor::accept_bits(const BitSequence& bits, std::uint64_t candidates) {
    codec::Decoder dec = codec::Decoder::with_context(oracle_, state_.decoded_prefix.view());
    std::size_t pos = 0;
    const BitSource in = source_over(bits.view(), pos);
    std::vector<codec::CodeRecord> recs;
    std::size_t before = 0;
    while (pos < bits.size()) {
        if (!dec.next_block(in)) throw std::logic_error("accepted exhaustive candidate does not parse");
        codec::CodeRecord r;
        r.mode = bits[before] == 0 ? codec::Mode::literal : codec::Mode::conditional;
        r.bits.assign(bits.raw().begin() + static_cast<std::ptrdiff_t>(before),
                      bits.raw().begin() + static_cast<std::ptrdiff_t>(pos));
        recs.push_back(std::move(r));
        before = pos;
    }
    pending(recs.size() - 1);
    std::vector<const codec::CodeRecord*> ptrs;
    for (const auto& r : recs) ptrs.push_back(&r);
    accept(ptrs, candidates, true);
}

Verification verify_run(const BitSequence& R, const PrefixOracle& S, const ExtractorParams& p,
                        const std::vector<std::uint64_t>& stage_boundaries, const ComplexityOracle& oracle) {
    Verification v;
    v.N = stage_boundaries.empty() ? 0 : stage_boundaries.back();
    codec::Decoded dec;
    try {
        dec = codec::decode(PrefixOracle::of(R), v.N, oracle);
    } catch (const std::exception& e) {
        v.detail = std::string("(a) decode failed: ") + e.what();
        return v;
    }
    if (!S.readable(v.N) || !(dec.prefix == S.take(v.N).view())) {
        v.detail = "(a) decoded prefix differs from S";
        return v;
    }
    if (v.N > 0 && dec.trace.usage[v.N] != R.size()) {
        v.detail = "(a) stream has bits beyond the last record";
        return v;
    }
    v.decode_ok = true;
    for (auto N : stage_boundaries) {
        if (!within(dec.trace.usage[N], p.d, N)) v.b_violations.push_back(N);
    }
    for (std::uint64_t m = std::max<std::uint64_t>(p.n0, 1); m <= v.N; ++m) {
        if (!within(dec.trace.usage[m], p.D, m)) {
            if (v.c_violations.size() < 32) v.c_violations.push_back(m);
            ++v.c_violation_count;
        }
    }
    return v;
}

ExtractionError::ExtractionError(Kind kind, const std::string& what, ExtractReport partial)
    : std::runtime_error(what), kind_(kind), partial_(std::move(partial)) {}

namespace {

dim::DimensionProfile profile_of(const PrefixOracle& S, std::uint64_t N, const ExtractOptions& o,
                                 const ComplexityOracle& oracle) {
    auto grid = dim::geometric_grid(o.grid_start, o.grid_ratio, N);
    return dim::profile(S, std::move(grid), oracle, std::min(dim::default_tail_start(N), N));
}

}  // namespace

ExtractResult extract(const PrefixOracle& S, const ExtractOptions& options, const ComplexityOracle& oracle) {
    if (options.target_N == 0) throw std::invalid_argument("target_N must be positive");
    const std::uint64_t H = options.profile_N ? options.profile_N : options.target_N;
    ExtractReport rep;
    rep.source_profile = profile_of(S, H, options, oracle);
    rep.source_H = dim::dim_hat_H(rep.source_profile);
    rep.source_P = dim::dim_hat_P(rep.source_profile);
    rep.target_P = Rational(1) - options.epsilon;
    if (!(rep.source_P > options.precondition_floor)) {
        throw ExtractionError(ExtractionError::Kind::precondition,
                              "precondition dim_P(S) > 0 violated: dim_hat_P(S) = " + rep.source_P.to_decimal(6) +
                                  " <= " + options.precondition_floor.to_decimal(6),
                              rep);
    }
    rep.target_H = rep.source_H / rep.source_P - options.epsilon;

    const std::uint64_t ratio_tail = std::min(dim::ratio_tail_start(H), H);
    auto grid = dim::geometric_grid(options.grid_start, options.grid_ratio, H);
    rep.source_ratio = codec::compression_trace(S, H, oracle, grid, ratio_tail).profile;

    Rational lo = rep.source_H, hi = rep.source_P;
    std::uint64_t n0 = rep.source_profile.tail_start;
    if (options.source == ParamSource::codec_ratio) {
        std::tie(lo, hi) = dim::rho_hats(rep.source_ratio);
        n0 = ratio_tail;
    }
    ExtractorParams p = derive_params(options.epsilon, lo, hi, options.n0.value_or(n0));
    if (options.d) p.d = *options.d;
    if (options.D) p.D = *options.D;
    p.search_budget = options.search_budget;
    p.full_lookahead = options.full_lookahead;
    p.exhaustive_cap = options.exhaustive_cap;
    validate(p);
    rep.params = p;

    Extractor ex(S, p, oracle);
    BitSequence snapshot;
    while (ex.state().decoded_prefix.size() < options.target_N) {
        auto step = ex.next_extension();
        if (!step.found) {
            rep.stages = ex.state().log;
            rep.covered = ex.state().decoded_prefix.size();
            throw ExtractionError(ExtractionError::Kind::exhausted,
                                  "stage " + std::to_string(step.record.stage) + " exhausted at block " +
                                      std::to_string(step.record.first_block) + ": " + step.reason + "; " + step.hint,
                                  rep);
        }
        const BitSequence& now = ex.state().emitted;
        if (now.size() < snapshot.size() || !std::equal(snapshot.raw().begin(), snapshot.raw().end(), now.raw().begin())) {
            rep.prefix_stable = false;
        }
        snapshot = now;
    }

    ExtractResult out;
    out.R = ex.state().emitted;
    rep.stages = ex.state().log;
    rep.covered = ex.state().decoded_prefix.size();
    std::vector<std::uint64_t> boundaries;
    for (const auto& s : rep.stages) boundaries.push_back(s.N);
    rep.verification = verify_run(out.R, S, p, boundaries, oracle);
    rep.output_profile = profile_of(PrefixOracle::of(out.R), out.R.size(), options, oracle);
    rep.output_H = dim::dim_hat_H(rep.output_profile);
    rep.output_P = dim::dim_hat_P(rep.output_profile);
    out.report = std::move(rep);
    return out;
}

}  // namespace cdl::ext
