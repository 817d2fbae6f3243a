#include <map>
#include <random>
#include <string>

#include "cdlab/complexity/arithmetic_coder.hpp"
#include "cdlab/complexity/elias.hpp"
#include "cdlab/complexity/lz78.hpp"
#include "cdlab/complexity/mixture_model.hpp"
#include "cdlab/complexity/oracle.hpp"
#include "cdlab/complexity/program_search.hpp"
#include "cdlab/complexity/toy_machine.hpp"
#include "cdlab/generators/generators.hpp"
#include "doctest.h"

using namespace cdl;

namespace {

std::vector<Bit> bits_of(std::uint64_t value, unsigned len) {
    std::vector<Bit> out(len);
    for (unsigned t = 0; t < len; ++t) out[t] = (value >> (len - 1 - t)) & 1u;
    return out;
}

std::string str(BitView v) {
    std::string s;
    for (Bit b : v) s += char('0' + b);
    return s;
}

BitSequence periodic(const std::string& pattern, std::size_t n, std::size_t from = 0) {
    BitSequence out;
    for (std::size_t k = from; k < from + n; ++k) out.push_back(pattern[k % pattern.size()] == '1');
    return out;
}

// Shortest program for every output up to `max_out` bits, by running every
// bit string of length <= max_prog as a program.
std::map<std::string, std::uint64_t> brute_force_shortest(unsigned max_prog, std::size_t max_out, BitView context = {}) {
    std::map<std::string, std::uint64_t> best;
    for (unsigned len = 0; len <= max_prog; ++len) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
            const auto p = bits_of(v, len);
            const auto out = toy::execute(p, context);
            if (!out || out->size() > max_out) continue;
            best.try_emplace(out->to_string(), len);
        }
    }
    return best;
}

// Largest exact-minus-proxy gap seen on strings of at most 24 bits.
constexpr std::int64_t kExactProxyGap = 12;

}  // namespace

TEST_CASE("elias gamma") {
    for (std::uint64_t n : {1ull, 2ull, 3ull, 4ull, 7ull, 8ull, 1000ull, 123456789ull, (1ull << 40) + 5}) {
        BitWriter w;
        elias::put_gamma(w, n);
        std::string bin;
        for (std::uint64_t x = n; x; x >>= 1) bin.insert(bin.begin(), char('0' + (x & 1)));
        CHECK(str(w.bits()) == std::string(bin.size() - 1, '0') + bin);
        CHECK(elias::gamma_length(n) == 2 * (bin.size() - 1) + 1);
        BitReader r(w.bits());
        CHECK(elias::get_gamma(r) == n);
        CHECK(r.at_end());
    }
    BitWriter w;
    elias::put_gamma(w, 9);
    auto cut = w.bits();
    cut.pop_back();
    BitReader r(cut);
    CHECK_FALSE(elias::get_gamma(r));
    CHECK(elias::ceil_log2(1) == 0);
    CHECK(elias::ceil_log2(1024) == 10);
    CHECK(elias::ceil_log2(1025) == 11);
    CHECK(elias::floor_log2(1025) == 10);
}

TEST_CASE("toy programs round trip through encode and parse") {
    toy::Program p;
    p.instructions.push_back(toy::Instruction::make_literal(BitSequence::from_string("101").view()));
    p.instructions.push_back(toy::Instruction::make_run(1, 9));
    p.instructions.push_back(toy::Instruction::make_repeat(BitSequence::from_string("01").view(), 5));
    p.instructions.push_back(toy::Instruction::make_copy(2, 3));
    const auto enc = toy::encode(p);
    CHECK(enc.size() == toy::program_length(p));
    const auto parsed = toy::parse(enc);
    REQUIRE(parsed);
    CHECK(parsed->program == p);
    CHECK(parsed->consumed == enc.size());
    const auto x = BitSequence::from_string("0011100");
    const auto out = toy::run(p, x.view());
    REQUIRE(out);
    CHECK(out->to_string() == "101" + std::string(9, '1') + "01010" + "111");
    CHECK_FALSE(toy::run(p, BitSequence::from_string("00").view()));  // copy out of range
}

TEST_CASE("toy grammar is prefix-free (all encodings up to 20 bits)") {
    std::uint64_t complete = 0;
    for (unsigned len = 0; len <= 20; ++len) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
            const auto p = bits_of(v, len);
            const auto r = toy::parse(p);
            if (!r || r->consumed != len) continue;
            ++complete;
            for (unsigned l = 0; l < len; ++l) {
                const auto q = toy::parse(BitView(p).first(l));
                REQUIRE_FALSE((q && q->consumed == l));
            }
        }
    }
    MESSAGE("complete programs of length <= 20: " << complete);
    CHECK(complete > 0);
}

TEST_CASE("program search agrees with brute-force enumeration") {
    const unsigned max_prog = 17;
    const auto best = brute_force_shortest(max_prog, 6);
    for (unsigned n = 1; n <= 6; ++n) {
        for (std::uint64_t v = 0; v < (1u << n); ++v) {
            const auto w = bits_of(v, n);
            const auto r = find_short_program(w, max_prog, 100'000'000);
            const auto it = best.find(str(w));
            if (it == best.end()) {
                CHECK(r.status == SearchStatus::none);
            } else {
                REQUIRE(r.status == SearchStatus::found);
                CHECK(r.length == it->second);
                CHECK(toy::execute(toy::encode(*r.program)) == BitSequence(w));
            }
        }
    }
    // With a context, copies count too.
    const auto x = BitSequence::from_string("0110100");
    const auto best_x = brute_force_shortest(15, 4, x.view());
    for (unsigned n = 1; n <= 4; ++n) {
        for (std::uint64_t v = 0; v < (1u << n); ++v) {
            const auto w = bits_of(v, n);
            const auto r = find_short_program(w, 15, 100'000'000, x.view());
            const auto it = best_x.find(str(w));
            if (it == best_x.end()) {
                CHECK(r.status == SearchStatus::none);
            } else {
                REQUIRE(r.status == SearchStatus::found);
                CHECK(r.length == it->second);
            }
        }
    }
}

TEST_CASE("program search examples") {
    const auto zeros64 = gen::zeros(64);
    const auto z = find_short_program(zeros64.view(), 32, 10'000'000);
    REQUIRE(z.status == SearchStatus::found);
    CHECK(z.length <= 32);
    const auto r = gen::prng(3, 64);
    CHECK(find_short_program(r.view(), 10, 10'000'000).status == SearchStatus::none);
    CHECK(find_short_program(r.view(), 0, 10'000'000).status == SearchStatus::none);
    CHECK(find_short_program(r.view(), 200, 5).status == SearchStatus::budget_exhausted);
    // Stepping yields the same answer as one run.
    ProgramSearch s(r.view(), 90);
    while (s.status() == SearchStatus::running) s.step();
    CHECK(s.result().length == find_short_program(r.view(), 90, 100'000'000).length);
}

TEST_CASE("exact oracle examples") {
    OracleSettings st;
    st.kind = OracleKind::exact;
    st.max_program_len = 32;
    const ComplexityOracle exact(st);
    CHECK(exact.complexity({}).bits <= kCLit);

    const auto zeros = gen::zeros(1024);
    CHECK(exact.complexity(zeros.view()).bits <= 2 * 10 + toy::kRunSlack);

    const auto r = gen::prng(5, 64);
    const auto e = exact.complexity(r.view());
    CHECK(e.status == EstimateStatus::length_capped);
    CHECK(e.bits == 64 + toy::literal_overhead(64));
    CHECK(e.bits <= 64 + kCLit);

    const auto x = gen::prng(8, 200);
    CHECK(exact.cond_complexity(x.view(), x.view()).bits <= toy::copy_cost(0, 200) + 1);
    CHECK(toy::copy_cost(0, 200) <= 4 + 2 * (1 + 8));
}

TEST_CASE("literal bound under every oracle kind") {
    for (auto kind : {OracleKind::exact, OracleKind::mixture, OracleKind::lz78}) {
        OracleSettings st;
        st.kind = kind;
        st.budget = 200'000;
        const ComplexityOracle o(st);
        for (std::size_t n : {0u, 1u, 5u, 24u, 25u, 100u, 1000u, 5000u}) {
            const auto w = gen::prng(n + 1, n);
            CHECK(o.complexity(w.view()).bits <= n + kCLit);
            const auto x = gen::prng(99, 300);
            CHECK(o.cond_complexity(w.view(), x.view()).bits <= n + kCLit);
        }
    }
}

TEST_CASE("descriptions decode back under every oracle kind") {
    std::vector<BitSequence> words = {BitSequence{}, BitSequence{1}, gen::zeros(300), gen::prng(1, 20),
                                      gen::prng(2, 700), periodic("00101101", 400)};
    gen::GeneratorSpec d;
    d.kind = gen::Kind::dilute;
    d.alpha = Rational(1, 2);
    words.push_back(gen::generate(d, 900));
    const auto x = periodic("00101101", 256);
    for (auto kind : {OracleKind::exact, OracleKind::mixture, OracleKind::lz78}) {
        OracleSettings st;
        st.kind = kind;
        st.budget = 200'000;
        const ComplexityOracle o(st);
        for (const auto& w : words) {
            const auto dsc = o.describe(w.view());
            CHECK(dsc.size() == o.complexity(w.view()).bits);
            CHECK(o.reconstruct(dsc) == w);
            const auto dx = o.describe_given(w.view(), x.view());
            CHECK(dx.size() == o.cond_complexity(w.view(), x.view()).bits);
            CHECK(o.reconstruct_given(dx, x.view()) == w);
            // Empty context costs at most the tag bit.
            CHECK(o.cond_complexity(w.view(), {}).bits <= o.complexity(w.view()).bits + 1);
        }
    }
}

TEST_CASE("context helps on a periodic pattern (reference proxy)") {
    const ComplexityOracle o;
    const auto x = periodic("00101101", 64);
    const auto w = periodic("00101101", 32, 64);
    CHECK(o.cond_complexity(w.view(), x.view()).bits < o.complexity(w.view()).bits);
}

TEST_CASE("exact never loses to the proxy by more than a fixed overhead (strings <= 24 bits)") {
    OracleSettings es;
    es.kind = OracleKind::exact;
    const ComplexityOracle exact(es), proxy;
    std::int64_t worst = INT64_MIN;
    auto visit = [&](BitView w) {
        const auto e = exact.complexity(w);
        REQUIRE(e.status == EstimateStatus::exact);
        const auto p = proxy.complexity(w);
        worst = std::max(worst, static_cast<std::int64_t>(e.bits) - static_cast<std::int64_t>(p.bits));
    };
    for (unsigned n = 0; n <= 10; ++n) {
        for (std::uint64_t v = 0; v < (1u << n); ++v) visit(bits_of(v, n));
    }
    std::mt19937_64 rng(5);
    for (int t = 0; t < 300; ++t) {
        const unsigned n = 11 + rng() % 14;
        visit(bits_of(rng(), n));
    }
    // Worst case found by a wider sweep (sparse strings favour the proxy).
    visit(BitSequence::from_string("000000001000001000000000").view());
    for (unsigned n = 11; n <= 24; ++n) {
        visit(gen::zeros(n).view());
        visit(periodic("011", n).view());
        visit(periodic("0001", n).view());
    }
    MESSAGE("max(exact - proxy) = " << worst);
    CHECK(worst <= kExactProxyGap);
}

TEST_CASE("arithmetic coder round trip") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = rng() % 400;
        std::vector<Bit> bits(n);
        std::vector<std::uint32_t> probs(n);
        for (std::size_t k = 0; k < n; ++k) {
            probs[k] = 1 + rng() % 65535;
            bits[k] = (rng() % 65536) < probs[k];
        }
        ArithmeticEncoder enc;
        for (std::size_t k = 0; k < n; ++k) enc.encode(bits[k], probs[k]);
        const std::size_t predicted = enc.finished_length();
        const auto stream = enc.finish();
        CHECK(stream.size() == predicted);
        std::size_t pos = 0;
        ArithmeticDecoder dec([&]() -> std::optional<Bit> {
            if (pos >= stream.size()) return std::nullopt;
            return stream[pos++];
        });
        std::vector<Bit> out;
        for (std::size_t k = 0; k < n; ++k) {
            const auto b = dec.decode(probs[k]);
            REQUIRE(b);
            out.push_back(*b);
        }
        CHECK(dec.finish());
        CHECK(out == bits);
        CHECK(dec.consumed() == stream.size());  // never reads past its own stream
    }
}

TEST_CASE("lz78 coder") {
    const auto w = periodic("0110", 3000);
    Lz78Coder c;
    const auto code = c.encode(w.view());
    CHECK(code.size() == c.encoded_length(w.view()));
    CHECK(code.size() < 1500);
    std::size_t pos = 0;
    const Lz78Coder::Source src = [&]() -> std::optional<Bit> {
        if (pos >= code.size()) return std::nullopt;
        return code[pos++];
    };
    CHECK(c.decode(src, w.size()) == w);
    CHECK(pos == code.size());

    Lz78Coder primed;
    primed.prime(periodic("0110", 2000).view());
    const auto tail = periodic("0110", 500, 2000);
    const auto pc = primed.encode(tail.view());
    CHECK(pc.size() < c.encoded_length(tail.view()));
    pos = 0;
    const Lz78Coder::Source src2 = [&]() -> std::optional<Bit> {
        if (pos >= pc.size()) return std::nullopt;
        return pc[pos++];
    };
    CHECK(primed.decode(src2, tail.size()) == tail);

    const auto r = gen::prng(4, 2000);
    const std::vector<std::uint64_t> lengths{0, 1, 10, 500, 1999, 2000};
    const auto pl = c.prefix_lengths(r.view(), lengths);
    for (std::size_t i = 0; i < lengths.size(); ++i) CHECK(pl[i] == c.encoded_length(r.prefix(lengths[i])));
}

TEST_CASE("mixture model is deterministic and copyable") {
    MixtureModel a;
    const auto s = gen::prng(2, 500);
    a.prime(s.view());
    MixtureModel b = a;
    for (int k = 0; k < 50; ++k) {
        REQUIRE(a.predict16() == b.predict16());
        a.update(k & 1);
        b.update(k & 1);
    }
    MixtureModel z;
    z.prime(gen::zeros(2000).view());
    CHECK(z.predict() < 0.01);
}

TEST_CASE("prefix complexities equal one-shot calls") {
    gen::GeneratorSpec d;
    d.kind = gen::Kind::dilute;
    d.alpha = Rational(1, 2);
    const auto s = gen::generate(d, 3000);
    const std::vector<std::uint64_t> lengths{0, 1, 20, 24, 25, 700, 3000};
    for (auto kind : {OracleKind::mixture, OracleKind::lz78}) {
        OracleSettings st;
        st.kind = kind;
        const ComplexityOracle o(st);
        const auto pc = o.prefix_complexities(s.view(), lengths);
        for (std::size_t i = 0; i < lengths.size(); ++i) {
            CHECK(pc[i].bits == o.complexity(s.prefix(lengths[i])).bits);
        }
    }
    const ComplexityOracle o;
    CHECK(o.complexity(s.view()).bits == o.complexity(s.view()).bits);
}
