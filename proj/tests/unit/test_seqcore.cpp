#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cdlab/generators/generators.hpp"
#include "cdlab/rational.hpp"
#include "cdlab/seqcore/blocks.hpp"
#include "cdlab/seqcore/seq_file.hpp"
#include "doctest.h"

using namespace cdl;

namespace {

std::filesystem::path temp_path(const char* name) {
    return std::filesystem::temp_directory_path() / (std::string("cdlab_test_") + name);
}

}  // namespace

TEST_CASE("block bounds") {
    CHECK(blocks::block_bounds(1) == blocks::Bounds{0, 1});
    CHECK(blocks::block_bounds(3) == blocks::Bounds{3, 6});
    CHECK(blocks::block_bounds(10) == blocks::Bounds{45, 55});
    CHECK_THROWS_AS(blocks::block_bounds(0), std::invalid_argument);
}

TEST_CASE("block containing matches a linear scan") {
    CHECK(blocks::block_containing(1).complete == 1);
    CHECK(blocks::block_containing(6).complete == 3);
    CHECK(blocks::block_containing(50).complete == 9);
    std::uint64_t k = 0;
    for (std::uint64_t m = 0; m < 20000; ++m) {
        while ((k + 1) * (k + 2) / 2 <= m) ++k;
        const auto c = blocks::block_containing(m);
        REQUIRE(c.complete == k);
        REQUIRE(c.holding == k + 1);
    }
    for (std::uint64_t n = 1; n < 5000; ++n) {
        std::uint64_t K = 0;
        while (K * (K + 1) / 2 < n) ++K;
        REQUIRE(blocks::blocks_to_cover(n) == K);
    }
    CHECK(blocks::block_containing(std::uint64_t{1} << 62).complete ==
          blocks::block_containing((std::uint64_t{1} << 62) - 1).complete);
}

TEST_CASE("bit sequence basics") {
    const auto s = BitSequence::from_string("0110");
    CHECK(s.size() == 4);
    CHECK(s.to_string() == "0110");
    CHECK(s == BitSequence{0, 1, 1, 0});
    CHECK_THROWS_AS(BitSequence::from_string("01x"), std::invalid_argument);
    BitSequence t;
    t.append(s.view());
    t.push_back(1);
    CHECK(t.to_string() == "01101");
}

TEST_CASE("prefix oracle horizon") {
    const auto o = PrefixOracle::of(BitSequence::from_string("101"));
    CHECK(o.bit(2) == 1);
    CHECK(o.take(2).to_string() == "10");
    CHECK_THROWS_AS(o.bit(3), HorizonError);
    CHECK_THROWS_AS(o.take(4), HorizonError);
    CHECK(o.readable(3));
    CHECK_FALSE(o.readable(4));
}

TEST_CASE("seq file layout") {
    SUBCASE("empty") {
        const auto bytes = seqfile::pack(BitSequence{});
        CHECK(bytes.size() == seqfile::kHeaderSize);
        CHECK(seqfile::unpack(bytes).empty());
    }
    SUBCASE("1010 is one byte, least significant bit first") {
        const auto bytes = seqfile::pack(BitSequence::from_string("1010"));
        REQUIRE(bytes.size() == seqfile::kHeaderSize + 1);
        CHECK(bytes[0] == 'C');
        CHECK(bytes[3] == '1');
        CHECK(bytes[4] == 4);
        for (int i = 5; i < 12; ++i) CHECK(bytes[i] == 0);
        CHECK(bytes[12] == 0x05);
        CHECK(seqfile::unpack(bytes).to_string() == "1010");
    }
    SUBCASE("bad input") {
        auto bytes = seqfile::pack(BitSequence::from_string("1111111111"));
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(seqfile::unpack(bad), seqfile::FormatError);
        bad = bytes;
        bad.pop_back();
        CHECK_THROWS_AS(seqfile::unpack(bad), seqfile::FormatError);
        bad = bytes;
        bad.back() |= 0x80;  // unused high bit set
        CHECK_THROWS_AS(seqfile::unpack(bad), seqfile::FormatError);
    }
}

TEST_CASE("seq file round trip on disk") {
    const auto path = temp_path("roundtrip.seq");
    const auto seq = gen::prng(11, 10'000);
    seqfile::write(path, seq);
    CHECK(std::filesystem::file_size(path) == seqfile::kHeaderSize + 1250);
    CHECK(seqfile::read(path) == seq);
    for (std::size_t n : {1u, 7u, 8u, 9u, 63u}) {
        const auto s = gen::prng(3, n);
        seqfile::write(path, s);
        CHECK(seqfile::read(path) == s);
    }
    std::filesystem::remove(path);
    CHECK_THROWS(seqfile::read(path));
}

TEST_CASE("rational") {
    CHECK(Rational(6, -8) == Rational(-3, 4));
    CHECK(Rational::parse("3/20") == Rational(3, 20));
    CHECK(Rational::parse("0.15") == Rational(3, 20));
    CHECK(Rational::parse("2") == Rational(2));
    CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
    CHECK(Rational(3, 8).to_decimal(6) == "0.375000");
    CHECK(Rational(2, 3).to_decimal(6) == "0.666667");
    CHECK(Rational(3, 8).to_fraction() == "3/8");
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
    CHECK(Rational::approximate(0.3) == Rational(3, 10));
}
