#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cdlab/complexity/elias.hpp"
#include "cdlab/seqcore/bit_sequence.hpp"

// A deliberately small universal-machine stand-in. A program is
//
//     { '1' Instr }* '0'
//
// and each instruction is a 2-bit opcode followed by Elias-gamma fields:
//
//     00 LITERAL  gamma(L+1), L raw bits                  L >= 0
//     01 RUN      b, gamma(L)                              b^L, L >= 1
//     10 COPY     gamma(o+1), gamma(L)                     x[o..o+L-1], L >= 1
//     11 REPEAT   gamma(P), P pattern bits, gamma(L)       pattern cycled to L bits
//
// x is the conditioning string; COPY outside x is a runtime error. The
// grammar is prefix-free: the parser always knows where a program ends.
namespace cdl::toy {

enum class Opcode : std::uint8_t { literal = 0, run = 1, copy = 2, repeat = 3 };

struct Instruction {
    Opcode op = Opcode::literal;
    std::vector<Bit> bits;     // literal payload or repeat pattern
    Bit run_bit = 0;
    std::uint64_t offset = 0;  // copy source offset
    std::uint64_t length = 0;  // output length (literal: bits.size())

    static Instruction make_literal(BitView payload);
    static Instruction make_run(Bit b, std::uint64_t length);
    static Instruction make_copy(std::uint64_t offset, std::uint64_t length);
    static Instruction make_repeat(BitView pattern, std::uint64_t length);

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Program {
    std::vector<Instruction> instructions;
    friend bool operator==(const Program&, const Program&) = default;
};

// Outputs larger than this are treated as invalid by the interpreter.
inline constexpr std::uint64_t kMaxOutput = std::uint64_t{1} << 28;

// Encoded size of one instruction, including its leading '1' continuation bit.
std::uint64_t instruction_cost(const Instruction& ins);
std::uint64_t literal_cost(std::uint64_t length);
std::uint64_t run_cost(std::uint64_t length);
std::uint64_t copy_cost(std::uint64_t offset, std::uint64_t length);
std::uint64_t repeat_cost(std::uint64_t period, std::uint64_t length);

// Whole-program size: instruction costs plus the terminating '0'.
std::uint64_t program_length(const Program& p);

// Fixed overheads, documented in docs/toy_machine.md.
// literal program for w: |w| + literal_overhead(|w|) bits.
std::uint64_t literal_overhead(std::uint64_t length);
// run program for b^L: at most 2*ceil(log2 L) + kRunSlack bits.
inline constexpr std::uint64_t kRunSlack = 6;

std::vector<Bit> encode(const Program& p);

struct Parsed {
    Program program;
    std::size_t consumed = 0;
};
// Syntactic parse from the start of `bits`; nullopt if the bits end early.
std::optional<Parsed> parse(BitView bits);
// Streaming parse: reads exactly the bits of one program from `in`.
// Programs whose declared output exceeds kMaxOutput are rejected.
std::optional<Program> read_program(const BitSource& in);

// Runs a parsed program; nullopt on an out-of-range COPY or oversized output.
std::optional<BitSequence> run(const Program& p, BitView context = {});

// Parse + run, requiring the program to span all of `bits` exactly.
std::optional<BitSequence> execute(BitView bits, BitView context = {});

// Linear-time single-instruction description of w: the cheapest of a
// literal, a run, the earliest copy out of the context, or a repeat of the
// minimal period. Used by the compressor proxies as an escape hatch.
Program structured_program(BitView w, BitView context = {});

}  // namespace cdl::toy
