#include "cdlab/complexity/toy_machine.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace cdl::toy {

using elias::gamma_length;

Instruction Instruction::make_literal(BitView payload) {
    Instruction ins;
    ins.op = Opcode::literal;
    ins.bits.assign(payload.begin(), payload.end());
    ins.length = payload.size();
    return ins;
}

Instruction Instruction::make_run(Bit b, std::uint64_t length) {
    if (length == 0) throw std::invalid_argument("run length must be >= 1");
    Instruction ins;
    ins.op = Opcode::run;
    ins.run_bit = b ? 1 : 0;
    ins.length = length;
    return ins;
}

Instruction Instruction::make_copy(std::uint64_t offset, std::uint64_t length) {
    if (length == 0) throw std::invalid_argument("copy length must be >= 1");
    Instruction ins;
    ins.op = Opcode::copy;
    ins.offset = offset;
    ins.length = length;
    return ins;
}

Instruction Instruction::make_repeat(BitView pattern, std::uint64_t length) {
    if (pattern.empty() || length == 0) throw std::invalid_argument("repeat needs a pattern and length >= 1");
    Instruction ins;
    ins.op = Opcode::repeat;
    ins.bits.assign(pattern.begin(), pattern.end());
    ins.length = length;
    return ins;
}

std::uint64_t literal_cost(std::uint64_t length) { return 3 + gamma_length(length + 1) + length; }
std::uint64_t run_cost(std::uint64_t length) { return 4 + gamma_length(length); }
std::uint64_t copy_cost(std::uint64_t offset, std::uint64_t length) {
    return 3 + gamma_length(offset + 1) + gamma_length(length);
}
std::uint64_t repeat_cost(std::uint64_t period, std::uint64_t length) {
    return 3 + gamma_length(period) + period + gamma_length(length);
}

std::uint64_t instruction_cost(const Instruction& ins) {
    switch (ins.op) {
        case Opcode::literal: return literal_cost(ins.bits.size());
        case Opcode::run: return run_cost(ins.length);
        case Opcode::copy: return copy_cost(ins.offset, ins.length);
        case Opcode::repeat: return repeat_cost(ins.bits.size(), ins.length);
    }
    return 0;
}

std::uint64_t program_length(const Program& p) {
    std::uint64_t total = 1;
    for (const auto& ins : p.instructions) total += instruction_cost(ins);
    return total;
}

std::uint64_t literal_overhead(std::uint64_t length) { return literal_cost(length) + 1 - length; }

std::vector<Bit> encode(const Program& p) {
    BitWriter out;
    for (const auto& ins : p.instructions) {
        out.put(1);
        out.put_uint(static_cast<std::uint64_t>(ins.op), 2);
        switch (ins.op) {
            case Opcode::literal:
                elias::put_gamma(out, ins.bits.size() + 1);
                out.put_bits(ins.bits);
                break;
            case Opcode::run:
                out.put(ins.run_bit);
                elias::put_gamma(out, ins.length);
                break;
            case Opcode::copy:
                elias::put_gamma(out, ins.offset + 1);
                elias::put_gamma(out, ins.length);
                break;
            case Opcode::repeat:
                elias::put_gamma(out, ins.bits.size());
                out.put_bits(ins.bits);
                elias::put_gamma(out, ins.length);
                break;
        }
    }
    out.put(0);
    return out.take();
}

std::optional<Program> read_program(const BitSource& in) {
    Program p;
    std::uint64_t total = 0;
    auto take = [&](std::uint64_t count, std::vector<Bit>& into) {
        for (std::uint64_t k = 0; k < count; ++k) {
            auto b = in();
            if (!b) return false;
            into.push_back(*b);
        }
        return true;
    };
    for (;;) {
        auto more = in();
        if (!more) return std::nullopt;
        if (*more == 0) break;
        auto hi = in();
        auto lo = hi ? in() : std::nullopt;
        if (!lo) return std::nullopt;
        Instruction ins;
        ins.op = static_cast<Opcode>((*hi << 1) | *lo);
        switch (ins.op) {
            case Opcode::literal: {
                auto len = elias::get_gamma(in);
                if (!len || *len - 1 > kMaxOutput) return std::nullopt;
                ins.length = *len - 1;
                if (!take(ins.length, ins.bits)) return std::nullopt;
                break;
            }
            case Opcode::run: {
                auto b = in();
                if (!b) return std::nullopt;
                auto len = elias::get_gamma(in);
                if (!len) return std::nullopt;
                ins.run_bit = *b;
                ins.length = *len;
                break;
            }
            case Opcode::copy: {
                auto off = elias::get_gamma(in);
                if (!off) return std::nullopt;
                auto len = elias::get_gamma(in);
                if (!len) return std::nullopt;
                ins.offset = *off - 1;
                ins.length = *len;
                break;
            }
            case Opcode::repeat: {
                auto period = elias::get_gamma(in);
                if (!period || *period > kMaxOutput) return std::nullopt;
                if (!take(*period, ins.bits)) return std::nullopt;
                auto len = elias::get_gamma(in);
                if (!len) return std::nullopt;
                ins.length = *len;
                break;
            }
        }
        total += ins.length;
        if (total > kMaxOutput) return std::nullopt;
        p.instructions.push_back(std::move(ins));
    }
    return p;
}

std::optional<Parsed> parse(BitView bits) {
    BitReader reader(bits);
    auto program = read_program(source_of(reader));
    if (!program) return std::nullopt;
    return Parsed{std::move(*program), reader.position()};
}

std::optional<BitSequence> run(const Program& p, BitView context) {
    std::uint64_t total = 0;
    for (const auto& ins : p.instructions) {
        total += ins.length;
        if (total > kMaxOutput) return std::nullopt;
        if (ins.op == Opcode::copy &&
            (ins.offset > context.size() || ins.length > context.size() - ins.offset)) {
            return std::nullopt;
        }
    }
    BitSequence out;
    out.reserve(total);
    for (const auto& ins : p.instructions) {
        switch (ins.op) {
            case Opcode::literal: out.append(ins.bits); break;
            case Opcode::run:
                for (std::uint64_t k = 0; k < ins.length; ++k) out.push_back(ins.run_bit);
                break;
            case Opcode::copy: out.append(context.subspan(ins.offset, ins.length)); break;
            case Opcode::repeat:
                for (std::uint64_t k = 0; k < ins.length; ++k) out.push_back(ins.bits[k % ins.bits.size()]);
                break;
        }
    }
    return out;
}

std::optional<BitSequence> execute(BitView bits, BitView context) {
    auto parsed = parse(bits);
    if (!parsed || parsed->consumed != bits.size()) return std::nullopt;
    return run(parsed->program, context);
}

namespace {

// Smallest P such that w is P-periodic (prefix function).
std::size_t minimal_period(BitView w) {
    const std::size_t n = w.size();
    if (n == 0) return 0;
    std::vector<std::size_t> pi(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t k = pi[i - 1];
        while (k > 0 && w[i] != w[k]) k = pi[k - 1];
        if (w[i] == w[k]) ++k;
        pi[i] = k;
    }
    return n - pi[n - 1];
}

}  // namespace

Program structured_program(BitView w, BitView context) {
    Program best;
    if (w.empty()) return best;
    best.instructions.push_back(Instruction::make_literal(w));
    std::uint64_t best_cost = literal_cost(w.size());
    auto consider = [&](Instruction ins) {
        auto c = instruction_cost(ins);
        if (c < best_cost) {
            best_cost = c;
            best.instructions.assign(1, std::move(ins));
        }
    };
    const std::size_t period = minimal_period(w);
    if (period == 1) {
        consider(Instruction::make_run(w[0], w.size()));
    } else if (period < w.size()) {
        consider(Instruction::make_repeat(w.first(period), w.size()));
    }
    if (!context.empty() && w.size() <= context.size()) {
        auto it = std::search(context.begin(), context.end(),
                              std::boyer_moore_horspool_searcher(w.begin(), w.end()));
        if (it != context.end()) {
            consider(Instruction::make_copy(static_cast<std::uint64_t>(it - context.begin()), w.size()));
        }
    }
    return best;
}

}  // namespace cdl::toy
