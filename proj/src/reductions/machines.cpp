#include "cdlab/reductions/machines.hpp"

#include <cmath>

#include "cdlab/codec/codec.hpp"
#include "cdlab/reductions/guard.hpp"

namespace cdl::red {

namespace {

std::uint64_t at_most(std::uint64_t a, std::uint64_t b, std::uint64_t n) { return n == 0 ? 0 : a * (n - 1) + b + 1; }

}  // namespace

OracleMachine identity() {
    return OracleMachine(
        "identity",
        [](MachineIO& io) {
            for (std::uint64_t k = 0;; ++k) io.emit(io.query(k));
        },
        wtt([](std::uint64_t n) { return n; }, "n"));
}

OracleMachine complement() {
    return OracleMachine(
        "complement",
        [](MachineIO& io) {
            for (std::uint64_t k = 0;; ++k) io.emit(1 - io.query(k));
        },
        wtt([](std::uint64_t n) { return n; }, "n"));
}

OracleMachine position_map(std::uint64_t a, std::uint64_t b) {
    return OracleMachine(
        "position-map(" + std::to_string(a) + "k+" + std::to_string(b) + ")",
        [a, b](MachineIO& io) {
            for (std::uint64_t k = 0;; ++k) io.emit(io.query(a * k + b));
        },
        wtt([a, b](std::uint64_t n) { return at_most(a, b, n); },
            std::to_string(a) + "(n-1)+" + std::to_string(b + 1)));
}

OracleMachine xor_pair() {
    return OracleMachine(
        "xor-pair",
        [](MachineIO& io) {
            for (std::uint64_t k = 0;; ++k) {
                const Bit x = io.query(2 * k);
                io.emit(x ^ io.query(2 * k + 1));
            }
        },
        bounded_tt(2));
}

OracleMachine first_bit() {
    return OracleMachine(
        "first-bit",
        [](MachineIO& io) {
            const Bit b = io.query(0);
            for (;;) io.emit(b);
        },
        bounded_tt(1));
}

std::uint64_t codec_wtt_bound(std::uint64_t n) {
    const double x = static_cast<double>(n);
    return n + static_cast<std::uint64_t>(std::ceil(4.0 * std::sqrt(x) * std::log2(x + 2.0)));
}

OracleMachine codec_decode(const ComplexityOracle& oracle) {
    return OracleMachine(
        "codec-decode",
        [oracle](MachineIO& io) {
            codec::Decoder dec(oracle);
            std::uint64_t pos = 0;
            const BitSource in = [&]() -> std::optional<Bit> { return io.query(pos++); };
            for (;;) {
                const std::uint64_t i = dec.blocks_done() + 1;
                auto block = dec.next_block(in);
                if (!block) throw MachineError("record " + std::to_string(i) + " is malformed");
                for (Bit b : block->view()) io.emit(b);
            }
        },
        wtt(codec_wtt_bound, "n+ceil(4 sqrt(n) log2(n+2))"));
}

OracleMachine slow(const OracleMachine& inner, std::uint64_t ticks) {
    return OracleMachine(
        "slow(" + std::to_string(ticks) + "," + inner.name() + ")",
        [inner, ticks](MachineIO& io) {
            auto p = inner.start();
            std::optional<Bit> answer;
            for (;;) {
                const Action a = p->next(answer);
                answer.reset();
                if (const auto* q = std::get_if<Query>(&a)) {
                    answer = io.query(q->position);
                } else if (const auto* e = std::get_if<Emit>(&a)) {
                    for (std::uint64_t t = 0; t < ticks; ++t) io.tick();
                    io.emit(e->bit);
                } else if (std::holds_alternative<Tick>(a)) {
                    io.tick();
                } else {
                    return;
                }
            }
        },
        inner.declared());
}

OracleMachine diverge() {
    return OracleMachine("diverge", [](MachineIO& io) {
        for (;;) io.tick();
    });
}

OracleMachine make_machine(const std::string& name, const ComplexityOracle& oracle) {
    auto split = [&](std::size_t skip) {
        const auto colon = name.find(':', skip);
        if (colon == std::string::npos) throw std::invalid_argument("malformed machine name '" + name + "'");
        return std::make_pair(name.substr(skip, colon - skip), name.substr(colon + 1));
    };
    if (name == "identity") return identity();
    if (name == "complement") return complement();
    if (name == "double") return position_map(2, 1);
    if (name == "xor-pair") return xor_pair();
    if (name == "first-bit") return first_bit();
    if (name == "codec-decode") return codec_decode(oracle);
    if (name == "diverge") return diverge();
    if (name.rfind("slow:", 0) == 0) {
        auto [ticks, rest] = split(5);
        return slow(make_machine(rest, oracle), std::stoull(ticks));
    }
    if (name.rfind("guard:", 0) == 0) {
        auto [alpha, rest] = split(6);
        return guard(make_machine(rest, oracle), Rational::parse(alpha), oracle);
    }
    throw std::invalid_argument("unknown machine '" + name + "'");
}

std::vector<std::string> builtin_machine_names() {
    return {"identity", "complement", "double", "xor-pair", "first-bit", "codec-decode", "diverge",
            "slow:<ticks>:<name>", "guard:<alpha'>:<name>"};
}

}  // namespace cdl::red
