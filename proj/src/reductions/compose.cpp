#include "cdlab/reductions/compose.hpp"

#include <algorithm>

#include "cdlab/codec/codec.hpp"
#include "cdlab/reductions/machines.hpp"
#include "cdlab/seqcore/blocks.hpp"

namespace cdl::red {

OracleMachine compose(const OracleMachine& M1, const OracleMachine& M2) {
    return OracleMachine("compose(" + M1.name() + "," + M2.name() + ")", [M1, M2](MachineIO& io) {
        auto outer = M2.start();
        auto inner = M1.start();
        std::vector<Bit> middle;  // S' bits produced so far
        std::optional<Bit> inner_answer;

        auto produce_through = [&](std::uint64_t p) {
            while (middle.size() <= p) {
                Action a;
                try {
                    a = inner->next(inner_answer);
                } catch (const std::exception& e) {
                    throw MachineError("inner machine " + M1.name() + " failed: " + e.what());
                }
                inner_answer.reset();
                if (const auto* q = std::get_if<Query>(&a)) {
                    inner_answer = io.query(q->position);
                } else if (const auto* e = std::get_if<Emit>(&a)) {
                    middle.push_back(e->bit);
                } else if (std::holds_alternative<Tick>(a)) {
                    io.tick();
                } else {
                    throw MachineError("inner machine " + M1.name() + " halted after " +
                                       std::to_string(middle.size()) + " bits; outer machine " + M2.name() +
                                       " asked for bit " + std::to_string(p));
                }
            }
        };

        std::optional<Bit> answer;
        for (;;) {
            Action a;
            try {
                a = outer->next(answer);
            } catch (const std::exception& e) {
                throw MachineError("outer machine " + M2.name() + " failed: " + e.what());
            }
            answer.reset();
            if (const auto* q = std::get_if<Query>(&a)) {
                produce_through(q->position);
                answer = middle[q->position];
            } else if (const auto* e = std::get_if<Emit>(&a)) {
                io.emit(e->bit);
            } else if (std::holds_alternative<Tick>(a)) {
                io.tick();
            } else {
                return;
            }
        }
    });
}

namespace {

// S' as an oracle, produced by a private M1 process on first access.
PrefixOracle lazy_output(const OracleMachine& M1, const PrefixOracle& S) {
    struct State {
        std::unique_ptr<Process> proc;
        std::vector<Bit> bits;
        std::optional<Bit> answer;
    };
    auto st = std::make_shared<State>();
    st->proc = M1.start();
    return PrefixOracle(
        [st, S, name = M1.name()](std::uint64_t p) {
            while (st->bits.size() <= p) {
                const Action a = st->proc->next(st->answer);
                st->answer.reset();
                if (const auto* q = std::get_if<Query>(&a)) {
                    st->answer = S.bit(q->position);
                } else if (const auto* e = std::get_if<Emit>(&a)) {
                    st->bits.push_back(e->bit);
                } else if (std::holds_alternative<Halt>(a)) {
                    throw MachineError(name + " halted before bit " + std::to_string(p));
                }
            }
            return st->bits[p];
        },
        std::nullopt);
}

}  // namespace

CompositionCheck check_composition(const OracleMachine& M1, const OracleMachine& M2, const PrefixOracle& S,
                                   std::uint64_t n, std::uint64_t step_budget) {
    CompositionCheck c;
    c.composite = run(compose(M1, M2), S, n, step_budget);
    c.m2 = run(M2, lazy_output(M1, S), n, step_budget);
    const std::uint64_t produced = std::min(c.composite.trace.produced(), c.m2.trace.produced());
    const std::uint64_t need = c.m2.trace.usage[produced];
    c.m1 = run(M1, S, need, step_budget);
    c.law_holds = c.composite.trace.status == RunStatus::complete && c.m2.trace.status == RunStatus::complete &&
                  c.m1.trace.produced() == need;
    for (std::uint64_t k = 0; k <= produced && k < c.composite.trace.usage.size(); ++k) {
        const std::uint64_t u = c.m2.trace.usage[k];
        const std::uint64_t p = u < c.m1.trace.usage.size() ? c.m1.trace.usage[u] : UINT64_MAX;
        c.predicted.push_back(p);
        if (p != c.composite.trace.usage[k] && c.law_holds) {
            c.law_holds = false;
            c.first_mismatch = k;
        }
    }
    return c;
}

DoubleEncode double_encode(const PrefixOracle& X, std::uint64_t N, const ComplexityOracle& oracle) {
    DoubleEncode d;
    d.X = X.take(blocks::triangular(blocks::blocks_to_cover(N)));
    const auto e1 = codec::encode(X, N, oracle);
    const auto trace1 = codec::decode(PrefixOracle::of(e1.stream), N, oracle).trace;
    // Whole blocks of R1 only.
    std::uint64_t k1 = 0;
    while (blocks::triangular(k1 + 1) <= e1.stream.size()) ++k1;
    const std::uint64_t n1 = blocks::triangular(k1);
    d.R1 = BitSequence(std::vector<Bit>(e1.stream.raw().begin(), e1.stream.raw().begin() + static_cast<std::ptrdiff_t>(n1)));
    d.R2 = codec::encode(PrefixOracle::of(d.R1), n1, oracle).stream;
    // Largest n whose R1 usage stays inside the cut.
    while (d.n < N && trace1.usage[d.n + 1] <= n1) ++d.n;

    const auto dec = codec_decode(oracle);
    d.check = check_composition(dec, dec, PrefixOracle::of(d.R2), d.n);
    d.output_ok = d.check.composite.trace.status == RunStatus::complete &&
                  d.check.composite.output == d.X.prefix(d.n);

    auto ratio = [](const std::vector<std::uint64_t>& usage, std::uint64_t upto) {
        auto grid = dim::geometric_grid(dim::kDefaultGridStart, dim::kDefaultGridRatio, upto);
        return dim::ratio_profile(usage, grid, std::min(dim::ratio_tail_start(upto), upto));
    };
    d.composite = ratio(d.check.composite.trace.usage, d.n);
    d.outer = ratio(d.check.m2.trace.usage, d.n);
    d.inner = ratio(d.check.m1.trace.usage, d.check.m1.trace.produced());
    d.rho_composite = dim::dim_hat_P(d.composite);
    d.rho_outer = dim::dim_hat_P(d.outer);
    d.rho_inner = dim::dim_hat_P(d.inner);
    return d;
}

}  // namespace cdl::red
