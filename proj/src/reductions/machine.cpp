#include "cdlab/reductions/machine.hpp"

#include <boost/context/fiber.hpp>
#include <boost/context/protected_fixedsize_stack.hpp>
#include <ostream>

namespace cdl::red {

namespace ctx = boost::context;

struct Process::Impl final : MachineIO {
    Body body;
    ctx::fiber self;
    ctx::fiber caller;
    Action pending = Halt{};
    std::optional<Bit> answer;
    std::exception_ptr error;
    bool done = false;

    void yield(Action a) {
        pending = a;
        caller = std::move(caller).resume();
    }
    Bit query(std::uint64_t position) override {
        yield(Query{position});
        if (!answer) throw std::logic_error("query resumed without an answer");
        return *answer;
    }
    void emit(Bit bit) override { yield(Emit{static_cast<Bit>(bit ? 1 : 0)}); }
    void tick() override { yield(Tick{}); }
};

Process::Process(Body body) : impl_(std::make_unique<Impl>()) {
    impl_->body = std::move(body);
    Impl* im = impl_.get();
    im->self = ctx::fiber(std::allocator_arg, ctx::protected_fixedsize_stack(1 << 20), [im](ctx::fiber&& caller) {
        im->caller = std::move(caller);
        try {
            im->body(*im);
        } catch (const ctx::detail::forced_unwind&) {
            throw;
        } catch (...) {
            im->error = std::current_exception();
        }
        im->done = true;
        im->pending = Halt{};
        return std::move(im->caller);
    });
}

Process::~Process() = default;

Action Process::next(std::optional<Bit> answer) {
    if (impl_->done) return Halt{};
    impl_->answer = answer;
    impl_->self = std::move(impl_->self).resume();
    if (impl_->error) {
        auto e = impl_->error;
        impl_->error = nullptr;
        std::rethrow_exception(e);
    }
    return impl_->pending;
}

bool Process::finished() const { return impl_->done; }

DeclaredClass turing() { return {}; }

DeclaredClass wtt(std::function<std::uint64_t(std::uint64_t)> q, std::string label) {
    DeclaredClass c;
    c.kind = DeclaredClass::Kind::wtt;
    c.q = std::move(q);
    c.label = "wtt(" + label + ")";
    return c;
}

DeclaredClass bounded_tt(std::uint64_t bound) {
    DeclaredClass c;
    c.kind = DeclaredClass::Kind::bT;
    c.c = bound;
    c.label = "bT(" + std::to_string(bound) + ")";
    return c;
}

DeclaredClass truth_table() {
    DeclaredClass c;
    c.kind = DeclaredClass::Kind::tt;
    c.label = "tt";
    return c;
}

OracleMachine::OracleMachine(std::string name, Body body, DeclaredClass declared)
    : name_(std::move(name)), body_(std::move(body)), declared_(std::move(declared)) {}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::complete: return "complete";
        case RunStatus::halted: return "halted";
        case RunStatus::step_budget: return "step_budget";
        case RunStatus::horizon: return "horizon";
        case RunStatus::failed: return "failed";
    }
    return "?";
}

RunResult run(const OracleMachine& M, const PrefixOracle& R, std::uint64_t n, std::uint64_t step_budget) {
    RunResult out;
    auto& t = out.trace;
    t.usage.push_back(0);
    std::uint64_t rightmost = 0, queries = 0;
    auto proc = M.start();
    std::optional<Bit> answer;
    try {
        while (t.produced() < n) {
            if (t.steps == step_budget) {
                t.status = RunStatus::step_budget;
                t.detail = M.name() + ": step budget of " + std::to_string(step_budget) + " exhausted at bit " +
                           std::to_string(t.produced());
                return out;
            }
            const Action a = proc->next(answer);
            answer.reset();
            ++t.steps;
            if (const auto* q = std::get_if<Query>(&a)) {
                if (!R.readable(q->position + 1)) {
                    t.status = RunStatus::horizon;
                    t.detail = M.name() + ": query at " + std::to_string(q->position) + " beyond the oracle horizon";
                    return out;
                }
                answer = R.bit(q->position);
                rightmost = std::max(rightmost, q->position + 1);
                ++queries;
            } else if (const auto* e = std::get_if<Emit>(&a)) {
                out.output.push_back(e->bit);
                t.usage.push_back(rightmost);
                t.per_bit_queries.push_back(queries);
                queries = 0;
            } else if (std::holds_alternative<Halt>(a)) {
                t.status = RunStatus::halted;
                t.detail = M.name() + ": halted after " + std::to_string(t.produced()) + " bits";
                return out;
            }
        }
    } catch (const std::exception& e) {
        t.status = RunStatus::failed;
        t.detail = M.name() + ": " + e.what();
    }
    return out;
}

void write_trace_csv(std::ostream& out, const ReductionTrace& t) {
    out << "n,usage,per_bit_queries\n";
    for (std::uint64_t k = 0; k < t.produced(); ++k) {
        out << k + 1 << ',' << t.usage[k + 1] << ',' << t.per_bit_queries[k] << '\n';
    }
}

}  // namespace cdl::red
