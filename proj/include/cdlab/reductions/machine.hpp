#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cdlab/seqcore/bit_sequence.hpp"

// Oracle machines as step functions. A machine body is ordinary code that
// calls io.query / io.emit / io.tick; each call is one step, and the body runs
// on its own fiber so a driver sees it as a stream of actions
//
//     Query{p}  answer with R[p]
//     Emit{b}   next output bit
//     Tick      a step without oracle access (computation time)
//     Halt      body returned
//
// Output is progressive: bit k is the k-th Emit, so the query usage of the
// first n output bits is everything queried before the n-th Emit.
namespace cdl::red {

struct Query {
    std::uint64_t position;
};
struct Emit {
    Bit bit;
};
struct Tick {};
struct Halt {};
using Action = std::variant<Query, Emit, Tick, Halt>;

class MachineIO {
public:
    virtual ~MachineIO() = default;
    virtual Bit query(std::uint64_t position) = 0;
    virtual void emit(Bit bit) = 0;
    virtual void tick() = 0;
};

using Body = std::function<void(MachineIO&)>;

// Raised inside a body for a domain failure (malformed input and the like).
class MachineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One run of a body. Not copyable; destroying an unfinished process unwinds
// its fiber.
class Process {
public:
    explicit Process(Body body);
    ~Process();
    Process(const Process&) = delete;
    Process& operator=(const Process&) = delete;

    // Runs the body to its next action. After a Query the following call
    // must pass the answer. Exceptions escaping the body are rethrown here.
    Action next(std::optional<Bit> answer = std::nullopt);
    bool finished() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Declared reduction class; membership is only ever checked on traces.
struct DeclaredClass {
    enum class Kind { turing, wtt, bT, tt };
    Kind kind = Kind::turing;
    std::function<std::uint64_t(std::uint64_t)> q;  // wtt bound
    std::uint64_t c = 0;                            // bT bound
    std::string label = "T";
};

DeclaredClass turing();
DeclaredClass wtt(std::function<std::uint64_t(std::uint64_t)> q, std::string label);
DeclaredClass bounded_tt(std::uint64_t c);
DeclaredClass truth_table();

class OracleMachine {
public:
    OracleMachine(std::string name, Body body, DeclaredClass declared = turing());

    const std::string& name() const { return name_; }
    const DeclaredClass& declared() const { return declared_; }
    std::unique_ptr<Process> start() const { return std::make_unique<Process>(body_); }

private:
    std::string name_;
    Body body_;
    DeclaredClass declared_;
};

enum class RunStatus {
    complete,     // n bits produced
    halted,       // body returned early
    step_budget,  // the divergence stand-in
    horizon,      // queried past the oracle's horizon
    failed,       // MachineError or other exception
};
std::string to_string(RunStatus s);

struct ReductionTrace {
    std::vector<std::uint64_t> usage;            // usage[k], k = 0..produced; usage[0] = 0
    std::vector<std::uint64_t> per_bit_queries;  // queries made while computing bit k
    RunStatus status = RunStatus::complete;
    std::uint64_t steps = 0;
    std::string detail;
    std::uint64_t produced() const { return per_bit_queries.size(); }
};

struct RunResult {
    BitSequence output;
    ReductionTrace trace;
};

RunResult run(const OracleMachine& M, const PrefixOracle& R, std::uint64_t n,
              std::uint64_t step_budget = 1'000'000'000);

// "n,usage,per_bit_queries" for n = 1..produced.
void write_trace_csv(std::ostream& out, const ReductionTrace& t);

}  // namespace cdl::red
