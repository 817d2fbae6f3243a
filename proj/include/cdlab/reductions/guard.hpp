#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cdlab/complexity/oracle.hpp"
#include "cdlab/reductions/machine.hpp"
#include "cdlab/rational.hpp"

namespace cdl::red {

// Interleaving of the race for one output bit k. A machine step is one
// action of M; a search step is one complete bounded probe: the shortest
// program search for S[0..m-1] under the length cap floor(alpha' m), for the
// next m in k+1, k+2, ..., k+window.
struct GuardSchedule {
    std::uint64_t machine_steps = 1;
    std::uint64_t search_steps = 1;
    std::uint64_t window = 256;             // probes per bit before the search side gives up
    std::uint64_t machine_budget = 1'000'000;  // M actions per bit before the machine side gives up
};

struct GuardEntry {
    enum class Winner { machine, search, none };
    std::uint64_t bit = 0;   // output index k
    Winner winner = Winner::none;
    std::uint64_t m = 0;     // prefix length of the successful probe, or the last probed
    std::uint64_t probes = 0;
    std::uint64_t machine_steps = 0;
    std::uint64_t program_length = 0;  // when the search won
};

std::string to_string(GuardEntry::Winner w);

// Shared, append-only log of a guarded run (one entry per output bit).
struct GuardLog {
    std::vector<GuardEntry> entries;
};

// N: for each output bit k, races M against probes for m = k+1, k+2, ...;
// outputs 0 when a probe finds a program of length <= floor(alpha' m) first,
// else M's bit k. When both sides give up on a bit the run fails with a
// non-totality report. Exact-search work per probe comes from
// oracle.settings().budget.
OracleMachine guard(const OracleMachine& M, const Rational& alpha_prime, const ComplexityOracle& oracle,
                    GuardSchedule schedule = {}, std::shared_ptr<GuardLog> log = nullptr);

}  // namespace cdl::red
