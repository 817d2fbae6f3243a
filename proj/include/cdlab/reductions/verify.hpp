#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdlab/reductions/machine.hpp"

namespace cdl::red {

struct Violation {
    std::uint64_t n = 0;      // output length (wtt) or 1-based bit index (bT)
    std::uint64_t value = 0;  // usage(n) or per-bit query count
    std::uint64_t bound = 0;
};

struct ClassReport {
    std::string label;
    bool pass = true;
    std::uint64_t checked = 0;  // positions examined
    std::vector<Violation> violations;  // first 64
    std::uint64_t violation_count = 0;
    std::string detail;
};

// wtt: usage(n) <= q(n) for every n in the trace; bT: per-bit queries <= c;
// tt: the run completed within its budgets (totality on this oracle only);
// turing: nothing to check.
ClassReport verify_class(const ReductionTrace& trace, const DeclaredClass& cls);

}  // namespace cdl::red
