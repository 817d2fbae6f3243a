#pragma once

#include <cstdint>
#include <vector>

#include "cdlab/complexity/oracle.hpp"
#include "cdlab/dimension/profile.hpp"
#include "cdlab/reductions/machine.hpp"

namespace cdl::red {

// The composite computes S'' from S: M2 runs on S', and each S' bit it asks
// for is produced by running M1 on S just far enough (outputs are cached).
// Hence usage_composite(n) = usage_M1(usage'_M2(n)) exactly, where usage'
// counts the S' positions M2 reads. Failures name the layer.
OracleMachine compose(const OracleMachine& M1, const OracleMachine& M2);

// Checks the composition law on S by a second accounting path: M2 is run on
// an S' produced on demand by its own M1 process, then M1 is run alone, and
// predicted[n] = usage_M1(usage'_M2(n)) is compared with the composite trace.
struct CompositionCheck {
    RunResult composite;
    RunResult m2;  // on S'
    RunResult m1;  // on S, as far as M2 needed
    std::vector<std::uint64_t> predicted;
    bool law_holds = false;
    std::uint64_t first_mismatch = 0;  // meaningful when !law_holds
};
CompositionCheck check_composition(const OracleMachine& M1, const OracleMachine& M2, const PrefixOracle& S,
                                   std::uint64_t n, std::uint64_t step_budget = 1'000'000'000);

// Double encoding: X is encoded to R1, R1 (cut to whole blocks) to R2, and
// compose(codec-decode, codec-decode) recovers X from R2.
struct DoubleEncode {
    BitSequence X, R1, R2;
    std::uint64_t n = 0;  // X bits recovered
    CompositionCheck check;
    dim::RatioProfile composite, outer, inner;  // usage/n of R2->X, R1->X, R2->R1
    Rational rho_composite, rho_outer, rho_inner;   // tail maxima
    bool output_ok = false;
};
DoubleEncode double_encode(const PrefixOracle& X, std::uint64_t N, const ComplexityOracle& oracle);

}  // namespace cdl::red
