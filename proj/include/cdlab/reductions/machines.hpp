#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdlab/complexity/oracle.hpp"
#include "cdlab/reductions/machine.hpp"

namespace cdl::red {

// bit k = R[k]
OracleMachine identity();
// bit k = 1 - R[k]
OracleMachine complement();
// bit k = R[a k + b]; position_map(2, 1) reads 1, 3, 5, ... so usage(n) = 2n.
OracleMachine position_map(std::uint64_t a, std::uint64_t b);
// bit k = R[2k] xor R[2k+1]
OracleMachine xor_pair();
// Reads R[0] once and repeats it.
OracleMachine first_bit();
// Block-codec decoder: reads records r_1 r_2 ... strictly left to right.
// Declared wtt with q(n) = n + ceil(4 sqrt(n) log2(n+2)).
OracleMachine codec_decode(const ComplexityOracle& oracle);
// `inner` with `ticks` extra steps before every emitted bit.
OracleMachine slow(const OracleMachine& inner, std::uint64_t ticks);
// Ticks forever.
OracleMachine diverge();

std::uint64_t codec_wtt_bound(std::uint64_t n);

// Names accepted by make_machine: identity, complement, double (position
// map 2k+1), xor-pair, first-bit, codec-decode, diverge, slow:<ticks>:<name>,
// guard:<alpha'>:<name>. Throws std::invalid_argument for unknown names.
OracleMachine make_machine(const std::string& name, const ComplexityOracle& oracle);
std::vector<std::string> builtin_machine_names();

}  // namespace cdl::red
