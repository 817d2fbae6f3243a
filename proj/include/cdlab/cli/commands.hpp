#pragma once

#include <ostream>

namespace cdl::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;  // exhaustion, precondition failure, malformed input data
inline constexpr int kUsageError = 2;   // bad flags or config

// Subcommands: gen, profile, encode, decode, extract, compose-demo,
// guard-demo, experiment. Run with --help for flags.
int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cdl::cli
