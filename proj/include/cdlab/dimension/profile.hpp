#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "cdlab/complexity/oracle.hpp"
#include "cdlab/rational.hpp"
#include "cdlab/seqcore/bit_sequence.hpp"

namespace cdl::dim {

// One sampled quotient value/n: C(S[0..n-1])/n for dimension profiles,
// usage(n)/n for ratio profiles.
struct Sample {
    std::uint64_t n = 0;
    std::uint64_t value = 0;
    Rational ratio() const { return Rational(static_cast<std::int64_t>(value), static_cast<std::int64_t>(n)); }
    friend bool operator==(const Sample&, const Sample&) = default;
};

struct Profile {
    std::vector<Sample> samples;  // strictly increasing n
    std::uint64_t tail_start = 0;
    // False when some exact-mode sample is only an upper bound.
    bool confirmed = true;
    friend bool operator==(const Profile&, const Profile&) = default;
};

using DimensionProfile = Profile;
using RatioProfile = Profile;

// ceil(n0 * r^j) for j = 0, 1, ... while <= N, deduplicated, with N appended.
std::vector<std::uint64_t> geometric_grid(std::uint64_t n0, double r, std::uint64_t N);
inline constexpr std::uint64_t kDefaultGridStart = 1024;
inline constexpr double kDefaultGridRatio = 1.3;

// max(256, ceil(sqrt N)).
std::uint64_t default_tail_start(std::uint64_t N);
// Tail for codec usage ratios: max(default_tail_start(N), ceil(N/8)). Record
// headers cost O(log i) per block, a relative overhead that decays only like
// log(n)/sqrt(n), so the head of a usage profile is excluded more aggressively.
std::uint64_t ratio_tail_start(std::uint64_t N);

enum class Kernel {
    automatic,  // streaming for proxy oracles, parallel otherwise
    serial,     // every sample from scratch, one after another (reference)
    parallel,   // every sample from scratch, samples spread over OpenMP threads
    streaming,  // one left-to-right pass (proxy oracles)
};

// Samples C(S[0..n-1])/n at each point. Points are sorted and deduplicated;
// they must lie within S's horizon (HorizonError otherwise).
DimensionProfile profile(const PrefixOracle& S, std::vector<std::uint64_t> points, const ComplexityOracle& oracle,
                         std::uint64_t tail_start, Kernel kernel = Kernel::automatic);

// usage[n] = usage after n output bits (usage[0] = 0). Samples at `points`.
RatioProfile ratio_profile(std::span<const std::uint64_t> usage, std::vector<std::uint64_t> points,
                           std::uint64_t tail_start);

// Tail min / max of the sampled quotient (the finite liminf / limsup).
// Throws std::invalid_argument when no sample has n >= tail_start.
Rational dim_hat_H(const Profile& p);
Rational dim_hat_P(const Profile& p);
std::pair<Rational, Rational> rho_hats(const RatioProfile& p);

// Header "n,<value_name>,ratio,ratio_fraction"; ratio as a 6-place decimal.
void write_csv(std::ostream& out, const Profile& p, const char* value_name = "c");

}  // namespace cdl::dim
