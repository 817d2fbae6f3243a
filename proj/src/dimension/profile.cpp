#include "cdlab/dimension/profile.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace cdl::dim {

std::vector<std::uint64_t> geometric_grid(std::uint64_t n0, double r, std::uint64_t N) {
    if (n0 == 0 || !(r > 1.0)) throw std::invalid_argument("grid needs n0 >= 1 and ratio > 1");
    std::vector<std::uint64_t> out;
    for (int j = 0;; ++j) {
        const double v = std::ceil(static_cast<double>(n0) * std::pow(r, j) - 1e-9);
        if (v > static_cast<double>(N)) break;
        const auto n = static_cast<std::uint64_t>(v);
        if (out.empty() || n > out.back()) out.push_back(n);
    }
    if (N > 0 && (out.empty() || out.back() != N)) out.push_back(N);
    return out;
}

std::uint64_t default_tail_start(std::uint64_t N) {
    const auto root = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(N))));
    return std::max<std::uint64_t>(256, root);
}

std::uint64_t ratio_tail_start(std::uint64_t N) { return std::max(default_tail_start(N), (N + 7) / 8); }

namespace {

void normalize(std::vector<std::uint64_t>& points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (!points.empty() && points.front() == 0) points.erase(points.begin());
}

template <class Pick>
Rational tail_extreme(const Profile& p, Pick pick) {
    std::optional<Rational> best;
    for (const auto& s : p.samples) {
        if (s.n < p.tail_start) continue;
        const Rational r = s.ratio();
        if (!best || pick(r, *best)) best = r;
    }
    if (!best) throw std::invalid_argument("profile has no samples at or beyond tail_start");
    return *best;
}

}  // namespace

DimensionProfile profile(const PrefixOracle& S, std::vector<std::uint64_t> points, const ComplexityOracle& oracle,
                         std::uint64_t tail_start, Kernel kernel) {
    normalize(points);
    DimensionProfile out;
    out.tail_start = tail_start;
    if (points.empty()) return out;
    const BitSequence prefix = S.take(points.back());
    const BitView s = prefix.view();
    if (kernel == Kernel::automatic) {
        kernel = oracle.settings().kind == OracleKind::exact ? Kernel::parallel : Kernel::streaming;
    }
    std::vector<Estimate> est(points.size());
    switch (kernel) {
        case Kernel::streaming:
            est = oracle.prefix_complexities(s, points);
            break;
        case Kernel::serial:
            for (std::size_t k = 0; k < points.size(); ++k) est[k] = oracle.complexity(s.first(points[k]));
            break;
        case Kernel::parallel:
        case Kernel::automatic: {
            const auto count = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
            for (std::int64_t k = 0; k < count; ++k) {
                est[static_cast<std::size_t>(k)] = oracle.complexity(s.first(points[static_cast<std::size_t>(k)]));
            }
            break;
        }
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        out.samples.push_back({points[k], est[k].bits});
        if (est[k].status == EstimateStatus::length_capped || est[k].status == EstimateStatus::budget_exhausted) {
            out.confirmed = false;
        }
    }
    return out;
}

RatioProfile ratio_profile(std::span<const std::uint64_t> usage, std::vector<std::uint64_t> points,
                           std::uint64_t tail_start) {
    normalize(points);
    RatioProfile out;
    out.tail_start = tail_start;
    for (auto n : points) {
        if (n >= usage.size()) throw std::out_of_range("ratio profile point beyond the trace");
        out.samples.push_back({n, usage[n]});
    }
    return out;
}

Rational dim_hat_H(const Profile& p) {
    return tail_extreme(p, [](const Rational& a, const Rational& b) { return a < b; });
}

Rational dim_hat_P(const Profile& p) {
    return tail_extreme(p, [](const Rational& a, const Rational& b) { return a > b; });
}

std::pair<Rational, Rational> rho_hats(const RatioProfile& p) { return {dim_hat_H(p), dim_hat_P(p)}; }

void write_csv(std::ostream& out, const Profile& p, const char* value_name) {
    out << "n," << value_name << ",ratio,ratio_fraction\n";
    for (const auto& s : p.samples) {
        const Rational r = s.ratio();
        out << s.n << ',' << s.value << ',' << r.to_decimal(6) << ',' << r.to_fraction() << '\n';
    }
}

}  // namespace cdl::dim
