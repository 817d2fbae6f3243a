#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace cdl {

// Exact non-negative-denominator rational. Profiles, ratios and extractor
// parameters are stored this way so CSV/JSON output is bit-reproducible.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // "a/b", "0.125", "3" and "-1/4" are accepted. Throws std::invalid_argument.
    static Rational parse(std::string_view text);
    // Closest rational with denominator <= max_den (Stern-Brocot walk).
    static Rational approximate(double value, std::int64_t max_den = 1'000'000);

    std::string to_fraction() const;       // "3/8"
    std::string to_decimal(int places = 6) const;  // "0.375000", round half up

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace cdl
