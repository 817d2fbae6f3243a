#include "cdlab/rational.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cdl {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
    return static_cast<std::int64_t>(v);
}

Rational make_reduced(i128 num, i128 den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 a = num < 0 ? -num : num;
    i128 b = den;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    num_ = num;
    den_ = den;
}

Rational Rational::parse(std::string_view text) {
    auto bad = [&] { return std::invalid_argument("not a rational: '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();
    bool neg = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
        neg = text[0] == '-';
        pos = 1;
    }
    auto digits = [&](std::size_t from, std::size_t to, i128& out) {
        if (from >= to) throw bad();
        out = 0;
        for (std::size_t k = from; k < to; ++k) {
            char c = text[k];
            if (c < '0' || c > '9') throw bad();
            out = out * 10 + (c - '0');
            if (out > INT64_MAX) throw bad();
        }
    };
    std::size_t slash = text.find('/');
    std::size_t dot = text.find('.');
    i128 num = 0;
    i128 den = 1;
    if (slash != std::string_view::npos) {
        digits(pos, slash, num);
        digits(slash + 1, text.size(), den);
        if (den == 0) throw bad();
    } else if (dot != std::string_view::npos) {
        i128 whole = 0;
        if (dot > pos) digits(pos, dot, whole);
        i128 frac = 0;
        std::size_t places = text.size() - dot - 1;
        if (places == 0 && dot == pos) throw bad();
        if (places > 0) digits(dot + 1, text.size(), frac);
        if (places > 18) throw bad();
        for (std::size_t k = 0; k < places; ++k) den *= 10;
        num = whole * den + frac;
    } else {
        digits(pos, text.size(), num);
    }
    return make_reduced(neg ? -num : num, den);
}

Rational Rational::approximate(double value, std::int64_t max_den) {
    if (!std::isfinite(value)) throw std::invalid_argument("cannot approximate non-finite value");
    bool neg = value < 0;
    double x = std::fabs(value);
    // Best rational approximation from the continued-fraction convergents.
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        double a_d = std::floor(r);
        if (a_d > 1e15) break;
        auto a = static_cast<std::int64_t>(a_d);
        std::int64_t p2 = a * p1 + p0;
        std::int64_t q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double frac = r - a_d;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    if (q1 == 0) return Rational(neg ? -p0 : p0, q0 == 0 ? 1 : q0);
    return Rational(neg ? -p1 : p1, q1);
}

std::string Rational::to_fraction() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::to_decimal(int places) const {
    i128 scale = 1;
    for (int k = 0; k < places; ++k) scale *= 10;
    bool neg = num_ < 0;
    i128 a = neg ? -static_cast<i128>(num_) : static_cast<i128>(num_);
    i128 scaled = (a * scale * 2 + den_) / (static_cast<i128>(den_) * 2);
    i128 whole = scaled / scale;
    i128 frac = scaled % scale;
    std::string frac_str = std::to_string(static_cast<long long>(frac));
    while (static_cast<int>(frac_str.size()) < places) frac_str.insert(frac_str.begin(), '0');
    std::string out = (neg && scaled != 0 ? "-" : "") + std::to_string(static_cast<long long>(whole));
    if (places > 0) out += "." + frac_str;
    return out;
}

Rational Rational::operator+(const Rational& o) const {
    return make_reduced(static_cast<i128>(num_) * o.den_ + static_cast<i128>(o.num_) * den_,
                        static_cast<i128>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return make_reduced(static_cast<i128>(num_) * o.den_ - static_cast<i128>(o.num_) * den_,
                        static_cast<i128>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return make_reduced(static_cast<i128>(num_) * o.num_, static_cast<i128>(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return make_reduced(static_cast<i128>(num_) * o.den_, static_cast<i128>(den_) * o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    i128 lhs = static_cast<i128>(a.num_) * b.den_;
    i128 rhs = static_cast<i128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace cdl
