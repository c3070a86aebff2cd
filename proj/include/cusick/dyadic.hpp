#pragma once

// Exact dyadic rationals num / 2^exp.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace cusick {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A rational number whose denominator is a power of two.
///
/// Stored as `num / 2^exp` with `num` odd, or `num == 0 && exp == 0`.
/// The denominator is only ever kept as its exponent.
class Dyadic {
public:
    Dyadic() = default;

    explicit Dyadic(long long value) : num_(value) { normalize(); }

    Dyadic(BigInt num, std::uint64_t exp) : num_(std::move(num)), exp_(exp) { normalize(); }

    /// 2^e for any integer e.
    static Dyadic pow2(std::int64_t e) {
        if (e >= 0) {
            BigInt n = 1;
            n <<= static_cast<unsigned>(e);
            return Dyadic(std::move(n), 0);
        }
        return Dyadic(BigInt(1), static_cast<std::uint64_t>(-e));
    }

    const BigInt& num() const noexcept { return num_; }
    std::uint64_t exp() const noexcept { return exp_; }

    bool is_zero() const noexcept { return num_.is_zero(); }
    int sign() const noexcept { return num_.sign(); }

    Dyadic operator-() const {
        Dyadic r = *this;
        r.num_ = -r.num_;
        return r;
    }

    Dyadic& operator+=(const Dyadic& o) {
        if (o.is_zero()) return *this;
        if (is_zero()) return *this = o;
        if (exp_ >= o.exp_) {
            num_ += o.num_ << static_cast<unsigned>(exp_ - o.exp_);
        } else {
            num_ <<= static_cast<unsigned>(o.exp_ - exp_);
            num_ += o.num_;
            exp_ = o.exp_;
        }
        normalize();
        return *this;
    }

    Dyadic& operator-=(const Dyadic& o) { return *this += -o; }

    Dyadic& operator*=(const Dyadic& o) {
        num_ *= o.num_;
        exp_ += o.exp_;
        // a product of odd numerators stays odd, only integers can need a shift
        normalize();
        return *this;
    }

    /// Multiplies by 2^s (s may be negative).
    Dyadic& scale2(std::int64_t s) {
        if (is_zero()) return *this;
        if (s < 0) {
            exp_ += static_cast<std::uint64_t>(-s);
        } else if (static_cast<std::uint64_t>(s) <= exp_) {
            exp_ -= static_cast<std::uint64_t>(s);
        } else {
            num_ <<= static_cast<unsigned>(static_cast<std::uint64_t>(s) - exp_);
            exp_ = 0;
        }
        normalize();
        return *this;
    }

    Dyadic scaled2(std::int64_t s) const {
        Dyadic r = *this;
        r.scale2(s);
        return r;
    }

    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
    friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
    friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }

    friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept {
        return a.exp_ == b.exp_ && a.num_ == b.num_;
    }

    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
        if (a.exp_ == b.exp_) return cmp(a.num_, b.num_);
        if (a.sign() != b.sign()) return a.sign() <=> b.sign();
        if (a.exp_ > b.exp_) return cmp(a.num_, b.num_ << static_cast<unsigned>(a.exp_ - b.exp_));
        return cmp(a.num_ << static_cast<unsigned>(b.exp_ - a.exp_), b.num_);
    }

    Rational to_rational() const {
        BigInt den = 1;
        den <<= static_cast<unsigned>(exp_);
        return Rational(num_, den);
    }

    double to_double() const {
        if (is_zero()) return 0.0;
        BigInt n = num_;
        std::int64_t e = -static_cast<std::int64_t>(exp_);
        const auto bits = boost::multiprecision::msb(boost::multiprecision::abs(n));
        if (bits > 60) {
            n >>= static_cast<unsigned>(bits - 60);
            e += static_cast<std::int64_t>(bits - 60);
        }
        return std::ldexp(n.convert_to<double>(), static_cast<int>(e));
    }

    /// Canonical form "num/2^exp".
    std::string to_string() const { return num_.str() + "/2^" + std::to_string(exp_); }

    /// Parses "num/2^exp" or a plain integer.
    static Dyadic parse(std::string_view text) {
        const auto slash = text.find("/2^");
        try {
            if (slash == std::string_view::npos) {
                check_integer(text, true);
                return Dyadic(BigInt(std::string(text)), 0);
            }
            const auto num = text.substr(0, slash);
            const auto exp = text.substr(slash + 3);
            check_integer(num, true);
            check_integer(exp, false);
            return Dyadic(BigInt(std::string(num)), std::stoull(std::string(exp)));
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed dyadic: " + std::string(text));
        }
    }

    /// Decimal rendering with `digits` fractional digits, rounded half away from zero.
    std::string to_decimal(unsigned digits) const {
        if (digits == 0) throw std::invalid_argument("to_decimal: digits must be >= 1");
        BigInt scale = boost::multiprecision::pow(BigInt(10), digits);
        BigInt mag = boost::multiprecision::abs(num_) * scale;
        BigInt q = mag >> static_cast<unsigned>(exp_);
        BigInt rem = mag - (q << static_cast<unsigned>(exp_));
        if (exp_ > 0 && (rem << 1) >= (BigInt(1) << static_cast<unsigned>(exp_))) ++q;
        BigInt whole = q / scale;
        std::string frac = BigInt(q % scale).str();
        frac.insert(0, digits - frac.size(), '0');
        std::string out = (num_.sign() < 0 && !q.is_zero()) ? "-" : "";
        return out + whole.str() + "." + frac;
    }

    /// The terminating decimal expansion, without trailing zeros.
    std::string to_exact_decimal() const {
        if (exp_ == 0) return num_.str();
        BigInt mag = boost::multiprecision::abs(num_) * boost::multiprecision::pow(BigInt(5), static_cast<unsigned>(exp_));
        std::string digits = mag.str();
        if (digits.size() <= exp_) digits.insert(0, exp_ - digits.size() + 1, '0');
        digits.insert(digits.size() - exp_, ".");
        return (num_.sign() < 0 ? "-" : "") + digits;
    }

private:
    static std::strong_ordering cmp(const BigInt& a, const BigInt& b) {
        const int c = a.compare(b);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

    static void check_integer(std::string_view s, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i == s.size()) throw std::invalid_argument("malformed dyadic");
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("malformed dyadic");
        }
    }

    void normalize() {
        if (num_.is_zero()) {
            exp_ = 0;
            return;
        }
        if (exp_ == 0) return;
        const auto tz = boost::multiprecision::lsb(boost::multiprecision::abs(num_));
        const auto s = std::min<std::uint64_t>(tz, exp_);
        if (s > 0) {
            num_ >>= static_cast<unsigned>(s);
            exp_ -= s;
        }
    }

    BigInt num_{0};
    std::uint64_t exp_ = 0;
};

/// Exact rational rendering "p/q" (or "p" for integers).
inline std::string to_string(const Rational& q) {
    const auto& den = boost::multiprecision::denominator(q);
    if (den == 1) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

}  // namespace cusick
