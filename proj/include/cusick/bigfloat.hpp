#pragma once

// Directed-rounding binary floating point on top of MPFR.
//
// Every value is an exact dyadic rational, so results can be exported as
// "m/2^k" or "m*2^e" and re-checked exactly elsewhere.

#include <compare>
#include <iterator>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmp.h>
#include <mpfr.h>

#include "cusick/dyadic.hpp"

namespace cusick {

enum class Dir { down, up };

namespace detail {

constexpr mpfr_rnd_t rnd(Dir d) noexcept { return d == Dir::up ? MPFR_RNDU : MPFR_RNDD; }

constexpr Dir flip(Dir d) noexcept { return d == Dir::up ? Dir::down : Dir::up; }

/// RAII holder for an mpz_t.
struct Mpz {
    mpz_t v;
    Mpz() { mpz_init(v); }
    explicit Mpz(const BigInt& x) {
        mpz_init(v);
        std::vector<unsigned char> bytes;
        const BigInt mag = boost::multiprecision::abs(x);
        boost::multiprecision::export_bits(mag, std::back_inserter(bytes), 8);
        mpz_import(v, bytes.size(), 1, 1, 1, 0, bytes.data());
        if (x.sign() < 0) mpz_neg(v, v);
    }
    Mpz(const Mpz&) = delete;
    Mpz& operator=(const Mpz&) = delete;
    ~Mpz() { mpz_clear(v); }

    BigInt to_bigint() const {
        const std::size_t n = (mpz_sizeinbase(v, 2) + 7) / 8;
        std::vector<unsigned char> bytes(n);
        std::size_t written = 0;
        mpz_export(bytes.data(), &written, 1, 1, 1, 0, v);
        BigInt r;
        boost::multiprecision::import_bits(r, bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(written), 8);
        return mpz_sgn(v) < 0 ? BigInt(-r) : r;
    }
};

}  // namespace detail

/// An MPFR number with value semantics. Arithmetic takes an explicit rounding direction.
class BigFloat {
public:
    static constexpr mpfr_prec_t kPrecision = 128;

    BigFloat() {
        mpfr_init2(v_, kPrecision);
        mpfr_set_zero(v_, 1);
    }
    BigFloat(long value) : BigFloat() { mpfr_set_si(v_, value, MPFR_RNDN); }  // exact at this precision
    BigFloat(const BigFloat& o) : BigFloat() { mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept : BigFloat() { mpfr_swap(v_, o.v_); }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    /// The exact binary value of a double.
    static BigFloat from_double(double x) {
        BigFloat r;
        mpfr_set_d(r.v_, x, MPFR_RNDN);
        return r;
    }

    static BigFloat from_rational(const Rational& q, Dir d) {
        detail::Mpz num(boost::multiprecision::numerator(q));
        detail::Mpz den(boost::multiprecision::denominator(q));
        BigFloat r;
        // hold the numerator exactly so the division is the only rounding
        mpfr_t n;
        mpfr_init2(n, static_cast<mpfr_prec_t>(mpz_sizeinbase(num.v, 2) + 2));
        mpfr_set_z(n, num.v, MPFR_RNDN);
        mpfr_div_z(r.v_, n, den.v, detail::rnd(d));
        mpfr_clear(n);
        return r;
    }

    static BigFloat from_bigint(const BigInt& x, Dir d) {
        detail::Mpz z(x);
        BigFloat r;
        mpfr_set_z(r.v_, z.v, detail::rnd(d));
        return r;
    }

    /// m * 2^e, rounded.
    static BigFloat from_mantissa_exp(const BigInt& m, std::int64_t e, Dir d) {
        BigFloat r = from_bigint(m, d);
        mpfr_mul_2si(r.v_, r.v_, static_cast<long>(e), MPFR_RNDN);
        return r;
    }

    static BigFloat pi(Dir d) {
        BigFloat r;
        mpfr_const_pi(r.v_, detail::rnd(d));
        return r;
    }

    static BigFloat factorial(unsigned long n, Dir d) {
        BigFloat r;
        mpfr_fac_ui(r.v_, n, detail::rnd(d));
        return r;
    }

    static BigFloat add(const BigFloat& a, const BigFloat& b, Dir d) { return op(mpfr_add, a, b, d); }
    static BigFloat sub(const BigFloat& a, const BigFloat& b, Dir d) { return op(mpfr_sub, a, b, d); }
    static BigFloat mul(const BigFloat& a, const BigFloat& b, Dir d) { return op(mpfr_mul, a, b, d); }
    static BigFloat div(const BigFloat& a, const BigFloat& b, Dir d) { return op(mpfr_div, a, b, d); }

    static BigFloat sqrt(const BigFloat& a, Dir d) {
        BigFloat r;
        mpfr_sqrt(r.v_, a.v_, detail::rnd(d));
        return r;
    }

    static BigFloat exp(const BigFloat& a, Dir d) {
        BigFloat r;
        mpfr_exp(r.v_, a.v_, detail::rnd(d));
        return r;
    }

    static BigFloat log(const BigFloat& a, Dir d) {
        BigFloat r;
        mpfr_log(r.v_, a.v_, detail::rnd(d));
        return r;
    }

    static BigFloat pow(const BigFloat& a, unsigned long n, Dir d) {
        BigFloat r;
        mpfr_pow_ui(r.v_, a.v_, n, detail::rnd(d));
        return r;
    }

    static BigFloat ceil(const BigFloat& a) {
        BigFloat r;
        mpfr_ceil(r.v_, a.v_);  // exact: the result always fits in the working precision
        return r;
    }

    static const BigFloat& max(const BigFloat& a, const BigFloat& b) { return a < b ? b : a; }

    /// Multiplies by 2^e (exact).
    BigFloat scaled2(long e) const {
        BigFloat r = *this;
        mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
        return r;
    }

    bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
    int sign() const noexcept { return mpfr_sgn(v_); }
    bool is_integer() const noexcept { return mpfr_integer_p(v_) != 0; }

    /// Binary exponent e with 2^(e-1) <= |x| < 2^e.
    long exponent2() const {
        if (!is_finite() || is_zero()) throw std::domain_error("BigFloat::exponent2: zero or non-finite");
        return mpfr_get_exp(v_);
    }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    /// (m, e) with value m * 2^e and m odd (or (0, 0)).
    std::pair<BigInt, std::int64_t> mantissa_exp() const {
        if (!is_finite()) throw std::domain_error("BigFloat: non-finite value");
        if (is_zero()) return {BigInt(0), 0};
        detail::Mpz z;
        std::int64_t e = mpfr_get_z_2exp(z.v, v_);
        const auto tz = mpz_scan1(z.v, 0);
        mpz_tdiv_q_2exp(z.v, z.v, tz);
        return {z.to_bigint(), e + static_cast<std::int64_t>(tz)};
    }

    /// The exact value; only sensible when the exponent is moderate.
    Rational to_rational() const {
        auto [m, e] = mantissa_exp();
        if (e >= 0) return Rational(BigInt(m << static_cast<unsigned>(e)));
        return Rational(m, BigInt(BigInt(1) << static_cast<unsigned>(-e)));
    }

    Dyadic to_dyadic() const {
        auto [m, e] = mantissa_exp();
        return Dyadic(std::move(m), 0).scaled2(e);
    }

    /// "m/2^k" for non-integers, "m*2^e" otherwise.
    std::string to_string() const {
        auto [m, e] = mantissa_exp();
        if (e < 0) return m.str() + "/2^" + std::to_string(-e);
        return m.str() + "*2^" + std::to_string(e);
    }

    /// Inverse of to_string(); also accepts a plain integer.
    static BigFloat parse(std::string_view text) {
        auto fail = [&] { return std::invalid_argument("malformed binary number: " + std::string(text)); };
        std::size_t pos = text.find("/2^");
        int sgn = -1;
        if (pos == std::string_view::npos) {
            pos = text.find("*2^");
            sgn = 1;
        }
        try {
            if (pos == std::string_view::npos) {
                const auto d = Dyadic::parse(text);
                return from_bigint(d.num(), Dir::down);
            }
            const auto m = Dyadic::parse(text.substr(0, pos));
            const std::string es(text.substr(pos + 3));
            std::size_t used = 0;
            const long long e = std::stoll(es, &used);
            if (used != es.size() || e < 0 || m.exp() != 0) throw fail();
            if (!m.is_zero() && boost::multiprecision::msb(boost::multiprecision::abs(m.num())) >= kPrecision) throw fail();
            return from_bigint(m.num(), Dir::down).scaled2(static_cast<long>(sgn * e));
        } catch (const std::invalid_argument&) {
            throw fail();
        } catch (const std::out_of_range&) {
            throw fail();
        }
    }

    friend bool operator==(const BigFloat& a, const BigFloat& b) noexcept { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) noexcept {
        if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
        const int c = mpfr_cmp(a.v_, b.v_);
        return c < 0 ? std::partial_ordering::less : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
    }

    /// Exact comparison with a rational.
    int compare(const Rational& q) const {
        // q = n / d with d > 0: compare x d with n exactly
        auto [m, e] = mantissa_exp();
        BigInt lhs = m * boost::multiprecision::denominator(q);
        BigInt rhs = boost::multiprecision::numerator(q);
        if (e >= 0) lhs <<= static_cast<unsigned>(e);
        else rhs <<= static_cast<unsigned>(-e);
        return lhs.compare(rhs);
    }

    const mpfr_t& raw() const noexcept { return v_; }

private:
    using Op = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
    static BigFloat op(Op f, const BigFloat& a, const BigFloat& b, Dir d) {
        BigFloat r;
        f(r.v_, a.v_, b.v_, detail::rnd(d));
        return r;
    }

    mpfr_t v_;
};

}  // namespace cusick
