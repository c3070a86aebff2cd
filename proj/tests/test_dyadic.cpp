#include <random>

#include <gtest/gtest.h>

#include "cusick/dyadic.hpp"

using cusick::BigInt;
using cusick::Dyadic;
using cusick::Rational;

namespace {

Dyadic d(const char* s) { return Dyadic::parse(s); }

Dyadic random_dyadic(std::mt19937_64& rng) {
    std::uniform_int_distribution<long long> num(-1000000, 1000000);
    std::uniform_int_distribution<unsigned> exp(0, 70);
    return Dyadic(BigInt(num(rng)), exp(rng));
}

}  // namespace

TEST(Dyadic, AdditionExamples) {
    EXPECT_EQ(d("1/2^1") + d("1/2^2"), d("3/2^2"));
    EXPECT_EQ(d("3/2^2") * d("1/2^0"), d("3/2^2"));
    const Dyadic sum = d("1/2^2") + d("1/2^2");
    EXPECT_EQ(sum.to_string(), "1/2^1");
    EXPECT_EQ(sum.num(), 1);
    EXPECT_EQ(sum.exp(), 1u);
}

TEST(Dyadic, Comparison) {
    EXPECT_LT(d("1/2^1"), d("3/2^2"));
    EXPECT_EQ(Dyadic(0) <=> Dyadic(0), std::strong_ordering::equal);
    EXPECT_GT(d("18169025645289/2^45"), d("1/2^1"));
    EXPECT_LT(d("-1/2^3"), Dyadic(0));
    EXPECT_GT(Dyadic(3), d("5/2^1"));
}

TEST(Dyadic, DecimalRendering) {
    EXPECT_EQ(d("3/2^2").to_decimal(4), "0.7500");
    EXPECT_EQ(Dyadic(0).to_decimal(3), "0.000");
    // 0.51639476752... rounds to 0.516395; the truncated digits are 0.516394
    EXPECT_EQ(d("18169025645289/2^45").to_decimal(6), "0.516395");
    EXPECT_EQ(d("18169025645289/2^45").to_decimal(12).substr(0, 8), "0.516394");
    EXPECT_EQ(d("-3/2^2").to_decimal(1), "-0.8");
    EXPECT_EQ(d("3/2^2").to_exact_decimal(), "0.75");
    EXPECT_EQ(d("-1/2^3").to_exact_decimal(), "-0.125");
    EXPECT_EQ(Dyadic(7).to_exact_decimal(), "7");
    EXPECT_THROW((void)d("1/2^1").to_decimal(0), std::invalid_argument);
}

TEST(Dyadic, Normalization) {
    const Dyadic x(BigInt(12), 5);  // 12/32 = 3/8
    EXPECT_EQ(x.num(), 3);
    EXPECT_EQ(x.exp(), 3u);
    const Dyadic z(BigInt(0), 40);
    EXPECT_EQ(z.exp(), 0u);
    EXPECT_EQ(Dyadic(BigInt(x.num()), x.exp()), x);  // idempotent
    EXPECT_EQ(Dyadic(BigInt(8), 0).exp(), 0u);       // integers keep exp 0
}

TEST(Dyadic, ParseRoundTrip) {
    for (const char* s : {"0/2^0", "1/2^0", "-5/2^3", "18169025645289/2^45", "123456789012345678901234567890/2^0"}) {
        EXPECT_EQ(d(s).to_string(), s);
    }
    EXPECT_EQ(d("6/2^2").to_string(), "3/2^1");
    EXPECT_EQ(d("17").to_string(), "17/2^0");
    for (const char* bad : {"", "x", "1/2^", "1/2^-1", "1/3", "1.5", "/2^3"}) {
        EXPECT_THROW((void)d(bad), std::invalid_argument) << bad;
    }
}

TEST(Dyadic, PowersOfTwo) {
    EXPECT_EQ(Dyadic::pow2(-3), d("1/2^3"));
    EXPECT_EQ(Dyadic::pow2(4), Dyadic(16));
    EXPECT_EQ(d("3/2^2").scaled2(2), Dyadic(3));
    EXPECT_EQ(Dyadic(3).scaled2(-70), Dyadic(BigInt(3), 70));
}

TEST(Dyadic, RingLawsOnRandomOperands) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const Dyadic a = random_dyadic(rng), b = random_dyadic(rng), c = random_dyadic(rng);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a + (-a), Dyadic(0));
        EXPECT_EQ(a - b, a + (-b));
        EXPECT_EQ(a * Dyadic(1), a);
        // agreement with rational arithmetic
        EXPECT_EQ((a + b).to_rational(), a.to_rational() + b.to_rational());
        EXPECT_EQ((a * b).to_rational(), a.to_rational() * b.to_rational());
        EXPECT_EQ(a < b, a.to_rational() < b.to_rational());
    }
}

TEST(Dyadic, LargeExponents) {
    const Dyadic tiny = Dyadic::pow2(-5000);
    EXPECT_GT(tiny, Dyadic(0));
    EXPECT_EQ((tiny + tiny).exp(), 4999u);
    EXPECT_EQ(tiny.to_double(), 0.0);
    EXPECT_DOUBLE_EQ(d("3/2^2").to_double(), 0.75);
}

TEST(Dyadic, RationalRendering) {
    EXPECT_EQ(cusick::to_string(Rational(3, 4)), "3/4");
    EXPECT_EQ(cusick::to_string(Rational(-6, 3)), "-2");
}
