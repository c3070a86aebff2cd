#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "cusick/carrydist.hpp"
#include "cusick/effbounds.hpp"

using namespace cusick;

namespace {

// direct double-precision summation of sum_{m >= R} (1/m) exp(-m^2/16)
double tail_double(unsigned R) {
    double s = 0;
    for (unsigned m = 600; m >= R; --m) s += std::exp(-static_cast<double>(m) * m / 16) / m;
    return s;
}

BigFloat pow_inv_hi(unsigned n) {
    return BigFloat::pow(BigFloat::from_rational(Log2Bracket{}.inv_lower(), Dir::down), n, Dir::down);
}

}  // namespace

TEST(BigFloat, DirectedRounding) {
    const auto lo = BigFloat::from_rational(Rational(1, 3), Dir::down);
    const auto hi = BigFloat::from_rational(Rational(1, 3), Dir::up);
    EXPECT_LT(lo, hi);
    EXPECT_LT(lo.compare(Rational(1, 3)), 0);
    EXPECT_GT(hi.compare(Rational(1, 3)), 0);
    EXPECT_EQ(BigFloat::from_rational(Rational(3, 8), Dir::up).compare(Rational(3, 8)), 0);
    EXPECT_EQ(BigFloat::parse(hi.to_string()), hi);
    EXPECT_EQ(BigFloat::parse("12*2^3"), BigFloat(96));
    EXPECT_EQ(BigFloat(96).to_string(), "3*2^5");
    EXPECT_THROW((void)BigFloat::parse("1/2^x"), std::invalid_argument);
    const auto e_lo = BigFloat::exp(BigFloat(1), Dir::down);
    const auto e_hi = BigFloat::exp(BigFloat(1), Dir::up);
    EXPECT_LT(e_lo, e_hi);
    EXPECT_NEAR(e_lo.to_double(), std::exp(1.0), 1e-15);
}

TEST(Ledger, ExactA) {
    EXPECT_EQ(exact_A(1), 2);
    EXPECT_EQ(exact_A(2), Rational(3, 2));
    EXPECT_EQ(exact_A(3), Rational(3, 4));
    for (unsigned k = 2; k <= 20; ++k) EXPECT_EQ(exact_A(k), exact_A(k - 1) * 3 / (2 * k));
    EXPECT_THROW((void)exact_A(0), std::invalid_argument);
}

TEST(Ledger, FirstEntries) {
    const auto L = build_ledger(4);
    EXPECT_EQ(L.kmax(), 4u);
    EXPECT_EQ(L[1].A.compare(2), 0);
    EXPECT_EQ(L[3].A.compare(Rational(3, 4)), 0);
    EXPECT_EQ(L[1].B.compare(1), 0);
    // d_2(1) = 6 (log 2)^-4 is bounded from above by the ledger
    EXPECT_GE(L[1].d2, BigFloat::mul(BigFloat(6), pow_inv_hi(4), Dir::down));
    for (unsigned k = 1; k <= 4; ++k) {
        EXPECT_EQ(L[k].A.compare(exact_A(k)), 0) << k;
        for (const BigFloat* v : {&L[k].B, &L[k].C, &L[k].E, &L[k].d2, &L[k].E_prime}) {
            EXPECT_GT(v->sign(), 0) << k;
            EXPECT_TRUE(v->is_finite()) << k;
        }
        if (k >= 2) {
            EXPECT_GT(L[k].D.sign(), 0);
            EXPECT_GT(L[k].d1.sign(), 0);
        }
        // E'_k = (C_k + E_k) / 2 rounded up
        EXPECT_GE(L[k].E_prime, BigFloat::add(L[k].C, L[k].E, Dir::down).scaled2(-1));
    }
}

TEST(Ledger, DependencyOrderIsStable) {
    const auto a = build_ledger(12);
    const auto b = build_ledger(13);
    for (unsigned k = 1; k <= 12; ++k) {
        EXPECT_EQ(a[k].B, b[k].B);
        EXPECT_EQ(a[k].C, b[k].C);
        EXPECT_EQ(a[k].E, b[k].E);
        EXPECT_EQ(a[k].d2, b[k].d2);
        if (k >= 2) {
            EXPECT_EQ(a[k].D, b[k].D);
        }
    }
    auto c = build_ledger(5);
    c.extend(13);
    for (unsigned k = 1; k <= 13; ++k) EXPECT_EQ(c[k].E_prime, b[k].E_prime);
}

TEST(Ledger, TighterBracketNeverIncreases) {
    const auto loose = build_ledger(10);
    const Log2Bracket tight{Rational(BigInt(69314718055), BigInt(100000000000)), Rational(BigInt(69314718056), BigInt(100000000000))};
    const auto fine = build_ledger(10, tight);
    for (unsigned k = 1; k <= 10; ++k) {
        EXPECT_LE(fine[k].B, loose[k].B);
        EXPECT_LE(fine[k].C, loose[k].C);
        EXPECT_LE(fine[k].E, loose[k].E);
        EXPECT_LE(fine[k].d2, loose[k].d2);
    }
}

TEST(MomentBounds, Examples) {
    const auto L = build_ledger(4);
    const auto r1 = verify_moment_bounds(1, 1, L);
    EXPECT_EQ(r1.r, 1u);
    EXPECT_TRUE(r1.all_hold());
    bool saw_a2 = false;
    for (const auto& c : r1.checks) {
        if (c.name == "|a_2k|" && c.k == 1) {
            EXPECT_EQ(c.lhs, 2);
            EXPECT_EQ(c.rhs, 3);
            saw_a2 = true;
        }
        if (c.name == "b_0") {
            EXPECT_EQ(c.lhs, 0);
        }
    }
    EXPECT_TRUE(saw_a2);
    const auto r2 = verify_moment_bounds(1u << 10, 4, L);
    EXPECT_EQ(r2.r, 1u);
    EXPECT_TRUE(r2.all_hold());
    EXPECT_THROW((void)verify_moment_bounds(0, 2, L), std::invalid_argument);
}

TEST(MomentBounds, OddSmallT) {
    const auto L = build_ledger(4);
    for (std::uint64_t t = 1; t < (1u << 14); t += 2) {
        const auto rep = verify_moment_bounds(t, 4, L);
        ASSERT_TRUE(rep.all_hold()) << t;
        ASSERT_EQ(rep.r, blocks_count(t));
    }
}

TEST(MomentBounds, AllSmallTWithAppendedCount) {
    const auto L = build_ledger(4);
    for (std::uint64_t t = 1; t < (1u << 14); ++t) {
        const auto rep = verify_moment_bounds(t, 4, L, BlockCount::appended);
        ASSERT_TRUE(rep.all_hold()) << t;
        ASSERT_EQ(rep.r, blocks_count(t) + (t % 2 == 0));
    }
}

TEST(MomentBounds, StatedCountFailsForSomeEvenT) {
    // t = 110: one block, but a_2(6) = m_2(6) + m_2(7) = 3/2 + 7/4 exceeds A_1 + B_1 = 3
    const auto L = build_ledger(1);
    EXPECT_EQ(moment(6, 2) + moment(7, 2), Rational(13, 4));
    const auto rep = verify_moment_bounds(6, 1, L);
    EXPECT_EQ(rep.r, 1u);
    EXPECT_FALSE(rep.all_hold());
    const auto it = std::find_if(rep.checks.begin(), rep.checks.end(), [](const BoundCheck& c) { return !c.holds; });
    ASSERT_NE(it, rep.checks.end());
    EXPECT_EQ(it->name, "|a_2k|");
    EXPECT_EQ(it->lhs, Rational(13, 4));
    EXPECT_EQ(it->rhs, 3);
    EXPECT_TRUE(verify_moment_bounds(6, 1, L, BlockCount::appended).all_hold());
}

TEST(Tail, Examples) {
    EXPECT_EQ(tail_R(Rational(51, 10)).R, 1u);
    EXPECT_EQ(tail_R(Rational(3, 10)).R, 5u);
    EXPECT_NEAR(tail_double(1), 1.68, 0.01);
    EXPECT_NEAR(tail_double(5), 0.069, 0.001);
    EXPECT_NEAR(tail_double(4), 0.161, 0.001);
    for (unsigned R = 1; R <= 30; ++R) {
        const double exact = tail_double(R);
        const double bound = tail_value(R).to_double();
        EXPECT_GE(bound, exact * (1 - 1e-12)) << R;  // the double oracle is only accurate to rounding
        EXPECT_LE(bound, exact * (1 + 1e-12) + 1e-300) << R;
    }
    EXPECT_THROW((void)tail_R(0), std::invalid_argument);
}

TEST(Tail, Monotone) {
    unsigned long prev = 0;
    for (int i = 40; i >= 1; --i) {
        const auto R = tail_R(Rational(i, 20)).R;
        EXPECT_GE(R, prev) << i;
        prev = R;
    }
}

TEST(ChooseK, Examples) {
    const Rational eps(3, 10);
    const auto L = build_ledger(block_threshold(eps).ledger_kmax);
    const auto kc = choose_K(eps, 5, L);
    EXPECT_GE(kc.K, 1u);
    EXPECT_LE(kc.L_K, kc.target);
    // the witness target is at most 0.1 / 5^(2K+1)
    Rational rhs = Rational(1, 10);
    for (unsigned i = 0; i < 2 * kc.K + 1; ++i) rhs /= 5;
    EXPECT_LE(kc.target.compare(rhs), 0);
    // smallest: K - 1 fails
    if (kc.K > 1) {
        EXPECT_GT(L_K_upper(kc.K - 1, L), L_K_target(eps, 5, kc.K - 1));
    }
    // a larger R never decreases K; running off the ledger also means a larger K
    unsigned prevK = kc.K;
    for (unsigned long R = 6; R <= 8; ++R) {
        try {
            const auto k2 = choose_K(eps, R, L);
            EXPECT_GE(k2.K, prevK);
            prevK = k2.K;
        } catch (const LedgerTooShort&) {
            prevK = L.kmax();
        }
    }
    EXPECT_THROW((void)choose_K(eps, 5, build_ledger(2)), LedgerTooShort);
}

TEST(Threshold, Certificates) {
    const auto c45 = block_threshold(Rational(45, 100));
    const auto c25 = block_threshold(Rational(1, 4));
    for (const auto* c : {&c45, &c25}) {
        EXPECT_FALSE(c->trivial);
        EXPECT_TRUE(certificate_holds(*c));
        EXPECT_EQ(c->witnesses.size(), 6u);
        EXPECT_GE(c->r_required, BigFloat(8));
        EXPECT_TRUE(c->L.is_integer());
        // L = ceil((r + 1) / 2)
        EXPECT_EQ(c->L, BigFloat::ceil(BigFloat::add(c->r_required, BigFloat(1), Dir::up).scaled2(-1)));
        // independent re-check from (eps, R, K, r, L) and a fresh ledger
        const auto ledger = build_ledger(c->K + 1);
        const auto w = verify_certificate(*c, ledger);
        ASSERT_EQ(w.size(), c->witnesses.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            EXPECT_TRUE(w[i].holds) << w[i].name;
            EXPECT_EQ(w[i].lhs, c->witnesses[i].lhs) << w[i].name;
        }
    }
    EXPECT_GE(c25.L, c45.L);
    EXPECT_GE(c25.R, c45.R);
}

TEST(Threshold, TamperedCertificateFails) {
    auto c = block_threshold(Rational(45, 100));
    const auto ledger = build_ledger(c.K + 1);
    auto bad_r = c;
    bad_r.r_required = BigFloat(7);
    bad_r.L = BigFloat(4);
    auto w = verify_certificate(bad_r, ledger);
    EXPECT_FALSE(std::all_of(w.begin(), w.end(), [](const Witness& x) { return x.holds; }));
    auto bad_R = c;
    bad_R.R = 1;
    w = verify_certificate(bad_R, ledger);
    EXPECT_FALSE(w[0].holds);
}

TEST(Threshold, Degenerate) {
    const auto c = block_threshold(Rational(3, 2));
    EXPECT_TRUE(c.trivial);
    EXPECT_TRUE(certificate_holds(c));
    EXPECT_EQ(c.L, BigFloat(1));
    EXPECT_THROW((void)block_threshold(0), std::invalid_argument);
}

TEST(Chebyshev, FloorOfRootLog) {
    // floor(sqrt(ln t)) changes at t = e^(s^2)
    EXPECT_EQ(floor_sqrt_log_lower(1), 0u);
    EXPECT_EQ(floor_sqrt_log_lower(2), 0u);
    EXPECT_EQ(floor_sqrt_log_lower(3), 1u);  // e < 3
    EXPECT_EQ(floor_sqrt_log_lower(54), 1u);
    EXPECT_EQ(floor_sqrt_log_lower(55), 2u);  // e^4 = 54.598...
    for (std::uint64_t t = 1; t < 100000; t += 97) {
        EXPECT_EQ(floor_sqrt_log_lower(t), static_cast<unsigned long>(std::floor(std::sqrt(std::log(static_cast<double>(t)))))) << t;
    }
}

TEST(Chebyshev, Examples) {
    EXPECT_TRUE(chebyshev_check(1).holds);
    EXPECT_EQ(chebyshev_check(1).mass, Dyadic::parse("7/2^3"));
    for (unsigned k = 1; k < 30; ++k) {
        const auto r = chebyshev_check(std::uint64_t{1} << k);
        EXPECT_TRUE(r.holds);
        EXPECT_EQ(r.mass, dist_for(1).mass_at_or_above(r.j0));
    }
    EXPECT_THROW((void)chebyshev_check(0), std::invalid_argument);
}

TEST(FewBlocks, Counts) {
    EXPECT_EQ(count_few_block_integers(10, 1), 1);
    EXPECT_EQ(count_few_block_integers(8, 2), 37);
    for (unsigned lambda = 1; lambda <= 14; ++lambda) {
        BigInt prev = 0;
        for (unsigned L = 1; L <= 6; ++L) {
            std::uint64_t brute = 0;
            for (std::uint64_t t = 0; t < (std::uint64_t{1} << lambda); ++t) brute += ones_blocks(t) < L;
            const BigInt count = count_few_block_integers(lambda, L);
            ASSERT_EQ(count, brute) << lambda << " " << L;
            ASSERT_GE(count, prev);
            prev = count;
            if (L >= 2 && lambda >= 2) {
                ASSERT_LE(count, few_block_bound(lambda, L)) << lambda << " " << L;
            }
        }
    }
}
