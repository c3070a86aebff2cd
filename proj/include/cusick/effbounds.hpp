#pragma once

// Effective constants for the moment bounds and the block threshold L(eps):
// every t with at least L(eps) blocks of 1s satisfies c_t > 1/2 - eps.
//
// All transcendental quantities are bounded with directed rounding so that each
// stored constant is an upper bound (or lower bound where it sits in a denominator).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cusick/bigfloat.hpp"
#include "cusick/carrydist.hpp"
#include "cusick/dyadic.hpp"
#include "cusick/series.hpp"

namespace cusick {

/// A rational bracket lo < log 2 < hi.
struct Log2Bracket {
    Rational lo{BigInt(6931471805), BigInt(10000000000)};
    Rational hi{BigInt(6931471806), BigInt(10000000000)};

    /// Upper bound for 1 / log 2.
    BigFloat inv_upper() const { return BigFloat::from_rational(1 / lo, Dir::up); }
    /// Lower bound for 1 / log 2.
    Rational inv_lower() const { return 1 / hi; }
};

/// A_k = 2 (3/2)^(k-1) / k!, exactly.
inline Rational exact_A(unsigned k) {
    if (k == 0) throw std::invalid_argument("exact_A: k must be >= 1");
    Rational a = 2;
    for (unsigned j = 2; j <= k; ++j) a = a * 3 / (2 * static_cast<long>(j));
    return a;
}

/// Upper bounds for the constants A_k .. E_k, d_1(k), d_2(k) and E'_k = (C_k + E_k) / 2.
class ConstantsLedger {
public:
    struct Entry {
        BigFloat A;       // rounded up
        BigFloat A_down;  // rounded down, for use in denominators
        BigFloat B, C, D, E, d1, d2, E_prime;
    };

    explicit ConstantsLedger(Log2Bracket bracket = {}) : bracket_(std::move(bracket)), inv_(bracket_.inv_upper()) {
        entries_.emplace_back();  // index 0: only E'_0 = 0 is meaningful
    }

    unsigned kmax() const noexcept { return static_cast<unsigned>(entries_.size() - 1); }
    const Log2Bracket& bracket() const noexcept { return bracket_; }
    const BigFloat& inv_log2_upper() const noexcept { return inv_; }

    const Entry& operator[](unsigned k) const {
        if (k > kmax()) throw std::out_of_range("ConstantsLedger: index beyond kmax");
        return entries_[k];
    }

    /// Appends entries up to `kmax`, in dependency order d_1, B, D, d_2, C, E.
    void extend(unsigned new_kmax) {
        while (kmax() < new_kmax) push_next();
    }

private:
    BigFloat inv_pow(unsigned long n) const { return BigFloat::pow(inv_, n, Dir::up); }

    static BigFloat up_add(const BigFloat& a, const BigFloat& b) { return BigFloat::add(a, b, Dir::up); }
    static BigFloat up_mul(const BigFloat& a, const BigFloat& b) { return BigFloat::mul(a, b, Dir::up); }

    /// 3 + 2 maxA + maxB + maxC + maxD + maxE over the given prefix lengths (empty maxima are 0).
    BigFloat bracket_sum(unsigned a_to, unsigned b_to, unsigned c_to, unsigned d_to, unsigned e_to) const {
        BigFloat s(3);
        s = up_add(s, max_A_[a_to].scaled2(1));
        s = up_add(s, max_B_[b_to]);
        s = up_add(s, max_C_[c_to]);
        s = up_add(s, max_D_[d_to]);
        s = up_add(s, max_E_[e_to]);
        return s;
    }

    void push_next() {
        const unsigned k = kmax() + 1;
        Entry e;
        if (k == 1) {
            e.A = BigFloat(2);
            e.A_down = BigFloat(2);
            e.B = BigFloat(1);
            // the general formula gives 6 (log 2)^-3; the stated value is 6 (log 2)^-4, which is larger
            e.d2 = up_mul(BigFloat(6), BigFloat::max(inv_pow(3), inv_pow(4)));
            max_A_ = {BigFloat(0)};
            max_B_ = {BigFloat(0)};
            max_C_ = {BigFloat(0)};
            max_D_ = {BigFloat(0), BigFloat(0)};  // D starts at index 2
            max_E_ = {BigFloat(0)};
        } else {
            const Entry& p = entries_[k - 1];
            e.A = BigFloat::div(up_mul(p.A, BigFloat(3)), BigFloat(2 * static_cast<long>(k)), Dir::up);
            e.A_down = BigFloat::div(BigFloat::mul(p.A_down, BigFloat(3), Dir::down), BigFloat(2 * static_cast<long>(k)), Dir::down);
            e.d1 = up_mul(inv_pow(2 * k).scaled2(1), bracket_sum(k - 2, k - 2, k - 2, k - 1, k - 1));
            // B_k = (2 B_{k-1} + 3 d_1(k)) / (k - 1) + 2 (log 2)^-2k
            e.B = up_add(BigFloat::div(up_add(p.B.scaled2(1), up_mul(BigFloat(3), e.d1)), BigFloat(static_cast<long>(k - 1)), Dir::up),
                         inv_pow(2 * k).scaled2(1));
            e.D = up_add(up_add(p.B, e.d1.scaled2(1)), inv_pow(2 * k));
        }
        max_A_.push_back(BigFloat::max(max_A_.back(), e.A));
        max_B_.push_back(BigFloat::max(max_B_.back(), e.B));
        if (k >= 2) max_D_.push_back(BigFloat::max(max_D_.back(), e.D));
        if (k >= 2) e.d2 = up_mul(inv_pow(2 * k + 1).scaled2(1), bracket_sum(k - 1, k - 1, k - 1, k, k - 1));
        // C_k = 3 d_2(k) / k + 2 (log 2)^-(2k+1), E_k = 2 d_2(k) + (log 2)^-(2k+1)
        e.C = up_add(BigFloat::div(up_mul(BigFloat(3), e.d2), BigFloat(static_cast<long>(k)), Dir::up), inv_pow(2 * k + 1).scaled2(1));
        e.E = up_add(e.d2.scaled2(1), inv_pow(2 * k + 1));
        e.E_prime = up_add(e.C, e.E).scaled2(-1);
        max_C_.push_back(BigFloat::max(max_C_.back(), e.C));
        max_E_.push_back(BigFloat::max(max_E_.back(), e.E));
        entries_.push_back(std::move(e));
    }

    Log2Bracket bracket_;
    BigFloat inv_;
    std::vector<Entry> entries_;
    // max_X_[n] = max of X_1 .. X_n (D: X_2 .. X_n); index 0 is the empty maximum
    std::vector<BigFloat> max_A_, max_B_, max_C_, max_D_, max_E_;
};

inline ConstantsLedger build_ledger(unsigned kmax, Log2Bracket bracket = {}) {
    if (kmax == 0) throw std::invalid_argument("build_ledger: kmax must be >= 1");
    ConstantsLedger ledger(std::move(bracket));
    ledger.extend(kmax);
    return ledger;
}

/// One checked inequality lhs <= rhs (or lhs == rhs for the fixed low-order values).
struct BoundCheck {
    std::string name;
    unsigned k = 0;
    Rational lhs;
    Rational rhs;
    bool holds = false;
};

/// Which block count r enters the bounds. `stated` omits the lowest block of 0s of an even t;
/// `appended` counts it, matching the number of runs appended when building t from 0.
enum class BlockCount { stated, appended };

/// r under the given convention.
inline unsigned block_count(std::uint64_t t, BlockCount mode) {
    return blocks_count(t) + (mode == BlockCount::appended && t != 0 && (t & 1) == 0 ? 1u : 0u);
}

struct MomentBoundReport {
    std::uint64_t t = 0;
    unsigned r = 0;  // number of blocks under the chosen convention
    std::vector<BoundCheck> checks;

    bool all_hold() const {
        return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.holds; });
    }
};

/// Checks the moment bounds for t (r blocks) against the ledger, with exact left-hand sides:
///   |a_2k| <= A_k r^k + B_k r^(k-1),   |a_2k+1| <= C_k r^k,
///   |b_2k| <= A_(k-1) r^(k-1) + D_k r^(k-2) (k >= 2),   |b_2k+1| <= E_k r^(k-1),
///   a_0 = 2, a_1 = b_0 = b_1 = 0, |b_2| <= 1.
/// With the stated count the bounds fail for some even t (a_2(6) = 13/4 > 2 * 1 + 1); odd t are unaffected.
inline MomentBoundReport verify_moment_bounds(std::uint64_t t, unsigned kmax, const ConstantsLedger& ledger,
                                              BlockCount mode = BlockCount::stated) {
    if (t == 0) throw std::invalid_argument("verify_moment_bounds: t must be >= 1");
    if (kmax == 0) throw std::invalid_argument("verify_moment_bounds: kmax must be >= 1");
    if (kmax > ledger.kmax()) throw std::invalid_argument("verify_moment_bounds: ledger too short");
    const auto s = fg_for(t, 2 * kmax + 1);
    MomentBoundReport rep;
    rep.t = t;
    rep.r = block_count(t, mode);
    const Rational r = rep.r;
    auto rpow = [&](long n) {
        Rational p = 1;
        for (long i = 0; i < n; ++i) p *= r;
        return p;
    };
    auto abs = [](const Rational& q) { return q < 0 ? Rational(-q) : q; };
    auto eq = [&](std::string name, const Rational& lhs, const Rational& rhs) {
        rep.checks.push_back({std::move(name), 0, lhs, rhs, lhs == rhs});
    };
    auto le = [&](std::string name, unsigned k, const Rational& lhs, const Rational& rhs) {
        rep.checks.push_back({std::move(name), k, lhs, rhs, lhs <= rhs});
    };
    eq("a_0", s.F[0], 2);
    eq("a_1", s.F[1], 0);
    eq("b_0", s.G[0], 0);
    eq("b_1", s.G[1], 0);
    le("|b_2|", 1, abs(s.G[2]), 1);
    for (unsigned k = 1; k <= kmax; ++k) {
        const auto& e = ledger[k];
        le("|a_2k|", k, abs(s.F[2 * k]), e.A.to_rational() * rpow(k) + e.B.to_rational() * rpow(k - 1));
        le("|a_2k+1|", k, abs(s.F[2 * k + 1]), e.C.to_rational() * rpow(k));
        if (k >= 2) le("|b_2k|", k, abs(s.G[2 * k]), ledger[k - 1].A.to_rational() * rpow(k - 1) + e.D.to_rational() * rpow(k - 2));
        le("|b_2k+1|", k, abs(s.G[2 * k + 1]), e.E.to_rational() * rpow(k - 1));
    }
    return rep;
}

namespace detail {

/// Upper bound for (1/m) exp(-m^2 / 16).
inline BigFloat tail_term_upper(unsigned long m) {
    const BigFloat x = BigFloat(-static_cast<long>(m * m)).scaled2(-4);  // exact
    return BigFloat::div(BigFloat::exp(x, Dir::up), BigFloat(static_cast<long>(m)), Dir::up);
}

/// Upper bounds for sum_{m >= R} (1/m) exp(-m^2/16), R = 1 .. n. Index R holds the bound.
inline std::vector<BigFloat> tail_upper_table(unsigned long n) {
    // beyond n consecutive terms shrink by at least exp(-(2n+3)/16) <= 1/2, so twice the next term covers the rest
    std::vector<BigFloat> suffix(n + 2);
    suffix[n + 1] = tail_term_upper(n + 1).scaled2(1);
    for (unsigned long m = n; m >= 1; --m) suffix[m] = BigFloat::add(suffix[m + 1], tail_term_upper(m), Dir::up);
    return suffix;
}

/// Lower bound for eps / 3.
inline BigFloat third_lower(const Rational& eps) { return BigFloat::from_rational(eps / 3, Dir::down); }

}  // namespace detail

/// Upper bound for sum_{m >= R} (1/m) exp(-m^2/16).
inline BigFloat tail_value(unsigned long R) {
    if (R == 0) throw std::invalid_argument("tail_value: R must be >= 1");
    return detail::tail_upper_table(std::max<unsigned long>(200, R))[R];
}

struct TailChoice {
    unsigned long R = 0;
    BigFloat tail;  // upper bound at R
};

/// Smallest R whose rigorous tail bound is <= eps / 3.
inline TailChoice tail_R(const Rational& eps) {
    if (eps <= 0) throw std::invalid_argument("tail_R: epsilon must be positive");
    const BigFloat target = detail::third_lower(eps);
    for (unsigned long n = 200;; n *= 2) {
        const auto table = detail::tail_upper_table(n);
        for (unsigned long R = 1; R <= n; ++R) {
            if (table[R] <= target) return {R, table[R]};
        }
        if (n > (1ul << 24)) throw std::domain_error("tail_R: epsilon too small");
    }
}

/// Upper bound for L_K = 2 sqrt((2K)! (2K+2)! A_K A_(K+1)) (2 pi)^(2K+1) / (2K+1)!.
inline BigFloat L_K_upper(unsigned K, const ConstantsLedger& ledger) {
    if (K == 0 || K + 1 > ledger.kmax()) throw std::invalid_argument("L_K_upper: ledger must cover K + 1");
    const auto up = Dir::up;
    BigFloat prod = BigFloat::mul(BigFloat::factorial(2 * K, up), BigFloat::factorial(2 * K + 2, up), up);
    prod = BigFloat::mul(prod, BigFloat::mul(ledger[K].A, ledger[K + 1].A, up), up);
    BigFloat v = BigFloat::sqrt(prod, up).scaled2(1);
    v = BigFloat::mul(v, BigFloat::pow(BigFloat::pi(up).scaled2(1), 2 * K + 1, up), up);
    return BigFloat::div(v, BigFloat::factorial(2 * K + 1, Dir::down), up);
}

/// Lower bound for (eps / 3) / R^(2K+1).
inline BigFloat L_K_target(const Rational& eps, unsigned long R, unsigned K) {
    return BigFloat::div(detail::third_lower(eps), BigFloat::pow(BigFloat(static_cast<long>(R)), 2 * K + 1, Dir::up), Dir::down);
}

struct KChoice {
    unsigned K = 0;
    BigFloat L_K;     // upper bound
    BigFloat target;  // lower bound for (eps / 3) / R^(2K+1)
};

/// Thrown when no K within the ledger satisfies the L_K inequality.
struct LedgerTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Smallest K (with K + 1 <= ledger.kmax()) such that L_K <= (eps/3) / R^(2K+1).
inline KChoice choose_K(const Rational& eps, unsigned long R, const ConstantsLedger& ledger) {
    if (eps <= 0) throw std::invalid_argument("choose_K: epsilon must be positive");
    if (R == 0) throw std::invalid_argument("choose_K: R must be >= 1");
    for (unsigned K = 1; K + 1 <= ledger.kmax(); ++K) {
        auto lk = L_K_upper(K, ledger);
        auto target = L_K_target(eps, R, K);
        if (lk <= target) return {K, std::move(lk), std::move(target)};
    }
    throw LedgerTooShort("choose_K: no K up to " + std::to_string(ledger.kmax() - 1) + " satisfies the inequality");
}

/// r_0(K) = max(B_K / A_K, B_(K+1) / A_(K+1)), rounded up.
inline BigFloat r0_upper(unsigned K, const ConstantsLedger& ledger) {
    return BigFloat::max(BigFloat::div(ledger[K].B, ledger[K].A_down, Dir::up), BigFloat::div(ledger[K + 1].B, ledger[K + 1].A_down, Dir::up));
}

/// sum_{0 <= k < K} (2 pi R)^(2k+1) E'_k, rounded up.
inline BigFloat odd_moment_sum_upper(unsigned K, unsigned long R, const ConstantsLedger& ledger) {
    const BigFloat base = BigFloat::mul(BigFloat::pi(Dir::up).scaled2(1), BigFloat(static_cast<long>(R)), Dir::up);
    BigFloat s;
    for (unsigned k = 1; k < K; ++k) s = BigFloat::add(s, BigFloat::mul(BigFloat::pow(base, 2 * k + 1, Dir::up), ledger[k].E_prime, Dir::up), Dir::up);
    return s;
}

/// Smallest integer r with r^(-1/2) S <= eps / 3, i.e. r >= (3 S / eps)^2, rounded up.
inline BigFloat r1_upper(const BigFloat& S, const Rational& eps) {
    const BigFloat q = BigFloat::div(S, detail::third_lower(eps), Dir::up);
    return BigFloat::ceil(BigFloat::mul(q, q, Dir::up));
}

struct Witness {
    std::string name;
    BigFloat lhs;
    BigFloat rhs;
    bool holds = false;
};

struct ThresholdCertificate {
    Rational epsilon;
    bool trivial = false;  // eps >= 1: nothing to prove
    unsigned long R = 0;
    BigFloat tail_value;
    unsigned K = 0;
    unsigned ledger_kmax = 0;
    BigFloat L_K_bound;
    BigFloat L_K_target;
    BigFloat r0;
    BigFloat odd_sum;
    BigFloat r1;
    BigFloat r_required;
    BigFloat L;  // blocks of 1s
    std::vector<Witness> witnesses;
    std::vector<std::string> notes;
};

/// Re-checks every inequality of a certificate from (eps, R, K, r, L) and the ledger alone.
inline std::vector<Witness> verify_certificate(const ThresholdCertificate& c, const ConstantsLedger& ledger) {
    std::vector<Witness> w;
    if (c.trivial) {
        w.push_back({"epsilon >= 1", BigFloat(1), BigFloat::from_rational(c.epsilon, Dir::down), c.epsilon >= 1});
        w.push_back({"L == 1", c.L, BigFloat(1), c.L == BigFloat(1)});
        return w;
    }
    const BigFloat third = detail::third_lower(c.epsilon);
    const BigFloat tail = tail_value(c.R);
    w.push_back({"tail(R) <= eps/3", tail, third, tail <= third});
    const BigFloat lk = L_K_upper(c.K, ledger);
    const BigFloat target = L_K_target(c.epsilon, c.R, c.K);
    w.push_back({"L_K <= (eps/3)/R^(2K+1)", lk, target, lk <= target});
    const BigFloat S = odd_moment_sum_upper(c.K, c.R, ledger);
    const BigFloat q = BigFloat::div(S, third, Dir::up);
    const BigFloat q2 = BigFloat::mul(q, q, Dir::up);
    w.push_back({"(S/(eps/3))^2 <= r", q2, c.r_required, q2 <= c.r_required});
    w.push_back({"8 <= r", BigFloat(8), c.r_required, BigFloat(8) <= c.r_required});
    const BigFloat r0 = r0_upper(c.K, ledger);
    w.push_back({"r_0(K) <= r", r0, c.r_required, r0 <= c.r_required});
    // for integers 2L > r is the same as 2L >= r + 1
    const BigFloat twoL = c.L.scaled2(1);
    w.push_back({"r < 2L", c.r_required, twoL, c.r_required.is_integer() && c.L.is_integer() && c.r_required < twoL});
    return w;
}

/// Runs the threshold procedure: R from the tail, K from L_K, r from r_0 and r_1, L = ceil((r+1)/2).
/// The ledger is grown by doubling until some K works.
inline ThresholdCertificate block_threshold(const Rational& eps, unsigned max_kmax = 1u << 16, Log2Bracket bracket = {}) {
    if (eps <= 0) throw std::invalid_argument("block_threshold: epsilon must be positive");
    ThresholdCertificate c;
    c.epsilon = eps;
    if (eps >= 1) {
        c.trivial = true;
        c.L = BigFloat(1);
        c.notes.push_back("epsilon >= 1: 1/2 - epsilon < 0 < c_t for every t");
        c.witnesses = verify_certificate(c, ConstantsLedger(bracket));
        return c;
    }
    const auto tail = tail_R(eps);
    c.R = tail.R;
    c.tail_value = tail.tail;

    ConstantsLedger ledger(std::move(bracket));
    for (unsigned kmax = 64;; kmax *= 2) {
        ledger.extend(std::min(kmax, max_kmax));
        try {
            auto kc = choose_K(eps, c.R, ledger);
            c.K = kc.K;
            c.L_K_bound = std::move(kc.L_K);
            c.L_K_target = std::move(kc.target);
            break;
        } catch (const LedgerTooShort&) {
            if (kmax >= max_kmax) throw;
        }
    }
    c.ledger_kmax = c.K + 1;
    c.r0 = r0_upper(c.K, ledger);
    c.odd_sum = odd_moment_sum_upper(c.K, c.R, ledger);
    c.r1 = r1_upper(c.odd_sum, eps);
    c.r_required = BigFloat::max(BigFloat::max(BigFloat(8), BigFloat::ceil(c.r0)), c.r1);
    c.L = BigFloat::ceil(BigFloat::add(c.r_required, BigFloat(1), Dir::up).scaled2(-1));
    c.notes.push_back("B_1 = 1, from a_2(t) <= 2r + 1");
    c.notes.push_back("d_2(1) = 6 (log 2)^-4, the larger of the stated value and the general formula");
    c.notes.push_back("r_0(K) uses B_K and B_(K+1)");
    c.witnesses = verify_certificate(c, ledger);
    return c;
}

/// True if the certificate's witnesses all hold.
inline bool certificate_holds(const ThresholdCertificate& c) {
    return !c.witnesses.empty() && std::all_of(c.witnesses.begin(), c.witnesses.end(), [](const Witness& w) { return w.holds; });
}

/// Largest s with e^(s^2) <= t certified, so s <= floor(sqrt(log t)).
inline unsigned long floor_sqrt_log_lower(std::uint64_t t) {
    if (t == 0) throw std::invalid_argument("floor_sqrt_log_lower: t must be >= 1");
    const BigFloat tt = BigFloat::from_bigint(BigInt(t), Dir::down);  // exact for 64-bit t
    unsigned long s = 0;
    while (BigFloat::exp(BigFloat(static_cast<long>((s + 1) * (s + 1))), Dir::up) <= tt) ++s;
    return s;
}

struct ChebyshevResult {
    std::uint64_t t = 0;
    std::int64_t j0 = 0;  // summation starts here
    Dyadic mass;          // sum_{j >= j0} delta(j, t)
    bool holds = false;   // mass > 1/2
};

/// sum_{j >= -sqrt(log t) - 1} delta(j, t) > 1/2, i.e. j >= -floor(sqrt(log t)) - 1.
inline ChebyshevResult chebyshev_check(std::uint64_t t) {
    if (t == 0) throw std::invalid_argument("chebyshev_check: t must be >= 1");
    ChebyshevResult res;
    res.t = t;
    res.j0 = -static_cast<std::int64_t>(floor_sqrt_log_lower(t)) - 1;
    res.mass = dist_for(t).mass_at_or_above(res.j0);
    res.holds = res.mass > Dyadic::pow2(-1);
    return res;
}

/// Number of t < 2^lambda with fewer than L blocks of 1s: sum_{l < L} C(lambda + 1, 2l).
inline BigInt count_few_block_integers(unsigned lambda, unsigned L) {
    if (lambda == 0 || L == 0) throw std::invalid_argument("count_few_block_integers: lambda and L must be >= 1");
    // l blocks of 1s in a lambda-bit word: choose the 2l boundaries among lambda + 1 gaps
    BigInt total = 0;
    for (unsigned l = 0; l < L && 2 * l <= lambda + 1; ++l) {
        BigInt b = 1;
        for (unsigned i = 0; i < 2 * l; ++i) b = b * (lambda + 1 - i) / (i + 1);
        total += b;
    }
    return total;
}

/// lambda^(2L - 2).
inline BigInt few_block_bound(unsigned lambda, unsigned L) { return boost::multiprecision::pow(BigInt(lambda), 2 * L - 2); }

/// m_2(t) <= log t / (3 log 2) + 1, checked with a lower bound for log_2 t.
inline bool bejian_faure_check(std::uint64_t t) {
    if (t == 0) throw std::invalid_argument("bejian_faure_check: t must be >= 1");
    const BigFloat tt = BigFloat::from_bigint(BigInt(t), Dir::down);
    // log_2 t = log t / log 2 >= log t * (1 / hi)
    const BigFloat ln = BigFloat::log(tt, Dir::down);
    const BigFloat bound = BigFloat::add(BigFloat::div(ln, BigFloat::from_rational(Rational(3) * Log2Bracket{}.hi, Dir::up), Dir::down), BigFloat(1), Dir::down);
    return bound.compare(m2_exact(t)) >= 0;
}

}  // namespace cusick
