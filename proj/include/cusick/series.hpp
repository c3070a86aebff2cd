#pragma once

// Truncated exact power series, the 2x2 moment matrices M_0 / M_1 and the
// moment recurrences built on them.
//
// With a_k(t) = m_k(t) + m_k(t+1), b_k(t) = m_k(t) - m_k(t+1) and generating
// functions F_t = sum a_k x^k, G_t = sum b_k x^k, appending a binary digit acts as
//   (F_2t, G_2t) = M_0 (F_t, G_t),   (F_2t+1, G_2t+1) = M_1 (F_t, G_t).

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cusick/carrydist.hpp"
#include "cusick/dyadic.hpp"

namespace cusick {

/// c_0 + c_1 x + ... + c_N x^N, all arithmetic exact modulo x^(N+1).
class TruncatedSeries {
public:
    TruncatedSeries() : c_(1) {}
    explicit TruncatedSeries(std::size_t order) : c_(order + 1) {}
    explicit TruncatedSeries(std::vector<Rational> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) throw std::invalid_argument("TruncatedSeries: need at least one coefficient");
    }

    static TruncatedSeries constant(std::size_t order, const Rational& v) {
        TruncatedSeries s(order);
        s.c_[0] = v;
        return s;
    }

    /// e^(a x).
    static TruncatedSeries exp(std::size_t order, const Rational& a = 1) {
        TruncatedSeries s(order);
        s.c_[0] = 1;
        for (std::size_t k = 1; k <= order; ++k) s.c_[k] = s.c_[k - 1] * a / static_cast<long>(k);
        return s;
    }

    static TruncatedSeries cosh(std::size_t order) {
        auto e = exp(order);
        for (std::size_t k = 1; k <= order; k += 2) e.c_[k] = 0;
        return e;
    }

    static TruncatedSeries sinh(std::size_t order) {
        auto e = exp(order);
        for (std::size_t k = 0; k <= order; k += 2) e.c_[k] = 0;
        return e;
    }

    std::size_t order() const noexcept { return c_.size() - 1; }
    const Rational& operator[](std::size_t k) const { return c_.at(k); }
    Rational& operator[](std::size_t k) { return c_.at(k); }
    const std::vector<Rational>& coeffs() const noexcept { return c_; }

    TruncatedSeries& operator+=(const TruncatedSeries& o) {
        check(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    TruncatedSeries& operator-=(const TruncatedSeries& o) {
        check(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    TruncatedSeries& operator*=(const Rational& v) {
        for (auto& x : c_) x *= v;
        return *this;
    }

    TruncatedSeries operator-() const {
        TruncatedSeries r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
    friend TruncatedSeries operator*(TruncatedSeries a, const Rational& v) { return a *= v; }
    friend TruncatedSeries operator*(const Rational& v, TruncatedSeries a) { return a *= v; }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check(b);
        TruncatedSeries r(a.order());
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (std::size_t j = 0; i + j < a.c_.size(); ++j) {
                if (!b.c_[j].is_zero()) r.c_[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    TruncatedSeries inverse() const {
        if (c_[0].is_zero()) throw std::domain_error("TruncatedSeries::inverse: zero constant term");
        TruncatedSeries r(order());
        r.c_[0] = 1 / c_[0];
        for (std::size_t k = 1; k < c_.size(); ++k) {
            Rational s = 0;
            for (std::size_t i = 1; i <= k; ++i) s += c_[i] * r.c_[k - i];
            r.c_[k] = -s * r.c_[0];
        }
        return r;
    }

    friend bool operator==(const TruncatedSeries&, const TruncatedSeries&) = default;

private:
    void check(const TruncatedSeries& o) const {
        if (o.c_.size() != c_.size()) throw std::invalid_argument("TruncatedSeries: order mismatch");
    }

    std::vector<Rational> c_;
};

/// 2x2 matrix of truncated series, row-major.
class SeriesMatrix {
public:
    SeriesMatrix() = default;
    SeriesMatrix(TruncatedSeries a, TruncatedSeries b, TruncatedSeries c, TruncatedSeries d)
        : e_{std::move(a), std::move(b), std::move(c), std::move(d)} {
        for (const auto& x : e_) {
            if (x.order() != e_[0].order()) throw std::invalid_argument("SeriesMatrix: order mismatch");
        }
    }

    /// Constant integer matrix.
    static SeriesMatrix constant(std::size_t order, long a, long b, long c, long d) {
        return {TruncatedSeries::constant(order, a), TruncatedSeries::constant(order, b),
                TruncatedSeries::constant(order, c), TruncatedSeries::constant(order, d)};
    }

    const TruncatedSeries& operator()(int row, int col) const { return e_[static_cast<std::size_t>(2 * row + col)]; }
    std::size_t order() const { return e_[0].order(); }

    friend SeriesMatrix operator+(const SeriesMatrix& x, const SeriesMatrix& y) {
        return {x.e_[0] + y.e_[0], x.e_[1] + y.e_[1], x.e_[2] + y.e_[2], x.e_[3] + y.e_[3]};
    }
    friend SeriesMatrix operator*(const TruncatedSeries& s, const SeriesMatrix& m) {
        return {s * m.e_[0], s * m.e_[1], s * m.e_[2], s * m.e_[3]};
    }
    friend SeriesMatrix operator*(const Rational& v, const SeriesMatrix& m) {
        return {v * m.e_[0], v * m.e_[1], v * m.e_[2], v * m.e_[3]};
    }
    friend SeriesMatrix operator*(const SeriesMatrix& x, const SeriesMatrix& y) {
        return {x.e_[0] * y.e_[0] + x.e_[1] * y.e_[2], x.e_[0] * y.e_[1] + x.e_[1] * y.e_[3],
                x.e_[2] * y.e_[0] + x.e_[3] * y.e_[2], x.e_[2] * y.e_[1] + x.e_[3] * y.e_[3]};
    }

    std::pair<TruncatedSeries, TruncatedSeries> apply(const TruncatedSeries& f, const TruncatedSeries& g) const {
        return {e_[0] * f + e_[1] * g, e_[2] * f + e_[3] * g};
    }

    friend bool operator==(const SeriesMatrix&, const SeriesMatrix&) = default;

private:
    std::array<TruncatedSeries, 4> e_;
};

/// M_0 = (A_0 + B_0) / 2 and M_1 = (A_1 + B_1) / 2.
inline SeriesMatrix moment_matrix(unsigned bit, std::size_t order) {
    const auto C = TruncatedSeries::cosh(order);
    const auto S = TruncatedSeries::sinh(order);
    const Rational half(1, 2);
    if (bit == 0) {
        SeriesMatrix A0(C, S, -C, -S);
        return half * (A0 + SeriesMatrix::constant(order, 1, 1, 1, 1));
    }
    if (bit == 1) {
        SeriesMatrix A1(C, S, C, S);
        return half * (A1 + SeriesMatrix::constant(order, 1, -1, -1, 1));
    }
    throw std::invalid_argument("moment_matrix: bit must be 0 or 1");
}

/// M_1(x) = e^x / (2 - e^-x), the moment generating function of delta(., 1).
inline TruncatedSeries base_series_M1(std::size_t order) {
    const auto denom = TruncatedSeries::constant(order, 2) - TruncatedSeries::exp(order, -1);
    return TruncatedSeries::exp(order) * denom.inverse();
}

/// [x^k] 1 / (2 - e^x), i.e. the ordered Bell number of k divided by k!.
inline Rational fubini_coeff(std::size_t k) {
    const auto denom = TruncatedSeries::constant(k, 2) - TruncatedSeries::exp(k);
    return denom.inverse()[k];
}

/// M_bit^m from its closed form
///   2 M_0^m = q A_0 + B_0 + e^x / (2 - e^-x) (1 - q) D_0,   q = (e^-x / 2)^(m-1)
/// and the mirrored form for M_1.
inline SeriesMatrix block_matrix_power(unsigned bit, unsigned m, std::size_t order) {
    if (m == 0) throw std::invalid_argument("block_matrix_power: block length must be >= 1");
    if (bit > 1) throw std::invalid_argument("block_matrix_power: bit must be 0 or 1");
    const auto C = TruncatedSeries::cosh(order);
    const auto S = TruncatedSeries::sinh(order);
    const Rational sgn = bit == 0 ? -1 : 1;
    const auto q = TruncatedSeries::exp(order, sgn * (m - 1)) * Dyadic::pow2(-static_cast<std::int64_t>(m - 1)).to_rational();
    const auto one = TruncatedSeries::constant(order, 1);
    const auto geo = TruncatedSeries::exp(order, -sgn) * (TruncatedSeries::constant(order, 2) - TruncatedSeries::exp(order, sgn)).inverse();
    const auto w = geo * (one - q);

    SeriesMatrix A = bit == 0 ? SeriesMatrix(C, S, -C, -S) : SeriesMatrix(C, S, C, S);
    SeriesMatrix B = bit == 0 ? SeriesMatrix::constant(order, 1, 1, 1, 1) : SeriesMatrix::constant(order, 1, -1, -1, 1);
    SeriesMatrix D = bit == 0 ? SeriesMatrix::constant(order, 1, 1, -1, -1) : SeriesMatrix::constant(order, 1, -1, 1, -1);
    return Rational(1, 2) * (q * A + B + w * D);
}

/// Generating functions (F_t, G_t) of a_k(t) and b_k(t).
struct MomentState {
    TruncatedSeries F;
    TruncatedSeries G;

    friend bool operator==(const MomentState&, const MomentState&) = default;
};

/// (F_0, G_0) = (1 + M_1(x), 1 - M_1(x)).
inline MomentState moment_state_initial(std::size_t order) {
    const auto m1 = base_series_M1(order);
    const auto one = TruncatedSeries::constant(order, 1);
    return {one + m1, one - m1};
}

/// Applies M_bit. With P = C F + S G both matrices reduce to
///   M_0: ((F + G + P) / 2, (F + G - P) / 2),  M_1: ((P + F - G) / 2, (P - F + G) / 2).
inline MomentState moment_state_append(const MomentState& s, unsigned bit) {
    const std::size_t order = s.F.order();
    TruncatedSeries P(order);
    for (std::size_t i = 0; i <= order; ++i) {
        // 1 / i! sits on F for even i (cosh) and on G for odd i (sinh)
        Rational inv_fact = 1;
        for (std::size_t l = 2; l <= i; ++l) inv_fact /= static_cast<long>(l);
        const TruncatedSeries& src = (i % 2 == 0) ? s.F : s.G;
        for (std::size_t k = i; k <= order; ++k) {
            if (!src[k - i].is_zero()) P[k] += inv_fact * src[k - i];
        }
    }
    const Rational half(1, 2);
    if (bit == 0) {
        auto sum = s.F + s.G;
        return {(sum + P) * half, (sum - P) * half};
    }
    auto diff = s.F - s.G;
    return {(P + diff) * half, (P - diff) * half};
}

inline MomentState fg_for(std::uint64_t t, std::size_t order) {
    MomentState s = moment_state_initial(order);
    for (int i = static_cast<int>(bit_length(t)) - 1; i >= 0; --i) s = moment_state_append(s, static_cast<unsigned>((t >> i) & 1));
    return s;
}

/// m_k(t) = (a_k(t) + b_k(t)) / 2, the k-th moment of delta(., t) divided by k!.
inline Rational moment(std::uint64_t t, std::size_t k) {
    const auto s = fg_for(t, k);
    return (s.F[k] + s.G[k]) / 2;
}

/// m_0(t), ..., m_kmax(t).
inline std::vector<Rational> moments(const MomentState& s) {
    std::vector<Rational> m(s.F.order() + 1);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = (s.F[k] + s.G[k]) / 2;
    return m;
}

/// Visits (t, F_t, G_t) for every 0 <= t < 2^bits, each state derived from its parent.
inline void for_each_moment_state(unsigned bits, std::size_t order, const std::function<void(std::uint64_t, const MomentState&)>& visit) {
    if (bits > 40) throw std::invalid_argument("for_each_moment_state: too many bits");
    const auto root = moment_state_initial(order);
    visit(0, root);
    if (bits == 0) return;
    std::function<void(std::uint64_t, const MomentState&, unsigned)> dfs = [&](std::uint64_t t, const MomentState& s, unsigned depth) {
        visit(t, s);
        if (depth == bits) return;
        dfs(2 * t, moment_state_append(s, 0), depth + 1);
        dfs(2 * t + 1, moment_state_append(s, 1), depth + 1);
    };
    dfs(1, moment_state_append(root, 1), 1);
}

/// m_2(t) = sum_i e_i - sum_{i<j} e_i e_j 2^(i-j) over the binary digits e_i of t.
inline Rational m2_exact(std::uint64_t t) {
    Dyadic sum(static_cast<long long>(sum_of_digits(t)));
    for (unsigned i = 0; i < 64; ++i) {
        if (!((t >> i) & 1)) continue;
        for (unsigned j = i + 1; j < 64; ++j) {
            if ((t >> j) & 1) sum -= Dyadic::pow2(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));
        }
    }
    return sum.to_rational();
}

/// CSV rows "t,k,num,den" for m_0(t) .. m_kmax(t).
inline void write_moments_csv(std::ostream& out, const std::vector<std::uint64_t>& ts, std::size_t kmax, bool header = true) {
    if (header) out << "t,k,num,den\n";
    for (auto t : ts) {
        const auto m = moments(fg_for(t, kmax));
        for (std::size_t k = 0; k < m.size(); ++k) {
            out << t << ',' << k << ',' << boost::multiprecision::numerator(m[k]) << ',' << boost::multiprecision::denominator(m[k]) << '\n';
        }
    }
}

}  // namespace cusick
