#pragma once

// The carry distribution delta(j, t) = dens{n : s(n+t) - s(n) = j}.

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cusick/dyadic.hpp"

namespace cusick {

/// Binary sum of digits.
constexpr unsigned sum_of_digits(std::uint64_t n) noexcept { return static_cast<unsigned>(std::popcount(n)); }

/// Number of binary digits of t (0 for t = 0).
constexpr unsigned bit_length(std::uint64_t t) noexcept { return static_cast<unsigned>(std::bit_width(t)); }

/// Number of maximal runs of 1s in the binary expansion of t.
constexpr unsigned ones_blocks(std::uint64_t t) noexcept {
    // a run starts at every 1 whose lower neighbour is 0
    return static_cast<unsigned>(std::popcount(t & ~(t << 1)));
}

/// Blocks of 1s plus blocks of 0s of t / 2^nu_2(t); always 2 * ones_blocks(t) - 1 for t >= 1.
constexpr unsigned blocks_count(std::uint64_t t) noexcept {
    if (t == 0) return 0;
    const std::uint64_t odd = t >> std::countr_zero(t);
    // each bit change inside the odd part opens a new block
    return 1 + static_cast<unsigned>(std::popcount((odd ^ (odd >> 1)) & ((std::uint64_t{1} << (bit_length(odd) - 1)) - 1)));
}

/// The integer whose binary expansion is that of t read backwards.
inline std::uint64_t reverse_binary(std::uint64_t t) {
    if (t == 0) throw std::invalid_argument("reverse_binary: t must be positive");
    std::uint64_t r = 0;
    for (; t != 0; t >>= 1) r = (r << 1) | (t & 1);
    return r;
}

/// delta(., t) as a dense support window [j_min, j_max] plus a geometric lower tail
/// delta(j) = tail_coeff * 2^j for all j < j_min.
///
/// Canonical form: the top support entry is nonzero (or the support is the single
/// entry at j_min), and j_min is the largest index with a geometric law below it.
/// Two distributions compare equal iff they describe the same function of j.
class CarryDistribution {
public:
    CarryDistribution() : support_{Dyadic(1)} {}

    /// delta(., 0): point mass at 0.
    static CarryDistribution point_mass() { return CarryDistribution(); }

    /// delta(j, 1) = 2^(j-2) for j <= 1.
    static CarryDistribution geometric() {
        CarryDistribution d;
        d.j_min_ = 1;
        d.support_ = {Dyadic::pow2(-1)};
        d.tail_coeff_ = Dyadic::pow2(-2);
        d.t_bits_ = 1;
        return d;
    }

    /// The law of (1/2) delta(j-1, lo) + (1/2) delta(j+1, hi).
    static CarryDistribution mixture(const CarryDistribution& lo, const CarryDistribution& hi, unsigned t_bits) {
        CarryDistribution out;
        out.t_bits_ = t_bits;
        // below both shifted windows the two geometric tails add up
        out.j_min_ = std::min(lo.j_min_ + 1, hi.j_min_ - 1);
        const std::int64_t j_max = std::max(lo.j_max() + 1, hi.j_max() - 1);
        out.support_.clear();
        out.support_.reserve(static_cast<std::size_t>(j_max - out.j_min_ + 1));
        for (std::int64_t j = out.j_min_; j <= j_max; ++j) {
            Dyadic v = lo.at(j - 1);
            v += hi.at(j + 1);
            v.scale2(-1);
            out.support_.push_back(std::move(v));
        }
        // (1/2) c_lo 2^(j-1) + (1/2) c_hi 2^(j+1) = (c_lo / 4 + c_hi) 2^j
        out.tail_coeff_ = lo.tail_coeff_.scaled2(-2);
        out.tail_coeff_ += hi.tail_coeff_;
        out.canonicalize();
        return out;
    }

    std::int64_t j_min() const noexcept { return j_min_; }
    std::int64_t j_max() const noexcept { return j_min_ + static_cast<std::int64_t>(support_.size()) - 1; }
    const Dyadic& tail_coeff() const noexcept { return tail_coeff_; }
    std::span<const Dyadic> support() const noexcept { return support_; }
    unsigned t_bits() const noexcept { return t_bits_; }

    /// delta(j); the tail law below j_min, zero above j_max.
    Dyadic at(std::int64_t j) const {
        if (j > j_max()) return Dyadic();
        if (j >= j_min_) return support_[static_cast<std::size_t>(j - j_min_)];
        return tail_coeff_.scaled2(j);
    }

    /// Sum of delta(j) over j >= j0.
    Dyadic mass_at_or_above(std::int64_t j0) const {
        Dyadic sum;
        for (std::int64_t j = std::max(j0, j_min_); j <= j_max(); ++j) sum += support_[static_cast<std::size_t>(j - j_min_)];
        if (j0 < j_min_) {
            // c (2^j_min - 2^j0)
            sum += tail_coeff_.scaled2(j_min_);
            sum -= tail_coeff_.scaled2(j0);
        }
        return sum;
    }

    Dyadic total_mass() const {
        Dyadic sum = tail_coeff_.scaled2(j_min_);
        for (const auto& v : support_) sum += v;
        return sum;
    }

    friend bool operator==(const CarryDistribution& a, const CarryDistribution& b) {
        return a.j_min_ == b.j_min_ && a.tail_coeff_ == b.tail_coeff_ && a.support_ == b.support_;
    }

    /// Builds from raw parts (used by deserialization); canonicalizes.
    static CarryDistribution from_parts(std::int64_t j_min, std::vector<Dyadic> support, Dyadic tail_coeff, unsigned t_bits) {
        if (support.empty()) throw std::invalid_argument("CarryDistribution: empty support");
        CarryDistribution d;
        d.j_min_ = j_min;
        d.support_ = std::move(support);
        d.tail_coeff_ = std::move(tail_coeff);
        d.t_bits_ = t_bits;
        d.canonicalize();
        return d;
    }

private:
    void canonicalize() {
        while (support_.size() > 1 && support_.back().is_zero()) support_.pop_back();
        std::size_t absorbed = 0;
        while (support_.size() - absorbed > 1 && support_[absorbed] == tail_coeff_.scaled2(j_min_ + static_cast<std::int64_t>(absorbed))) {
            ++absorbed;
        }
        if (absorbed > 0) {
            support_.erase(support_.begin(), support_.begin() + static_cast<std::ptrdiff_t>(absorbed));
            j_min_ += static_cast<std::int64_t>(absorbed);
        }
    }

    std::int64_t j_min_ = 0;
    std::vector<Dyadic> support_;
    Dyadic tail_coeff_;
    unsigned t_bits_ = 0;
};

/// The coupled pair (delta(., a), delta(., a + 1)).
struct DistPair {
    CarryDistribution lo;
    CarryDistribution hi;
    std::uint64_t prefix = 0;
};

inline DistPair pair_initial() { return {CarryDistribution::point_mass(), CarryDistribution::geometric(), 0}; }

/// Moves from prefix a to 2a + bit.
inline DistPair pair_append_bit(const DistPair& p, unsigned bit) {
    if (bit > 1) throw std::invalid_argument("pair_append_bit: bit must be 0 or 1");
    if (p.prefix >> 63) throw std::overflow_error("pair_append_bit: prefix exceeds 64 bits");
    const std::uint64_t next = 2 * p.prefix + bit;
    auto mix = CarryDistribution::mixture(p.lo, p.hi, bit_length(2 * p.prefix + 1));
    if (bit == 0) return {p.lo, std::move(mix), next};
    return {std::move(mix), p.hi, next};
}

inline CarryDistribution dist_for(std::uint64_t t) {
    CarryDistribution lo = CarryDistribution::point_mass();
    CarryDistribution hi = CarryDistribution::geometric();
    for (int i = static_cast<int>(bit_length(t)) - 1; i >= 0; --i) {
        auto mix = CarryDistribution::mixture(lo, hi, bit_length((t >> i) | 1));
        if ((t >> i) & 1) {
            lo = std::move(mix);
        } else {
            hi = std::move(mix);
        }
    }
    return lo;
}

inline Dyadic delta_at(const CarryDistribution& d, std::int64_t j) { return d.at(j); }

/// c_t = sum_{j >= 0} delta(j, t).
inline Dyadic c_value(const CarryDistribution& d) { return d.mass_at_or_above(0); }

namespace detail {

/// T_m = sum_{i >= 1} i^m 2^-i (T_0 = 1, T_1 = 2, T_2 = 6, T_3 = 26, ...).
inline std::vector<BigInt> weighted_geometric_sums(unsigned kmax) {
    std::vector<BigInt> T(kmax + 1);
    std::vector<std::vector<BigInt>> binom(kmax + 1);
    for (unsigned n = 0; n <= kmax; ++n) {
        binom[n].assign(n + 1, BigInt(1));
        for (unsigned k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
    }
    T[0] = 1;
    for (unsigned m = 1; m <= kmax; ++m) {
        BigInt s = 2;
        for (unsigned l = 1; l < m; ++l) s += binom[m][l] * T[l];
        T[m] = s;
    }
    return T;
}

}  // namespace detail

/// Raw moment sum_j delta(j, t) j^k, exact (the geometric tail in closed form).
inline Dyadic raw_moment(const CarryDistribution& d, unsigned k) {
    using boost::multiprecision::pow;
    Dyadic sum;
    for (std::int64_t j = d.j_min(); j <= d.j_max(); ++j) {
        const auto& v = d.support()[static_cast<std::size_t>(j - d.j_min())];
        if (v.is_zero()) continue;
        sum += v * Dyadic(pow(BigInt(j), k), 0);
    }
    if (d.tail_coeff().is_zero()) return sum;

    // sum_{i >= 1} 2^-i (j_min - i)^k = sum_m C(k, m) j_min^(k-m) (-1)^m T_m
    const auto T = detail::weighted_geometric_sums(k);
    BigInt acc = 0;
    BigInt binom = 1;
    const BigInt jm = d.j_min();
    for (unsigned m = 0; m <= k; ++m) {
        BigInt term = binom * pow(jm, k - m) * T[m];
        acc += (m % 2 == 0) ? term : BigInt(-term);
        binom = binom * (k - m) / (m + 1);
    }
    return sum + d.tail_coeff().scaled2(d.j_min()) * Dyadic(std::move(acc), 0);
}

}  // namespace cusick
