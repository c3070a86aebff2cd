#pragma once

// Brute-force ground truth for delta(j, t) and c_t.
//
// Every n decomposes as n = q 2^m + u with u < 2^m. If u + t < 2^m the low part
// decides s(n+t) - s(n) alone. Otherwise a carry enters q, contributing
// s(q+1) - s(q) = 1 - nu_2(q+1), and nu_2(q+1) = k has density 2^-(k+1).

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cusick/carrydist.hpp"
#include "cusick/dyadic.hpp"

namespace cusick::oracle {

enum class Method { exact_residue, empirical };

constexpr std::string_view to_string(Method m) noexcept {
    return m == Method::exact_residue ? "exact_residue" : "empirical";
}

struct OracleResult {
    Dyadic value;
    unsigned modulus_bits = 0;
    Method method = Method::exact_residue;
    std::uint64_t samples = 0;  // only for empirical results
};

inline constexpr unsigned kMaxModulusBits = 40;

/// Smallest valid enumeration modulus exponent: bitlen(t) + 2.
constexpr unsigned default_modulus_bits(std::uint64_t t) noexcept { return bit_length(t) + 2; }

namespace detail {

inline void check_modulus(std::uint64_t t, unsigned m) {
    if (m > kMaxModulusBits) throw std::invalid_argument("oracle: modulus exponent too large");
    if ((std::uint64_t{1} << m) <= t) throw std::invalid_argument("oracle: need 2^m > t");
}

/// sum_k counts[k] 2^-(k + base)
inline Dyadic weighted_count(const std::vector<std::uint64_t>& counts, unsigned base) {
    Dyadic sum;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] != 0) sum += Dyadic(BigInt(counts[k]), k + base);
    }
    return sum;
}

}  // namespace detail

inline Dyadic exact_delta(std::uint64_t t, std::int64_t j, unsigned m) {
    detail::check_modulus(t, m);
    const std::uint64_t size = std::uint64_t{1} << m;
    // hits[0] counts carry-free residues; hits[k + 1] counts carries with nu_2(q+1) = k
    std::vector<std::uint64_t> hits(2 * m + 4 + static_cast<std::size_t>(j < 0 ? -j : 0), 0);
    for (std::uint64_t u = 0; u < size; ++u) {
        const std::int64_t su = sum_of_digits(u);
        if (u + t < size) {
            if (static_cast<std::int64_t>(sum_of_digits(u + t)) - su == j) ++hits[0];
        } else {
            const std::int64_t k = static_cast<std::int64_t>(sum_of_digits(u + t - size)) - su + 1 - j;
            if (k >= 0) ++hits[static_cast<std::size_t>(k + 1)];
        }
    }
    return detail::weighted_count(hits, m);
}

inline Dyadic exact_c(std::uint64_t t, unsigned m) {
    detail::check_modulus(t, m);
    const std::uint64_t size = std::uint64_t{1} << m;
    // carry case with D = s(w) - s(u): sum_{k=0}^{D+1} 2^-(k+1) = 1 - 2^-(D+2)
    std::uint64_t whole = 0;
    std::vector<std::uint64_t> deficit(m + 3, 0);
    for (std::uint64_t u = 0; u < size; ++u) {
        const std::int64_t su = sum_of_digits(u);
        if (u + t < size) {
            if (static_cast<std::int64_t>(sum_of_digits(u + t)) >= su) ++whole;
        } else {
            const std::int64_t d = static_cast<std::int64_t>(sum_of_digits(u + t - size)) - su;
            if (d + 1 >= 0) {
                ++whole;
                ++deficit[static_cast<std::size_t>(d + 2)];
            }
        }
    }
    return Dyadic(BigInt(whole), m) - detail::weighted_count(deficit, m);
}

/// |{0 <= n < N : s(n+t) - s(n) = j}| / N for N a power of two.
inline Dyadic empirical_delta(std::uint64_t t, std::int64_t j, std::uint64_t samples) {
    if (samples == 0 || (samples & (samples - 1)) != 0) {
        throw std::invalid_argument("empirical_delta: sample bound must be a power of two");
    }
    std::uint64_t hits = 0;
    for (std::uint64_t n = 0; n < samples; ++n) {
        if (static_cast<std::int64_t>(sum_of_digits(n + t)) - static_cast<std::int64_t>(sum_of_digits(n)) == j) ++hits;
    }
    return Dyadic(BigInt(hits), static_cast<std::uint64_t>(std::countr_zero(samples)));
}

inline OracleResult exact_delta_result(std::uint64_t t, std::int64_t j, unsigned m) {
    return {exact_delta(t, j, m), m, Method::exact_residue, 0};
}

inline OracleResult empirical_delta_result(std::uint64_t t, std::int64_t j, std::uint64_t samples) {
    return {empirical_delta(t, j, samples), static_cast<unsigned>(std::countr_zero(samples)), Method::empirical, samples};
}

}  // namespace cusick::oracle
