#pragma once

// The characteristic function gamma_t(theta) = sum_j delta(j, t) e(j theta), e(x) = exp(2 pi i x),
// its bounds, and the integral representation
//   c_t = 1/2 + delta(0, t) / 2 + (1/2) int_0^1 Im gamma_t(theta) cot(pi theta) d theta.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cusick/carrydist.hpp"
#include "cusick/series.hpp"

namespace cusick {

using Complex = std::complex<double>;

/// e(x) = exp(2 pi i x).
inline Complex unit(double x) {
    const double a = 2 * std::numbers::pi * x;
    return {std::cos(a), std::sin(a)};
}

/// Distance to the nearest integer.
inline double dist_to_int(double x) {
    const double f = x - std::floor(x);
    return std::min(f, 1 - f);
}

/// gamma_t(theta) = (1 0) A(e_0) ... A(e_nu) (1, u)^T with u = e(theta) / (2 - e(-theta)),
/// A(0) = [[1, 0], [e/2, conj(e)/2]], A(1) = [[e/2, conj(e)/2], [0, 1]].
inline Complex gamma_matrix(std::uint64_t t, double theta) {
    const Complex e = unit(theta);
    const Complex half_e = e / 2.0;
    const Complex half_ec = std::conj(e) / 2.0;
    // (v0, v1) = (gamma_a, gamma_(a+1)) while the prefix a grows from the top bit down
    Complex v0 = 1.0;
    Complex v1 = e / (2.0 - std::conj(e));
    for (int i = static_cast<int>(bit_length(t)) - 1; i >= 0; --i) {
        const Complex mix = half_e * v0 + half_ec * v1;
        if ((t >> i) & 1) {
            v0 = mix;
        } else {
            v1 = mix;
        }
    }
    return v0;
}

/// gamma from an explicit distribution; the tail sum_{j < j_min} c 2^j e(j theta) in closed form.
inline Complex gamma_from_dist(const CarryDistribution& d, double theta) {
    Complex sum = 0.0;
    const auto support = d.support();
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (!support[i].is_zero()) sum += support[i].to_double() * unit(static_cast<double>(d.j_min() + static_cast<std::int64_t>(i)) * theta);
    }
    if (!d.tail_coeff().is_zero()) {
        const Complex q = std::conj(unit(theta)) / 2.0;
        sum += d.tail_coeff().scaled2(d.j_min()).to_double() * unit(static_cast<double>(d.j_min()) * theta) * q / (1.0 - q);
    }
    return sum;
}

namespace detail {

/// Pairwise (cascade) summation; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

/// f evaluated at the given nodes, split across threads.
inline std::vector<double> evaluate(const std::function<double(double)>& f, const std::vector<double>& nodes, unsigned threads) {
    std::vector<double> out(nodes.size());
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(nodes.size() / 1024 + 1)));
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = f(nodes[i]);
    };
    if (threads == 1) {
        work(0, nodes.size());
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (nodes.size() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(nodes.size(), lo + chunk);
        if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
    return out;
}

/// int_0^(1/2) f with f(0+) = limit: composite midpoint on [d0, 1/2] with d0 = 1 / (8 points),
/// plus limit * d0 for [0, d0].
inline double half_period_integral(const std::function<double(double)>& f, double limit, unsigned points, unsigned threads) {
    if (points < 16) throw std::invalid_argument("quadrature needs at least 16 points");
    const double d0 = 1.0 / (8.0 * points);
    const double h = (0.5 - d0) / points;
    std::vector<double> nodes(points);
    for (unsigned i = 0; i < points; ++i) nodes[i] = d0 + (i + 0.5) * h;
    const auto vals = evaluate(f, nodes, threads);
    return pairwise_sum(vals) * h + limit * d0;
}

/// int_0^1 f by plain midpoint over the whole period (f(0+) = f(1-) = limit never sampled).
inline double full_period_integral(const std::function<double(double)>& f, unsigned points, unsigned threads) {
    if (points < 16) throw std::invalid_argument("quadrature needs at least 16 points");
    const double h = 1.0 / points;
    std::vector<double> nodes(points);
    for (unsigned i = 0; i < points; ++i) nodes[i] = (i + 0.5) * h;
    return pairwise_sum(evaluate(f, nodes, threads)) * h;
}

}  // namespace detail

/// delta(0, t) = int_0^1 Re gamma_t, using the even symmetry of Re gamma.
inline double delta0_integral(std::uint64_t t, unsigned points, unsigned threads = 1) {
    const auto f = [t](double th) { return gamma_matrix(t, th).real(); };
    return 2 * detail::half_period_integral(f, 1.0, points, threads);
}

/// c_t = 1/2 + delta(0, t) / 2 + int_0^(1/2) Im gamma_t(theta) cot(pi theta) d theta.
/// The integrand tends to 0 as theta -> 0 since Im gamma_t = O(theta^3).
inline double ct_integral(std::uint64_t t, unsigned points, unsigned threads = 1) {
    const auto f = [t](double th) { return gamma_matrix(t, th).imag() / std::tan(std::numbers::pi * th); };
    const double im = detail::half_period_integral(f, 0.0, points, threads);
    return 0.5 + delta0_integral(t, points, threads) / 2 + im;
}

/// The same representation with both integrals taken over the whole period [0, 1].
inline double ct_integral_full(std::uint64_t t, unsigned points, unsigned threads = 1) {
    const auto re = [t](double th) { return gamma_matrix(t, th).real(); };
    const auto im = [t](double th) { return gamma_matrix(t, th).imag() / std::tan(std::numbers::pi * th); };
    return 0.5 + detail::full_period_integral(re, points, threads) / 2 + detail::full_period_integral(im, points, threads) / 2;
}

/// int_0^1 sin(2 pi k theta) cot(pi theta) d theta, which equals 1 for k >= 1.
inline double integral_identity_check(unsigned k, unsigned points) {
    if (k == 0) return 0.0;
    const auto f = [k](double th) { return std::sin(2 * std::numbers::pi * k * th) / std::tan(std::numbers::pi * th); };
    // the integrand tends to 2k at 0
    return 2 * detail::half_period_integral(f, 2.0 * k, points, 1);
}

struct BoundResult {
    double value = 0;  // left-hand side
    double bound = 0;  // right-hand side
    bool holds = false;
};

/// |gamma_t(theta)| <= (1 - ||theta||^2 / 2)^M with M = floor((r - 1) / 4); vacuous when M = 0.
inline BoundResult muntjak_check(std::uint64_t t, double theta) {
    if (t == 0) throw std::invalid_argument("muntjak_check: t must be >= 1");
    const unsigned r = blocks_count(t);
    const unsigned M = (r - 1) / 4;
    const double n = dist_to_int(theta);
    BoundResult res;
    res.value = std::abs(gamma_matrix(t, theta));
    res.bound = std::pow(1 - n * n / 2, static_cast<double>(M));
    res.holds = M == 0 || res.value <= res.bound + 1e-12;
    return res;
}

/// |Im gamma_t(theta)| <= sum_{k<K} (2 pi theta)^(2k+1) |m_2k+1|
///                        + (2 pi theta)^(2K+1) sqrt((2K)! (2K+2)!) / (2K+1)! sqrt(m_2K m_2K+2).
inline BoundResult imagpart_bound_check(std::uint64_t t, double theta, unsigned K) {
    if (K == 0) throw std::invalid_argument("imagpart_bound_check: K must be >= 1");
    const auto m = moments(fg_for(t, 2 * K + 2));
    const double x = 2 * std::numbers::pi * theta;
    double bound = 0;
    for (unsigned k = 0; k < K; ++k) bound += std::pow(x, 2 * k + 1) * std::abs(m[2 * k + 1].convert_to<double>());
    // sqrt((2K)! (2K+2)!) / (2K+1)! = sqrt((2K+2) / (2K+1))
    const double fact = std::sqrt((2.0 * K + 2) / (2.0 * K + 1));
    bound += std::pow(x, 2 * K + 1) * fact * std::sqrt(m[2 * K].convert_to<double>() * m[2 * K + 2].convert_to<double>());
    BoundResult res;
    res.value = std::abs(gamma_matrix(t, theta).imag());
    res.bound = bound;
    res.holds = res.value <= bound + 1e-10;
    return res;
}

/// CSV rows "t,theta,re,im,bound,pass" with the block bound of muntjak_check.
inline void write_charfn_csv(std::ostream& out, std::uint64_t t, const std::vector<double>& thetas, bool header = true) {
    if (header) out << "t,theta,re,im,bound,pass\n";
    const auto old = out.precision(17);
    for (double th : thetas) {
        const Complex g = gamma_matrix(t, th);
        const auto b = t == 0 ? BoundResult{1, 1, true} : muntjak_check(t, th);
        out << t << ',' << th << ',' << g.real() << ',' << g.imag() << ',' << b.bound << ',' << (b.holds ? "true" : "false") << '\n';
    }
    out.precision(old);
}

}  // namespace cusick
