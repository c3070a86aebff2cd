// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "cusick/cusick.hpp"

using namespace cusick;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail = {}) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
}

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
    std::string str() const {
        std::ostringstream s;
        s.precision(3);
        s << seconds() << " s";
        return s.str();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

unsigned threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n ? n : 1;
}

Rational factorial(unsigned n) {
    Rational f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

Rational inv_log2_lower_pow(unsigned k) {
    Rational p = 1;
    const Rational inv = Log2Bracket{}.inv_lower();
    for (unsigned i = 0; i < k; ++i) p *= inv;
    return p;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

void criterion1() {
    const auto d = dist_for(1);
    const bool ok = c_value(d) == Dyadic::parse("3/2^2") && delta_at(d, 1) == Dyadic::parse("1/2^1") &&
                    delta_at(d, 0) == Dyadic::parse("1/2^2") && delta_at(d, -1) == Dyadic::parse("1/2^3");
    report(1, ok, "c_1 = 3/4 and delta(1,1), delta(0,1), delta(-1,1) = 1/2, 1/4, 1/8", "c_1 = " + c_value(d).to_string());
}

void criterion2() {
    const std::uint64_t t = 0b111101111011110111101111011111;
    const auto expected = Dyadic::parse("18169025645289/2^45");
    const auto c = c_value(dist_for(t));
    const auto cr = c_value(dist_for(reverse_binary(t)));
    report(2, c == expected && cr == expected, "minimizer c_t = 18169025645289/2^45, also for t^R",
           "c_t = " + c.to_string() + " ~ " + c.to_decimal(6));
}

void criterion3() {
    Stopwatch sw;
    const unsigned bits = 20;
    const auto violations = verify_conjecture_range(bits, ScanMode::exact, threads());
    ScanConfig cfg;
    cfg.bits = bits;
    cfg.threads = threads();
    const auto scan = scan_min_ct(cfg);

    // naive: every t from scratch
    Dyadic min;
    std::vector<std::uint64_t> argmin;
    for (std::uint64_t t = 1; t < (std::uint64_t{1} << bits); ++t) {
        const auto c = c_value(dist_for(t));
        if (argmin.empty() || c < min) {
            min = c;
            argmin = {t};
        } else if (c == min) {
            argmin.push_back(t);
        }
    }
    const bool ok = violations == 0 && scan.min_ct == min && scan.argmin == argmin;
    report(3, ok, "no violations below 2^20 and the scan argmin matches naive recomputation",
           std::to_string(violations) + " violations, min " + scan.min_ct.to_string() + ", " + sw.str());
}

void criterion4() {
    std::size_t bad = 0;
    for (std::uint64_t t = 0; t < 256; ++t) {
        const auto d = dist_for(t);
        const unsigned m = oracle::default_modulus_bits(t);
        for (std::int64_t j = -12; j <= 10; ++j) bad += oracle::exact_delta(t, j, m) != delta_at(d, j);
    }
    report(4, bad == 0, "exact_delta equals delta_at for t < 256, j in [-12, 10]", std::to_string(bad) + " mismatches");
}

void criterion5() {
    std::size_t bad = 0;
    for (std::uint64_t t = 0; t < 512; ++t) {
        const auto d = dist_for(t);
        const auto m = moments(fg_for(t, 8));
        for (unsigned k = 0; k <= 8; ++k) bad += factorial(k) * m[k] != raw_moment(d, k).to_rational();
    }
    for (std::uint64_t t = 0; t < 4096; ++t) bad += moment(t, 2) != m2_exact(t);
    report(5, bad == 0, "k! m_k(t) = raw moments for t < 2^9, k <= 8; m_2 closed form for t < 2^12", std::to_string(bad) + " mismatches");
}

void criterion6() {
    std::size_t bad = 0;
    const auto m1 = base_series_M1(4);
    const Rational want[] = {1, 0, 1, -1, Rational(19, 12)};
    for (unsigned k = 0; k <= 4; ++k) bad += m1[k] != want[k];
    for (unsigned bit = 0; bit <= 1; ++bit) {
        const auto M = moment_matrix(bit, 12);
        SeriesMatrix P = M;
        for (unsigned m = 1; m <= 20; ++m) {
            if (m > 1) P = P * M;
            bad += block_matrix_power(bit, m, 12) != P;
        }
    }
    for (unsigned m = 1; m <= 16; ++m) {
        const Rational p(1, BigInt(1) << m);
        const Rational num = 1 - p;
        for (unsigned bit = 0; bit <= 1; ++bit) {
            const auto P = block_matrix_power(bit, m, 4);
            const Rational sign = bit == 0 ? 1 : -1;
            bad += P(0, 0)[0] != 1;
            bad += P(0, 0)[1] != 0;
            bad += P(0, 0)[2] != num / 2;
            bad += P(0, 1)[0] != sign * num;
            bad += P(1, 0)[0] != 0;
            bad += P(1, 0)[1] != 0;
            bad += P(1, 0)[2] != -sign * num / 2;
            bad += P(1, 1)[0] != p;
        }
    }
    report(6, bad == 0, "M_1 coefficients, block powers against iterated products, low-order coefficients", std::to_string(bad) + " mismatches");
}

void criterion7() {
    Stopwatch sw;
    std::size_t higher = 0, fubini = 0, bf = 0, cheb = 0, moment_bounds = 0, even = 0, appended = 0;
    for (unsigned bit = 0; bit <= 1; ++bit) {
        for (unsigned m = 1; m <= 64; ++m) {
            const auto P = block_matrix_power(bit, m, 12);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    for (unsigned k = 1; k <= 12; ++k) higher += abs(P(r, c)[k]) > 2 * inv_log2_lower_pow(k);
        }
    }
    for (unsigned k = 0; k <= 30; ++k) fubini += fubini_coeff(k) > inv_log2_lower_pow(k);
    for (std::uint64_t t = 1; t < (1u << 16); ++t) bf += !bejian_faure_check(t);
    for (std::uint64_t t = 1; t < (1u << 12); ++t) cheb += !chebyshev_check(t).holds;
    const auto ledger = build_ledger(4);
    for (std::uint64_t t = 1; t < (1u << 14); ++t) {
        if (!verify_moment_bounds(t, 4, ledger).all_hold()) {
            ++moment_bounds;
            even += t % 2 == 0;
        }
        appended += !verify_moment_bounds(t, 4, ledger, BlockCount::appended).all_hold();
    }
    const std::size_t total = higher + fubini + bf + cheb + moment_bounds;
    report(7, total == 0, "higher coefficients, Fubini bound, Bejian-Faure, shifted Chebyshev, moment bounds",
           "failures " + std::to_string(higher) + "/" + std::to_string(fubini) + "/" + std::to_string(bf) + "/" + std::to_string(cheb) + "/" +
               std::to_string(moment_bounds) + "; moment-bound failures at even t: " + std::to_string(even) +
               ", with the lowest 0 block counted: " + std::to_string(appended) + ", " + sw.str());
}

void criterion8() {
    std::mt19937_64 rng(8);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t t = rng() & 0xffff;
        worst = std::max(worst, std::abs(ct_integral(t, 1u << 14, threads()) - c_value(dist_for(t)).to_double()));
    }
    double worst_id = 0;
    for (unsigned k = 1; k <= 10; ++k) worst_id = std::max(worst_id, std::abs(integral_identity_check(k, 1u << 14) - 1));
    std::ostringstream d;
    d << "max error " << worst << ", identity error " << worst_id;
    report(8, worst <= 1e-6 && worst_id <= 1e-7, "integral representation of c_t and the integral identity", d.str());
}

void criterion9() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0, 1), V(0, 0.1);
    std::size_t bad = 0;
    int tested = 0;
    while (tested < 500) {
        const std::uint64_t t = rng() & 0xffffff;
        if (blocks_count(t) < 5) continue;
        ++tested;
        bad += !muntjak_check(t, U(rng)).holds;
    }
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t t = rng() & 0xfff;
        const unsigned K = 1 + static_cast<unsigned>(rng() % 3);
        bad += !imagpart_bound_check(t, V(rng), K).holds;
    }
    report(9, bad == 0, "block bound on |gamma_t| and the imaginary-part bound", std::to_string(bad) + " failures");
}

// c_t for a t given by its bits, most significant first
Dyadic c_of_bits(const std::vector<unsigned char>& bits) {
    DistPair p = pair_initial();
    for (unsigned char b : bits) p = pair_append_bit(p, b);
    return c_value(p.lo);
}

// random t with exactly `ones` blocks of 1s
std::vector<unsigned char> random_blocks(std::mt19937_64& rng, unsigned long ones) {
    std::vector<unsigned char> bits;
    for (unsigned long i = 0; i < ones; ++i) {
        if (i) bits.insert(bits.end(), 1 + rng() % 3, 0);
        bits.insert(bits.end(), 1 + rng() % 3, 1);
    }
    bits.insert(bits.end(), rng() % 3, 0);
    return bits;
}

void criterion10() {
    // Sampling needs t with at least L blocks of 1s, i.e. at least 2L - 1 bits.
    constexpr unsigned long kMaxSampleBlocks = 1ul << 12;
    bool ok = true;
    std::ostringstream d;
    const char* sep = "";
    for (const Rational& eps : {Rational(9, 20), Rational(1, 4)}) {
        Stopwatch sw;
        const auto cert = block_threshold(eps);
        const auto fresh = verify_certificate(cert, build_ledger(cert.ledger_kmax));
        const bool cert_ok = certificate_holds(cert) && !fresh.empty() &&
                             std::all_of(fresh.begin(), fresh.end(), [](const Witness& w) { return w.holds; });
        ok = ok && cert_ok;
        d << sep << "eps " << to_string(eps) << ": certificate " << (cert_ok ? "valid" : "INVALID") << " (K = " << cert.K << ", L ~ 2^"
          << cert.L.exponent2() << ", " << sw.str() << ")";
        if (cert.L <= BigFloat(static_cast<long>(kMaxSampleBlocks))) {
            const auto L = static_cast<unsigned long>(std::ceil(cert.L.to_double()));
            std::mt19937_64 rng(10);
            std::size_t bad = 0;
            for (int i = 0; i < 1000; ++i) bad += !(Rational(c_of_bits(random_blocks(rng, std::max(L, 1ul) + rng() % 4)).to_rational()) > Rational(1, 2) - eps);
            ok = ok && bad == 0;
            d << ", sampled 1000 t: " << bad << " below 1/2 - eps";
        } else {
            ok = false;
            d << ", sampling infeasible: each t would need about 2^" << cert.L.exponent2() + 1 << " bits";
        }
        sep = "; ";
    }
    report(10, ok, "threshold certificates for eps = 9/20, 1/4 plus sampled soundness", d.str());
}

}  // namespace

int main() {
    const std::pair<int, void (*)()> all[] = {{1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
                                              {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
    for (const auto& [n, f] : all) {
        try {
            f();
        } catch (const std::exception& e) {
            report(n, false, "threw", e.what());
        }
    }
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " of 10 criteria failed" << std::endl;
    return failures ? 1 : 0;
}
