#pragma once

// Exhaustive computation of c_t over 1 <= t < 2^B by a depth-first walk over binary
// prefixes a. Node a carries (delta(., a), delta(., a+1)); its single mixture is
// delta(., 2a+1) and is shared by both children (2a and 2a+1). Even t inherit
// c_t from their odd part.

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cusick/carrydist.hpp"
#include "cusick/dyadic.hpp"

namespace cusick {

enum class ScanMode { exact, floating };

constexpr std::string_view to_string(ScanMode m) noexcept { return m == ScanMode::exact ? "exact" : "float"; }

inline ScanMode parse_scan_mode(std::string_view s) {
    if (s == "exact") return ScanMode::exact;
    if (s == "float") return ScanMode::floating;
    throw std::invalid_argument("unknown scan mode: " + std::string(s));
}

struct ScanProgress {
    std::uint64_t subtrees_done = 0;
    std::uint64_t subtrees_total = 0;
    std::uint64_t nodes = 0;
};

struct ScanConfig {
    unsigned bits = 1;                      // scan 1 <= t < 2^bits
    ScanMode mode = ScanMode::exact;
    int tail_cut = -48;                     // float mode keeps j >= tail_cut explicitly
    unsigned threads = 1;
    std::optional<unsigned> split_depth;    // default min(bits - 1, 12)
    std::optional<std::filesystem::path> checkpoint_path;
    bool resume = false;                    // continue from checkpoint_path if it exists
    unsigned checkpoint_every = 64;         // completed subtrees between checkpoint writes
    std::function<void(const ScanProgress&)> on_progress;
    // exact mode only: every odd t with its c_t; called from worker threads
    std::function<void(std::uint64_t, const Dyadic&)> visit;
};

struct ScanResult {
    unsigned bits = 0;
    ScanMode mode = ScanMode::exact;
    Dyadic min_ct;                          // exact minimum (float mode: after exact re-check)
    std::vector<std::uint64_t> argmin;      // all 1 <= t < 2^bits attaining it, sorted
    std::uint64_t count_below_half = 0;     // t with c_t <= 1/2
    std::uint64_t nodes = 0;                // odd t evaluated
    // float mode only
    double float_min = 0;                   // float estimate at argmin.front()
    double float_radius = 0;                // its error radius
    std::uint64_t rechecked = 0;            // t re-evaluated exactly
    bool resumed = false;
};

namespace scan_detail {

using u128 = unsigned __int128;

inline constexpr unsigned kScale = 124;  // fixed-point values are multiples of 2^-124, below 16
inline constexpr std::size_t kCap = 2 * 64 + 8;

inline BigInt to_bigint(u128 x) {
    BigInt r = static_cast<std::uint64_t>(x >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(x);
    return r;
}

inline Dyadic fixed_to_dyadic(u128 x) { return Dyadic(to_bigint(x), kScale); }

inline u128 dyadic_to_fixed(const Dyadic& d) {
    if (d.sign() < 0 || d.exp() > kScale) throw std::range_error("scanner: value outside the fixed-point range");
    const BigInt n = d.num() << static_cast<unsigned>(kScale - d.exp());
    if (!n.is_zero() && boost::multiprecision::msb(n) >= 127) throw std::range_error("scanner: value outside the fixed-point range");
    return (static_cast<u128>(static_cast<std::uint64_t>(n >> 64)) << 64) | static_cast<std::uint64_t>(n & std::numeric_limits<std::uint64_t>::max());
}

/// delta(.) with values v[j - j_min] on [j_min, j_min + size) and delta(j) = tau 2^(j - j_min + 1) below.
template <class T>
struct WindowDist {
    std::int32_t j_min = 0;
    std::uint32_t size = 0;
    T tau{};
    double radius = 0;  // float only: L1 distance bound to the true law
    std::array<T, kCap> v{};

    std::int32_t j_max() const { return j_min + static_cast<std::int32_t>(size) - 1; }
};

using FixedDist = WindowDist<u128>;
using FloatDist = WindowDist<double>;

/// Exact arithmetic check: `lost` collects every discarded low bit.
struct Fixed {
    using Dist = FixedDist;
    u128 lost = 0;

    u128 at(const Dist& d, std::int32_t j) {
        if (j > d.j_max()) return 0;
        if (j >= d.j_min) return d.v[static_cast<std::size_t>(j - d.j_min)];
        const auto s = static_cast<unsigned>(d.j_min - 1 - j);
        if (s >= 128) {
            lost |= d.tau;
            return 0;
        }
        lost |= d.tau & ((u128{1} << s) - 1);
        return d.tau >> s;
    }
    u128 half(u128 x) {
        lost |= x & 1;
        return x >> 1;
    }
    static void truncate(Dist&) {}

    u128 c(const Dist& d) {
        u128 s = 0;
        for (std::int32_t j = std::max(0, d.j_min); j <= d.j_max(); ++j) s += d.v[static_cast<std::size_t>(j - d.j_min)];
        if (d.j_min > 0) s += (d.tau << 1) - shifted_tail(d);
        return s;
    }
    // tau 2^(1 - j_min)
    u128 shifted_tail(const Dist& d) {
        const auto s = static_cast<unsigned>(d.j_min - 1);
        if (s >= 128) {
            lost |= d.tau;
            return 0;
        }
        lost |= d.tau & ((u128{1} << s) - 1);
        return d.tau >> s;
    }
};

struct Float {
    using Dist = FloatDist;
    int floor = -48;

    static double at(const Dist& d, std::int32_t j) {
        if (j > d.j_max()) return 0;
        if (j >= d.j_min) return d.v[static_cast<std::size_t>(j - d.j_min)];
        return std::ldexp(d.tau, j - d.j_min + 1);
    }
    static double half(double x) { return x / 2; }

    /// Replaces everything below `floor` by a geometric tail and charges the L1 change to the radius.
    void truncate(Dist& d) const {
        if (d.j_min >= floor) return;
        const auto drop = static_cast<std::size_t>(floor - d.j_min);
        if (drop >= d.size) return;  // keep at least one explicit entry
        double dropped = 2 * d.tau;
        for (std::size_t i = 0; i < drop; ++i) dropped += d.v[i];
        const double new_tau = d.v[drop - 1];
        std::copy(d.v.begin() + static_cast<std::ptrdiff_t>(drop), d.v.begin() + d.size, d.v.begin());
        d.size -= static_cast<std::uint32_t>(drop);
        d.j_min = floor;
        d.tau = new_tau;
        d.radius += dropped + 2 * new_tau;
    }

    static double c(const Dist& d) {
        double s = 0;
        for (std::int32_t j = std::max(0, d.j_min); j <= d.j_max(); ++j) s += d.v[static_cast<std::size_t>(j - d.j_min)];
        if (d.j_min > 0) s += 2 * d.tau - std::ldexp(d.tau, 1 - d.j_min);
        return s;
    }
};

/// out = law of (1/2) lo(j - 1) + (1/2) hi(j + 1), canonicalized.
template <class K>
void mix(K& k, const typename K::Dist& lo, const typename K::Dist& hi, typename K::Dist& out) {
    const std::int32_t jmin = std::min(lo.j_min + 1, hi.j_min - 1);
    const std::int32_t jmax = std::max(lo.j_max() + 1, hi.j_max() - 1);
    if (jmax - jmin + 1 > static_cast<std::int32_t>(kCap)) throw std::length_error("scanner: support window too wide");
    out.j_min = jmin;
    out.size = static_cast<std::uint32_t>(jmax - jmin + 1);
    for (std::int32_t j = jmin; j <= jmax; ++j) out.v[static_cast<std::size_t>(j - jmin)] = k.half(k.at(lo, j - 1) + k.at(hi, j + 1));
    out.tau = k.half(k.at(lo, jmin - 2) + k.at(hi, jmin));
    out.radius = (lo.radius + hi.radius) / 2;
    while (out.size > 1 && out.v[out.size - 1] == 0) --out.size;
    std::uint32_t absorbed = 0;
    while (out.size - absorbed > 1 && out.v[absorbed] == 2 * (absorbed == 0 ? out.tau : out.v[absorbed - 1])) ++absorbed;
    if (absorbed > 0) {
        out.tau = out.v[absorbed - 1];
        std::copy(out.v.begin() + absorbed, out.v.begin() + out.size, out.v.begin());
        out.size -= absorbed;
        out.j_min += static_cast<std::int32_t>(absorbed);
    }
    k.truncate(out);
}

template <class T>
WindowDist<T> from_carry(const CarryDistribution& d) {
    if (d.support().size() > kCap) throw std::length_error("scanner: support window too wide");
    WindowDist<T> w;
    w.j_min = static_cast<std::int32_t>(d.j_min());
    w.size = static_cast<std::uint32_t>(d.support().size());
    if constexpr (std::is_same_v<T, u128>) {
        w.tau = dyadic_to_fixed(d.at(d.j_min() - 1));
        for (std::size_t i = 0; i < w.size; ++i) w.v[i] = dyadic_to_fixed(d.support()[i]);
    } else {
        w.tau = d.at(d.j_min() - 1).to_double();
        for (std::size_t i = 0; i < w.size; ++i) w.v[i] = d.support()[i].to_double();
        // conversion rounding, relative 2^-53 per entry
        w.radius = std::ldexp(1.0, -52);
    }
    return w;
}

struct FloatHit {
    std::uint64_t t = 0;
    double c = 0;
    double radius = 0;
};

/// Results merged over completed parts of the tree.
struct Partial {
    // exact mode
    bool has_min = false;
    Dyadic min;
    std::vector<std::uint64_t> argmin_odd;
    std::uint64_t violations = 0;  // weighted by the even multiples below 2^bits
    // float mode
    double upmin = std::numeric_limits<double>::infinity();  // min of c + radius
    std::vector<FloatHit> candidates;                        // c - radius <= upmin
    std::vector<FloatHit> near_misses;                       // c - radius <= 1/2
    std::uint64_t nodes = 0;

    void add_exact(std::uint64_t t, const Dyadic& c, unsigned bits) {
        ++nodes;
        if (!has_min || c < min) {
            has_min = true;
            min = c;
            argmin_odd.assign(1, t);
        } else if (c == min) {
            argmin_odd.push_back(t);
        }
        if (c <= Dyadic::pow2(-1)) violations += bits - bit_length(t) + 1;
    }

    void add_float(std::uint64_t t, double c, double radius) {
        ++nodes;
        if (c - radius <= 0.5) near_misses.push_back({t, c, radius});
        if (c + radius < upmin) upmin = c + radius;
        if (c - radius <= upmin) {
            candidates.push_back({t, c, radius});
            if (candidates.size() > 4096) prune();
        }
    }

    void prune() {
        std::erase_if(candidates, [&](const FloatHit& h) { return h.c - h.radius > upmin; });
    }

    void merge(const Partial& o) {
        nodes += o.nodes;
        if (o.has_min) {
            if (!has_min || o.min < min) {
                has_min = true;
                min = o.min;
                argmin_odd = o.argmin_odd;
            } else if (o.min == min) {
                argmin_odd.insert(argmin_odd.end(), o.argmin_odd.begin(), o.argmin_odd.end());
            }
        }
        violations += o.violations;
        upmin = std::min(upmin, o.upmin);
        candidates.insert(candidates.end(), o.candidates.begin(), o.candidates.end());
        near_misses.insert(near_misses.end(), o.near_misses.begin(), o.near_misses.end());
        prune();
    }
};

struct Frontier {
    std::uint64_t prefix = 0;
    DistPair pair;
};

// ---- binary checkpoint ----

inline constexpr char kMagic[8] = {'C', 'U', 'S', 'K', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::uint32_t kEndianMark = 0x01020304;

class Writer {
public:
    void u8(std::uint8_t x) { buf_.push_back(static_cast<char>(x)); }
    void u32(std::uint32_t x) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(x >> (8 * i)));
    }
    void u64(std::uint64_t x) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(x >> (8 * i)));
    }
    void i64(std::int64_t x) { u64(static_cast<std::uint64_t>(x)); }
    void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
    void bytes(const char* p, std::size_t n) { buf_.append(p, n); }
    void dyadic(const Dyadic& d) {
        u8(d.sign() < 0 ? 1 : 0);
        u64(d.exp());
        std::vector<unsigned char> mag;
        const BigInt a = boost::multiprecision::abs(d.num());
        if (!a.is_zero()) boost::multiprecision::export_bits(a, std::back_inserter(mag), 8, false);  // little-endian
        u32(static_cast<std::uint32_t>(mag.size()));
        bytes(reinterpret_cast<const char*>(mag.data()), mag.size());
    }
    void dist(const CarryDistribution& d) {
        i64(d.j_min());
        u32(d.t_bits());
        dyadic(d.tail_coeff());
        u32(static_cast<std::uint32_t>(d.support().size()));
        for (const auto& v : d.support()) dyadic(v);
    }
    const std::string& data() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string data) : buf_(std::move(data)) {}
    std::uint8_t u8() {
        if (pos_ >= buf_.size()) throw std::runtime_error("checkpoint: truncated file");
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }
    std::uint32_t u32() {
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return x;
    }
    std::uint64_t u64() {
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return x;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string bytes(std::size_t n) {
        if (buf_.size() - pos_ < n) throw std::runtime_error("checkpoint: truncated file");
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    Dyadic dyadic() {
        const bool neg = u8() != 0;
        const std::uint64_t exp = u64();
        const std::string mag = bytes(u32());
        BigInt n = 0;
        if (!mag.empty()) boost::multiprecision::import_bits(n, mag.begin(), mag.end(), 8, false);
        return Dyadic(neg ? BigInt(-n) : n, exp);
    }
    CarryDistribution dist() {
        const std::int64_t j_min = i64();
        const unsigned t_bits = u32();
        Dyadic tail = dyadic();
        std::vector<Dyadic> support(u32());
        for (auto& v : support) v = dyadic();
        return CarryDistribution::from_parts(j_min, std::move(support), std::move(tail), t_bits);
    }
    bool done() const { return pos_ == buf_.size(); }

private:
    std::string buf_;
    std::size_t pos_ = 0;
};

struct CheckpointState {
    unsigned bits = 0;
    ScanMode mode = ScanMode::exact;
    unsigned split = 0;
    int tail_cut = 0;
    std::uint64_t total = 0;
    Partial done;
    std::vector<Frontier> pending;
};

inline void write_hits(Writer& w, const std::vector<FloatHit>& hits) {
    w.u64(hits.size());
    for (const auto& h : hits) {
        w.u64(h.t);
        w.f64(h.c);
        w.f64(h.radius);
    }
}

inline std::vector<FloatHit> read_hits(Reader& r) {
    std::vector<FloatHit> hits(r.u64());
    for (auto& h : hits) h = {r.u64(), r.f64(), r.f64()};
    return hits;
}

/// Writes to a temporary file and renames it, so a failed write never clobbers the previous checkpoint.
inline void save_checkpoint(const std::filesystem::path& path, const CheckpointState& s) {
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u32(kEndianMark);
    w.u32(s.bits);
    w.u8(s.mode == ScanMode::exact ? 0 : 1);
    w.u32(s.split);
    w.i64(s.tail_cut);
    w.u64(s.total);
    w.u64(s.done.nodes);
    w.u8(s.done.has_min ? 1 : 0);
    w.dyadic(s.done.min);
    w.u64(s.done.argmin_odd.size());
    for (auto t : s.done.argmin_odd) w.u64(t);
    w.u64(s.done.violations);
    w.f64(s.done.upmin);
    write_hits(w, s.done.candidates);
    write_hits(w, s.done.near_misses);
    w.u64(s.pending.size());
    for (const auto& f : s.pending) {
        w.u64(f.prefix);
        w.dist(f.pair.lo);
        w.dist(f.pair.hi);
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("checkpoint: cannot open " + tmp.string());
        out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
        out.flush();
        if (!out) throw std::runtime_error("checkpoint: write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("checkpoint: rename failed: " + ec.message());
}

inline CheckpointState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(std::move(data));
    if (r.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) throw std::runtime_error("checkpoint: bad magic");
    if (r.u32() != kVersion) throw std::runtime_error("checkpoint: unsupported version");
    if (r.u32() != kEndianMark) throw std::runtime_error("checkpoint: endianness mismatch");
    CheckpointState s;
    s.bits = r.u32();
    s.mode = r.u8() == 0 ? ScanMode::exact : ScanMode::floating;
    s.split = r.u32();
    s.tail_cut = static_cast<int>(r.i64());
    s.total = r.u64();
    s.done.nodes = r.u64();
    s.done.has_min = r.u8() != 0;
    s.done.min = r.dyadic();
    s.done.argmin_odd.resize(r.u64());
    for (auto& t : s.done.argmin_odd) t = r.u64();
    s.done.violations = r.u64();
    s.done.upmin = r.f64();
    s.done.candidates = read_hits(r);
    s.done.near_misses = read_hits(r);
    s.pending.resize(r.u64());
    for (auto& f : s.pending) {
        f.prefix = r.u64();
        f.pair.lo = r.dist();
        f.pair.hi = r.dist();
        f.pair.prefix = f.prefix;
    }
    if (!r.done()) throw std::runtime_error("checkpoint: trailing bytes");
    return s;
}

// ---- traversal ----

struct Walker {
    const ScanConfig& cfg;

    // node a (bit length `len`) emits t = 2a + 1, then descends while children stay below 2^(bits-1)
    void fixed(Fixed& k, std::uint64_t a, const FixedDist& lo, const FixedDist& hi, unsigned len, std::vector<std::pair<std::uint64_t, u128>>& vals) {
        FixedDist m;
        mix(k, lo, hi, m);
        vals.emplace_back(2 * a + 1, k.c(m));
        if (len + 1 <= cfg.bits - 1) {
            fixed(k, 2 * a, lo, m, len + 1, vals);
            fixed(k, 2 * a + 1, m, hi, len + 1, vals);
        }
    }

    void floating(Float& k, std::uint64_t a, const FloatDist& lo, const FloatDist& hi, unsigned len, Partial& out) {
        FloatDist m;
        mix(k, lo, hi, m);
        const auto w = static_cast<double>(m.size);
        const double radius = m.radius + 4 * (cfg.bits + w) * std::ldexp(1.0, -53);
        out.add_float(2 * a + 1, Float::c(m), radius);
        if (len + 1 <= cfg.bits - 1) {
            floating(k, 2 * a, lo, m, len + 1, out);
            floating(k, 2 * a + 1, m, hi, len + 1, out);
        }
    }

    void exact(std::uint64_t a, const CarryDistribution& lo, const CarryDistribution& hi, unsigned len, Partial& out) {
        const auto m = CarryDistribution::mixture(lo, hi, len + 1);
        const auto c = c_value(m);
        if (cfg.visit) cfg.visit(2 * a + 1, c);
        out.add_exact(2 * a + 1, c, cfg.bits);
        if (len + 1 <= cfg.bits - 1) {
            exact(2 * a, lo, m, len + 1, out);
            exact(2 * a + 1, m, hi, len + 1, out);
        }
    }

    Partial subtree(const Frontier& f) {
        Partial out;
        const unsigned len = bit_length(f.prefix);
        if (cfg.mode == ScanMode::floating) {
            Float k{cfg.tail_cut};
            floating(k, f.prefix, from_carry<double>(f.pair.lo), from_carry<double>(f.pair.hi), len, out);
            return out;
        }
        try {
            Fixed k;
            std::vector<std::pair<std::uint64_t, u128>> vals;
            fixed(k, f.prefix, from_carry<u128>(f.pair.lo), from_carry<u128>(f.pair.hi), len, vals);
            if (k.lost == 0) {
                // minimum in fixed point, then convert only what is reported
                u128 best = std::numeric_limits<u128>::max();
                const u128 half = u128{1} << (kScale - 1);
                for (const auto& [t, c] : vals) {
                    best = std::min(best, c);
                    if (c <= half) out.violations += cfg.bits - bit_length(t) + 1;
                    if (cfg.visit) cfg.visit(t, fixed_to_dyadic(c));
                }
                out.nodes = vals.size();
                out.has_min = true;
                out.min = fixed_to_dyadic(best);
                for (const auto& [t, c] : vals) {
                    if (c == best) out.argmin_odd.push_back(t);
                }
                return out;
            }
        } catch (const std::range_error&) {
        } catch (const std::length_error&) {
        }
        // fixed point could not hold every value exactly: redo with unbounded dyadics
        out = Partial{};
        exact(f.prefix, f.pair.lo, f.pair.hi, len, out);
        return out;
    }
};

/// Nodes above the split depth, evaluated exactly; nodes at the split depth become the frontier.
inline void expand_top(const ScanConfig& cfg, unsigned split, std::uint64_t a, const DistPair& p, unsigned len, Partial& top, std::vector<Frontier>& frontier) {
    if (len == split) {
        frontier.push_back({a, p});
        return;
    }
    const auto m = CarryDistribution::mixture(p.lo, p.hi, len + 1);
    const auto c = c_value(m);
    if (cfg.mode == ScanMode::exact) {
        if (cfg.visit) cfg.visit(2 * a + 1, c);
        top.add_exact(2 * a + 1, c, cfg.bits);
    } else {
        top.add_float(2 * a + 1, c.to_double(), std::ldexp(1.0, -52));
    }
    if (len + 1 <= cfg.bits - 1) {
        expand_top(cfg, split, 2 * a, {p.lo, m, 2 * a}, len + 1, top, frontier);
        expand_top(cfg, split, 2 * a + 1, {m, p.hi, 2 * a + 1}, len + 1, top, frontier);
    }
}

}  // namespace scan_detail

/// Minimum of c_t over 1 <= t < 2^bits, all minimizers, and the number of t with c_t <= 1/2.
inline ScanResult scan_min_ct(const ScanConfig& cfg) {
    using namespace scan_detail;
    if (cfg.bits == 0 || cfg.bits > 62) throw std::invalid_argument("scan: bits must be in [1, 62]");
    if (cfg.tail_cut > -2) throw std::invalid_argument("scan: tail_cut must be <= -2");
    const unsigned split = cfg.bits == 1 ? 0 : std::clamp(cfg.split_depth.value_or(12), 1u, cfg.bits - 1);

    CheckpointState state;
    ScanResult result;
    result.bits = cfg.bits;
    result.mode = cfg.mode;
    const bool resuming = cfg.resume && cfg.checkpoint_path && std::filesystem::exists(*cfg.checkpoint_path);
    if (resuming) {
        state = load_checkpoint(*cfg.checkpoint_path);
        if (state.bits != cfg.bits || state.mode != cfg.mode || state.split != split || state.tail_cut != cfg.tail_cut) {
            throw std::runtime_error("checkpoint: configuration mismatch");
        }
        result.resumed = true;
    } else {
        state.bits = cfg.bits;
        state.mode = cfg.mode;
        state.split = split;
        state.tail_cut = cfg.tail_cut;
        // t = 1 comes from the root pair (delta(., 0), delta(., 1))
        const auto d1 = CarryDistribution::geometric();
        if (cfg.mode == ScanMode::exact) {
            if (cfg.visit) cfg.visit(1, c_value(d1));
            state.done.add_exact(1, c_value(d1), cfg.bits);
        } else {
            state.done.add_float(1, 0.75, 0);
        }
        if (cfg.bits >= 2) expand_top(cfg, split, 1, {d1, d1, 1}, 1, state.done, state.pending);
        state.total = state.pending.size();
    }

    const std::vector<Frontier> work = state.pending;
    std::vector<char> finished(work.size(), 0);
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::size_t since_save = 0;
    std::exception_ptr failure;
    Walker walker{cfg};

    auto checkpoint_locked = [&] {
        if (!cfg.checkpoint_path) return;
        CheckpointState snap;
        snap.bits = state.bits;
        snap.mode = state.mode;
        snap.split = state.split;
        snap.tail_cut = state.tail_cut;
        snap.total = state.total;
        snap.done = state.done;
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (!finished[i]) snap.pending.push_back(work[i]);
        }
        save_checkpoint(*cfg.checkpoint_path, snap);
    };

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            Partial p;
            try {
                p = walker.subtree(work[i]);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next = work.size();
                return;
            }
            std::lock_guard lock(mu);
            state.done.merge(p);
            finished[i] = 1;
            ScanProgress prog;
            prog.subtrees_total = state.total;
            prog.subtrees_done = state.total - work.size() + static_cast<std::uint64_t>(std::count(finished.begin(), finished.end(), 1));
            prog.nodes = state.done.nodes;
            try {
                if (cfg.on_progress) cfg.on_progress(prog);
                if (++since_save >= std::max(1u, cfg.checkpoint_every)) {
                    since_save = 0;
                    checkpoint_locked();
                }
            } catch (...) {
                // a failing callback or checkpoint write stops the scan; saved state stays valid
                if (!failure) failure = std::current_exception();
                next = work.size();
                return;
            }
        }
    };

    const unsigned nthreads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(std::max<std::size_t>(work.size(), 1))));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    {
        std::lock_guard lock(mu);
        checkpoint_locked();
    }

    Partial& done = state.done;
    result.nodes = done.nodes;
    std::vector<std::uint64_t> odd;
    if (cfg.mode == ScanMode::exact) {
        result.min_ct = done.min;
        result.count_below_half = done.violations;
        odd = done.argmin_odd;
    } else {
        // every t whose interval reaches the best upper bound is re-evaluated exactly
        done.prune();
        bool have = false;
        for (const auto& h : done.candidates) {
            const auto c = c_value(dist_for(h.t));
            ++result.rechecked;
            if (!have || c < result.min_ct) {
                have = true;
                result.min_ct = c;
                odd.assign(1, h.t);
            } else if (c == result.min_ct) {
                odd.push_back(h.t);
            }
        }
        for (const auto& h : done.near_misses) {
            ++result.rechecked;
            if (c_value(dist_for(h.t)) <= Dyadic::pow2(-1)) result.count_below_half += cfg.bits - bit_length(h.t) + 1;
        }
        std::sort(odd.begin(), odd.end());
        for (const auto& h : done.candidates) {
            if (h.t == odd.front()) {
                result.float_min = h.c;
                result.float_radius = h.radius;
            }
        }
    }
    for (auto t : odd) {
        for (std::uint64_t u = t; bit_length(u) <= cfg.bits; u <<= 1) result.argmin.push_back(u);
    }
    std::sort(result.argmin.begin(), result.argmin.end());
    return result;
}

/// |{1 <= t < 2^bits : c_t <= 1/2}|.
inline std::uint64_t verify_conjecture_range(unsigned bits, ScanMode mode, unsigned threads = 1) {
    ScanConfig cfg;
    cfg.bits = bits;
    cfg.mode = mode;
    cfg.threads = threads;
    return scan_min_ct(cfg).count_below_half;
}

/// c_t for every 0 <= t < 2^bits, via the scanner's traversal (t = 0 gives 1).
inline std::vector<Dyadic> scan_all_ct(unsigned bits) {
    if (bits > 24) throw std::invalid_argument("scan_all_ct: at most 24 bits");
    std::vector<Dyadic> c(std::size_t{1} << bits);
    c[0] = Dyadic(1);
    ScanConfig cfg;
    cfg.bits = bits;
    cfg.visit = [&](std::uint64_t t, const Dyadic& v) { c[t] = v; };
    scan_min_ct(cfg);
    for (std::uint64_t t = 2; t < c.size(); t += 2) c[t] = c[t >> std::countr_zero(t)];
    return c;
}

}  // namespace cusick
