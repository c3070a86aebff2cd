#pragma once

// Command-line frontend. Every run prints its fully resolved configuration as one
// JSON line on the error stream; `--config FILE` replays such a line.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cusick/bigfloat.hpp"
#include "cusick/carrydist.hpp"
#include "cusick/charfn.hpp"
#include "cusick/dyadic.hpp"
#include "cusick/effbounds.hpp"
#include "cusick/oracle.hpp"
#include "cusick/scanner.hpp"
#include "cusick/series.hpp"

namespace cusick::cli {

using json = nlohmann::ordered_json;

/// Thrown for malformed arguments (exit code 2).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Parses a non-negative integer in decimal, 0x hex or 0b binary.
inline std::uint64_t parse_t(const std::string& s) {
    int base = 10;
    std::string digits = s;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        digits = s.substr(2);
    } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
        base = 2;
        digits = s.substr(2);
    }
    if (digits.empty()) throw ArgumentError("malformed integer: " + s);
    std::uint64_t v = 0;
    for (char ch : digits) {
        int d;
        if (ch >= '0' && ch <= '9') d = ch - '0';
        else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F') d = ch - 'A' + 10;
        else throw ArgumentError("malformed integer: " + s);
        if (d >= base) throw ArgumentError("malformed integer: " + s);
        if (v > (std::numeric_limits<std::uint64_t>::max() - static_cast<unsigned>(d)) / static_cast<unsigned>(base)) {
            throw ArgumentError("integer does not fit in 64 bits: " + s);
        }
        v = v * static_cast<unsigned>(base) + static_cast<unsigned>(d);
    }
    return v;
}

/// Parses an exact positive rational: "0.25", "1/4", "3".
inline Rational parse_rational(const std::string& s) {
    try {
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            const BigInt p(s.substr(0, slash));
            const BigInt q(s.substr(slash + 1));
            if (q.is_zero()) throw ArgumentError("zero denominator: " + s);
            return Rational(p, q);
        }
        const auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(BigInt(s));
        const std::string frac = s.substr(dot + 1);
        const std::string whole = s.substr(0, dot);
        if (frac.find_first_not_of("0123456789") != std::string::npos || whole.find_first_not_of("0123456789") != std::string::npos ||
            (whole.empty() && frac.empty())) {
            throw ArgumentError("malformed number: " + s);
        }
        const BigInt num(whole.empty() ? "0" : whole);
        Rational r(num);
        if (!frac.empty()) r += Rational(BigInt(frac), boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size())));
        return r;
    } catch (const ArgumentError&) {
        throw;
    } catch (const std::exception&) {
        throw ArgumentError("malformed number: " + s);
    }
}

/// Parses "a..b" (either end may be negative).
inline std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            const auto v = std::stoll(s);
            return {v, v};
        }
        const auto a = std::stoll(s.substr(0, dots));
        const auto b = std::stoll(s.substr(dots + 2));
        if (a > b) throw ArgumentError("empty range: " + s);
        return {a, b};
    } catch (const ArgumentError&) {
        throw;
    } catch (const std::exception&) {
        throw ArgumentError("malformed range: " + s);
    }
}

inline json dyadic_json(const Dyadic& d) { return d.to_string(); }

inline unsigned default_threads() {
    if (const char* env = std::getenv("CUSICK_THREADS")) {
        try {
            const auto n = std::stoul(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Output of a command: a JSON document plus an optional table for CSV.
struct Output {
    json doc;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool failed = false;  // a verification did not hold
};

inline std::string json_scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char ch : s) {
        if (ch == '"') r += '"';
        r += ch;
    }
    return r + "\"";
}

inline void write_output(std::ostream& out, const Output& o, const std::string& format) {
    if (format == "json") {
        out << o.doc.dump() << '\n';
        return;
    }
    std::vector<std::string> header = o.header;
    std::vector<std::vector<std::string>> rows = o.rows;
    if (header.empty()) {
        // one row of the top-level scalar fields
        rows.emplace_back();
        for (const auto& [k, v] : o.doc.items()) {
            if (v.is_structured()) continue;
            header.push_back(k);
            rows.back().push_back(json_scalar(v));
        }
    }
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_escape(header[i]);
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_escape(r[i]);
        out << '\n';
    }
}

inline std::string fmt_double(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

// ---- commands ----

inline Output cmd_density(std::uint64_t t, const std::optional<std::string>& range) {
    const auto d = dist_for(t);
    std::int64_t a = d.j_min() - 4;
    std::int64_t b = d.j_max();
    if (range) std::tie(a, b) = parse_range(*range);
    if (b - a > 100000) throw ArgumentError("density: range too long");
    Output o;
    o.doc["t"] = t;
    o.doc["j_min"] = d.j_min();
    o.doc["j_max"] = d.j_max();
    json support = json::object();
    for (std::int64_t i = d.j_min(); i <= d.j_max(); ++i) support[std::to_string(i)] = d.at(i).to_string();
    o.doc["support"] = std::move(support);
    o.doc["tail_coeff"] = dyadic_json(d.tail_coeff());
    json vals = json::array();
    o.header = {"t", "j", "delta", "decimal"};
    for (std::int64_t j = a; j <= b; ++j) {
        const auto v = d.at(j);
        vals.push_back({{"j", j}, {"delta", v.to_string()}, {"decimal", v.to_exact_decimal()}});
        o.rows.push_back({std::to_string(t), std::to_string(j), v.to_string(), v.to_exact_decimal()});
    }
    o.doc["values"] = std::move(vals);
    return o;
}

inline Output cmd_ct(std::uint64_t t) {
    const auto c = c_value(dist_for(t));
    Output o;
    o.doc["t"] = t;
    o.doc["ct"] = c.to_string();
    o.doc["decimal"] = c.to_exact_decimal();
    return o;
}

inline Output cmd_moments(std::uint64_t t, unsigned kmax) {
    const auto m = moments(fg_for(t, kmax));
    Output o;
    o.doc["t"] = t;
    o.doc["kmax"] = kmax;
    json arr = json::array();
    o.header = {"t", "k", "num", "den"};
    for (std::size_t k = 0; k < m.size(); ++k) {
        const auto num = boost::multiprecision::numerator(m[k]).str();
        const auto den = boost::multiprecision::denominator(m[k]).str();
        arr.push_back({{"k", k}, {"m", to_string(m[k])}});
        o.rows.push_back({std::to_string(t), std::to_string(k), num, den});
    }
    o.doc["moments"] = std::move(arr);
    return o;
}

inline Output cmd_oracle(std::uint64_t t, std::int64_t j, std::optional<unsigned> m, std::optional<std::uint64_t> samples) {
    const auto expected = dist_for(t).at(j);
    oracle::OracleResult r;
    if (samples) {
        r = oracle::empirical_delta_result(t, j, *samples);
    } else {
        r = oracle::exact_delta_result(t, j, m.value_or(oracle::default_modulus_bits(t)));
    }
    Output o;
    o.doc["t"] = t;
    o.doc["j"] = j;
    o.doc["value"] = r.value.to_string();
    o.doc["decimal"] = r.value.to_exact_decimal();
    o.doc["method"] = std::string(oracle::to_string(r.method));
    o.doc["modulus_bits"] = r.modulus_bits;
    if (samples) o.doc["samples"] = r.samples;
    o.doc["recurrence"] = expected.to_string();
    o.doc["agrees"] = r.value == expected;
    // an empirical count is only an estimate, so only the exact method can fail
    o.failed = !samples && !(r.value == expected);
    return o;
}

inline Output cmd_charfn(std::uint64_t t, const std::vector<double>& thetas) {
    Output o;
    o.doc["t"] = t;
    json arr = json::array();
    o.header = {"t", "theta", "re", "im", "bound", "pass"};
    const auto d = dist_for(t);
    for (double th : thetas) {
        const auto g = gamma_matrix(t, th);
        const auto gd = gamma_from_dist(d, th);
        const auto b = t == 0 ? BoundResult{std::abs(g), 1, true} : muntjak_check(t, th);
        arr.push_back({{"theta", th},
                       {"re", g.real()},
                       {"im", g.imag()},
                       {"abs", std::abs(g)},
                       {"dist_difference", std::abs(g - gd)},
                       {"block_bound", b.bound},
                       {"pass", b.holds}});
        o.rows.push_back({std::to_string(t), fmt_double(th), fmt_double(g.real()), fmt_double(g.imag()), fmt_double(b.bound), b.holds ? "true" : "false"});
        o.failed = o.failed || !b.holds;
    }
    o.doc["values"] = std::move(arr);
    return o;
}

inline Output cmd_ct_integral(std::uint64_t t, unsigned points, unsigned threads) {
    const double v = ct_integral(t, points, threads);
    const auto exact = c_value(dist_for(t));
    Output o;
    o.doc["t"] = t;
    o.doc["points"] = points;
    o.doc["integral"] = v;
    o.doc["exact"] = exact.to_string();
    o.doc["error"] = std::abs(v - exact.to_double());
    return o;
}

inline Output cmd_ledger(unsigned kmax) {
    const auto ledger = build_ledger(kmax);
    Output o;
    o.doc["kmax"] = kmax;
    o.doc["log2_lower"] = to_string(ledger.bracket().lo);
    o.doc["log2_upper"] = to_string(ledger.bracket().hi);
    o.doc["inv_log2_upper"] = ledger.inv_log2_upper().to_string();
    json arr = json::array();
    o.header = {"k", "A", "B", "C", "D", "E", "d1", "d2", "E_prime"};
    for (unsigned k = 1; k <= kmax; ++k) {
        const auto& e = ledger[k];
        json row = {{"k", k}, {"A", to_string(exact_A(k))}, {"B", e.B.to_string()}, {"C", e.C.to_string()}};
        row["D"] = k >= 2 ? json(e.D.to_string()) : json(nullptr);
        row["E"] = e.E.to_string();
        row["d1"] = k >= 2 ? json(e.d1.to_string()) : json(nullptr);
        row["d2"] = e.d2.to_string();
        row["E_prime"] = e.E_prime.to_string();
        row["approx"] = {{"B", e.B.to_double()}, {"C", e.C.to_double()}, {"E", e.E.to_double()}};
        o.rows.push_back({std::to_string(k), to_string(exact_A(k)), e.B.to_string(), e.C.to_string(), k >= 2 ? e.D.to_string() : "",
                          e.E.to_string(), k >= 2 ? e.d1.to_string() : "", e.d2.to_string(), e.E_prime.to_string()});
        arr.push_back(std::move(row));
    }
    o.doc["entries"] = std::move(arr);
    o.doc["notes"] = {"B_1 = 1, from a_2(t) <= 2r + 1", "d_2(1) = 6 (log 2)^-4, the larger of the stated value and the general formula"};
    return o;
}

inline json certificate_json(const ThresholdCertificate& c) {
    json j;
    j["epsilon"] = to_string(c.epsilon);
    j["trivial"] = c.trivial;
    if (!c.trivial) {
        j["R"] = c.R;
        j["tail_value"] = c.tail_value.to_string();
        j["K"] = c.K;
        j["ledger_kmax"] = c.ledger_kmax;
        j["L_K_bound"] = c.L_K_bound.to_string();
        j["L_K_target"] = c.L_K_target.to_string();
        j["r0"] = c.r0.to_string();
        j["odd_moment_sum"] = c.odd_sum.to_string();
        j["r1"] = c.r1.to_string();
        j["r_required"] = c.r_required.to_string();
        j["r_required_log2"] = c.r_required.exponent2();
    }
    j["L"] = c.L.to_string();
    j["L_log2"] = c.L.exponent2();
    json w = json::array();
    for (const auto& x : c.witnesses) w.push_back({{"name", x.name}, {"lhs", x.lhs.to_string()}, {"rhs", x.rhs.to_string()}, {"holds", x.holds}});
    j["witnesses"] = std::move(w);
    j["valid"] = certificate_holds(c);
    j["notes"] = c.notes;
    return j;
}

inline Output cmd_threshold(const Rational& eps) {
    const auto c = block_threshold(eps);
    Output o;
    o.doc = certificate_json(c);
    o.failed = !certificate_holds(c);
    return o;
}

inline Output cmd_verify_bounds(std::uint64_t t, unsigned kmax, BlockCount blocks) {
    const auto ledger = build_ledger(kmax);
    const auto rep = verify_moment_bounds(t, kmax, ledger, blocks);
    Output o;
    o.doc["t"] = t;
    o.doc["r"] = rep.r;
    o.doc["blocks"] = blocks == BlockCount::stated ? "stated" : "appended";
    o.doc["kmax"] = kmax;
    json arr = json::array();
    o.header = {"t", "name", "k", "lhs", "rhs", "holds"};
    for (const auto& c : rep.checks) {
        arr.push_back({{"name", c.name}, {"k", c.k}, {"lhs", to_string(c.lhs)}, {"rhs", to_string(c.rhs)}, {"holds", c.holds}});
        o.rows.push_back({std::to_string(t), c.name, std::to_string(c.k), to_string(c.lhs), to_string(c.rhs), c.holds ? "true" : "false"});
    }
    o.doc["checks"] = std::move(arr);
    o.doc["all_hold"] = rep.all_hold();
    o.failed = !rep.all_hold();
    return o;
}

inline json scan_json(const ScanResult& r) {
    json j;
    j["bits"] = r.bits;
    j["mode"] = std::string(to_string(r.mode));
    j["min_ct"] = r.min_ct.to_string();
    j["min_decimal"] = r.min_ct.to_decimal(12);
    j["argmin"] = r.argmin;
    j["count_below_half"] = r.count_below_half;
    j["nodes"] = r.nodes;
    if (r.mode == ScanMode::floating) {
        j["float_min"] = r.float_min;
        j["float_radius"] = r.float_radius;
        j["rechecked"] = r.rechecked;
    }
    j["resumed"] = r.resumed;
    return j;
}

inline Output cmd_scan(unsigned bits, ScanMode mode, unsigned threads, const std::optional<std::string>& checkpoint, bool resume,
                       std::optional<unsigned> split, std::ostream& err) {
    ScanConfig cfg;
    cfg.bits = bits;
    cfg.mode = mode;
    cfg.threads = threads;
    cfg.split_depth = split;
    if (checkpoint) cfg.checkpoint_path = *checkpoint;
    cfg.resume = resume;
    auto last = std::chrono::steady_clock::now();
    cfg.on_progress = [&](const ScanProgress& p) {
        const auto now = std::chrono::steady_clock::now();
        if (p.subtrees_done != p.subtrees_total && now - last < std::chrono::seconds(2)) return;
        last = now;
        err << json{{"progress", {{"done", p.subtrees_done}, {"total", p.subtrees_total}, {"nodes", p.nodes}}}}.dump() << '\n';
    };
    const auto r = scan_min_ct(cfg);
    Output o;
    o.doc = scan_json(r);
    o.failed = r.count_below_half != 0;
    return o;
}

inline Output cmd_verify(unsigned bits, ScanMode mode, unsigned threads) {
    const auto n = verify_conjecture_range(bits, mode, threads);
    Output o;
    o.doc["bits"] = bits;
    o.doc["mode"] = std::string(to_string(mode));
    o.doc["violations"] = n;
    o.failed = n != 0;
    return o;
}

inline Output cmd_blocks(std::uint64_t t) {
    Output o;
    o.doc["t"] = t;
    o.doc["r"] = blocks_count(t);
    return o;
}

// ---- dispatcher ----

inline std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

/// Reads the canonical argument list from a run-config file (either the full line or its inner object).
inline std::vector<std::string> load_config_argv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (j.contains("run_config")) j = j["run_config"];
    if (!j.contains("argv") || !j["argv"].is_array()) throw ArgumentError("config file lacks an argv array");
    return j["argv"].get<std::vector<std::string>>();
}

/// Runs the command line `args` (without the program name). Returns the exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact computations for the binary sum-of-digits carry distribution", "cusick"};
    app.require_subcommand(0, 1);  // enforced after --config has had a chance to supply one
    app.fallthrough();

    std::string format = "json";
    std::optional<std::string> output;
    std::optional<std::string> config;
    unsigned threads = default_threads();
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output", output, "Write results to this file instead of standard output");
    app.add_option("--config", config, "Replay a run configuration emitted earlier");
    app.add_option("--threads", threads, "Worker threads (default: CUSICK_THREADS or all cores)")->check(CLI::PositiveNumber);

    std::string t_str;
    std::optional<std::string> j_range;
    std::int64_t j = 0;
    std::optional<unsigned> m_bits;
    std::optional<std::uint64_t> samples;
    unsigned kmax = 4;
    std::vector<double> thetas;
    unsigned points = 1u << 14;
    std::string eps_str;
    unsigned bits = 16;
    std::string mode_str = "exact";
    std::string blocks_str = "stated";
    std::optional<std::string> checkpoint;
    bool resume = false;
    std::optional<unsigned> split;

    auto add_t = [&](CLI::App* s) { s->add_option("t", t_str, "Integer t (decimal, 0x hex or 0b binary)")->required(); };
    auto* density = app.add_subcommand("density", "Carry distribution delta(j, t)");
    add_t(density);
    density->add_option("--j", j_range, "Range a..b of j");
    auto* ct = app.add_subcommand("ct", "Exact c_t");
    add_t(ct);
    auto* mom = app.add_subcommand("moments", "Normalized moments m_k(t)");
    add_t(mom);
    mom->add_option("--kmax", kmax, "Largest k")->check(CLI::Range(0u, 200u));
    auto* orc = app.add_subcommand("oracle", "Brute-force delta(j, t)");
    add_t(orc);
    orc->add_option("--j", j, "j")->required();
    orc->add_option("--m", m_bits, "Modulus exponent (default bitlen(t) + 2)");
    orc->add_option("--samples", samples, "Empirical count over n < N (N a power of two) instead");
    auto* cf = app.add_subcommand("charfn", "Characteristic function gamma_t(theta)");
    add_t(cf);
    cf->add_option("--theta", thetas, "Points theta")->required();
    auto* cti = app.add_subcommand("ct-integral", "c_t from the integral representation");
    add_t(cti);
    cti->add_option("--points", points, "Quadrature points")->check(CLI::Range(16u, 1u << 26));
    auto* led = app.add_subcommand("ledger", "Constants ledger A_k .. E_k");
    led->add_option("--kmax", kmax, "Largest k")->check(CLI::Range(1u, 100000u));
    auto* thr = app.add_subcommand("threshold", "Effective block threshold L(epsilon)");
    thr->add_option("--epsilon", eps_str, "epsilon (decimal or p/q)")->required();
    auto* vb = app.add_subcommand("verify-bounds", "Check the moment bounds for t");
    add_t(vb);
    vb->add_option("--kmax", kmax, "Largest k")->check(CLI::Range(1u, 64u));
    vb->add_option("--blocks", blocks_str, "Block count r: stated (lowest 0s of even t omitted) or appended")
        ->check(CLI::IsMember({"stated", "appended"}));
    auto* sc = app.add_subcommand("scan", "Minimum of c_t over t < 2^bits");
    sc->add_option("--bits", bits, "B")->required()->check(CLI::Range(1u, 62u));
    sc->add_option("--mode", mode_str, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    sc->add_option("--checkpoint", checkpoint, "Checkpoint file");
    sc->add_flag("--resume", resume, "Resume from the checkpoint file");
    sc->add_option("--split", split, "Split depth for parallel subtrees")->check(CLI::Range(1u, 30u));
    auto* ver = app.add_subcommand("verify", "Count t < 2^bits with c_t <= 1/2");
    ver->add_option("--bits", bits, "B")->required()->check(CLI::Range(1u, 62u));
    ver->add_option("--mode", mode_str, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    auto* blk = app.add_subcommand("blocks", "Number of blocks r of t");
    add_t(blk);

    std::vector<std::string> original = args;
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
        if (config) {
            // replay: the stored argv replaces everything else
            auto replay = load_config_argv(*config);
            if (std::find(replay.begin(), replay.end(), "--config") != replay.end()) throw ArgumentError("config files cannot nest");
            return run(std::move(replay), out, err);
        }
        if (app.get_subcommands().empty()) throw CLI::RequiredError("A subcommand");
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    json params = json::object();
    std::vector<std::string> canon = {name};
    auto param = [&](const std::string& key, const json& value, bool positional = false) {
        params[key] = value;
        if (positional) {
            canon.push_back(json_scalar(value));
        } else {
            canon.push_back("--" + key);
            canon.push_back(json_scalar(value));
        }
    };

    try {
        Output o;
        std::uint64_t t = 0;
        if (!t_str.empty()) t = parse_t(t_str);
        const ScanMode mode = parse_scan_mode(mode_str == "float" ? "float" : "exact");
        if (name == "density") {
            param("t", std::to_string(t), true);
            if (j_range) param("j", *j_range);
            o = cmd_density(t, j_range);
        } else if (name == "ct") {
            param("t", std::to_string(t), true);
            o = cmd_ct(t);
        } else if (name == "moments") {
            param("t", std::to_string(t), true);
            param("kmax", std::to_string(kmax));
            o = cmd_moments(t, kmax);
        } else if (name == "oracle") {
            param("t", std::to_string(t), true);
            param("j", std::to_string(j));
            if (samples) {
                param("samples", std::to_string(*samples));
            } else {
                m_bits = m_bits.value_or(oracle::default_modulus_bits(t));
                param("m", std::to_string(*m_bits));
            }
            o = cmd_oracle(t, j, m_bits, samples);
        } else if (name == "charfn") {
            param("t", std::to_string(t), true);
            params["theta"] = thetas;
            for (double th : thetas) {
                canon.push_back("--theta");
                canon.push_back(fmt_double(th));
            }
            o = cmd_charfn(t, thetas);
        } else if (name == "ct-integral") {
            param("t", std::to_string(t), true);
            param("points", std::to_string(points));
            o = cmd_ct_integral(t, points, threads);
        } else if (name == "ledger") {
            param("kmax", std::to_string(kmax));
            o = cmd_ledger(kmax);
        } else if (name == "threshold") {
            const Rational eps = parse_rational(eps_str);
            if (eps <= 0) throw ArgumentError("epsilon must be positive");
            param("epsilon", to_string(eps));
            o = cmd_threshold(eps);
        } else if (name == "verify-bounds") {
            if (t == 0) throw ArgumentError("verify-bounds: t must be >= 1");
            param("t", std::to_string(t), true);
            param("kmax", std::to_string(kmax));
            param("blocks", blocks_str);
            o = cmd_verify_bounds(t, kmax, blocks_str == "appended" ? BlockCount::appended : BlockCount::stated);
        } else if (name == "scan") {
            param("bits", std::to_string(bits));
            param("mode", std::string(to_string(mode)));
            if (checkpoint) param("checkpoint", *checkpoint);
            if (resume) {
                params["resume"] = true;
                canon.push_back("--resume");
            }
            if (split) param("split", std::to_string(*split));
            o = cmd_scan(bits, mode, threads, checkpoint, resume, split, err);
        } else if (name == "verify") {
            param("bits", std::to_string(bits));
            param("mode", std::string(to_string(mode)));
            o = cmd_verify(bits, mode, threads);
        } else {  // blocks
            param("t", std::to_string(t), true);
            o = cmd_blocks(t);
        }

        // global options go last so the canonical argv parses back to the same run
        params["format"] = format;
        params["threads"] = threads;
        canon.insert(canon.begin(), {"--format", format, "--threads", std::to_string(threads)});
        if (output) {
            params["output"] = *output;
            canon.insert(canon.begin(), {"--output", *output});
        }
        json rc = {{"command", name}, {"params", params}, {"argv", canon}, {"original_argv", original}, {"timestamp", timestamp()}};
        err << json{{"run_config", rc}}.dump() << '\n';

        if (output) {
            std::ofstream f(*output);
            if (!f) throw std::runtime_error("cannot write " + *output);
            write_output(f, o, format);
        } else {
            write_output(out, o, format);
        }
        return o.failed ? 1 : 0;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace cusick::cli
