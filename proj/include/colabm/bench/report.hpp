#pragma once

#include "colabm/bench/protocol.hpp"
#include "colabm/error.hpp"
#include "colabm/models/benchmarks.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace colabm {

inline constexpr std::size_t kRunColumns = 5;
inline constexpr const char* kReportHeader =
    "benchmark,backend,n,steps,seed,median_s,run1_s,run2_s,run3_s,run4_s,run5_s,digest";

inline std::vector<std::size_t> default_sizes() { return {100, 500, 1000, 2000, 5000, 10000}; }

/// Rounds to the 9 significant digits the CSV carries, so rows round-trip exactly.
inline double quantize9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

struct BenchRow {
    std::string benchmark;
    std::string backend;
    std::size_t n = 0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    double median_s = 0.0;
    std::vector<double> runs; // measured samples, at most kRunColumns
    std::uint64_t digest = 0;

    bool operator==(const BenchRow&) const = default;
};

inline std::string format_row(const BenchRow& r) {
    if (r.runs.size() > kRunColumns) {
        throw DomainError("report rows carry at most 5 measured runs");
    }
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    std::string s = r.benchmark + "," + r.backend + "," + std::to_string(r.n) + "," +
                    std::to_string(r.steps) + "," + std::to_string(r.seed) + "," + num(r.median_s);
    for (std::size_t i = 0; i < kRunColumns; ++i) {
        s += ",";
        if (i < r.runs.size()) {
            s += num(r.runs[i]);
        }
    }
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, r.digest);
    s += ",";
    s += hex;
    return s;
}

inline void write_report(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << kReportHeader << '\n';
    for (const auto& r : rows) {
        os << format_row(r) << '\n';
    }
}

namespace detail {

template <typename T>
T parse_field(const std::string& s, int base = 10) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw Error("report: bad field '" + s + "'");
    }
    return v;
}

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw Error("report: bad number '" + s + "'");
    }
    return v;
}

} // namespace detail

inline BenchRow parse_row(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        f.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        f.emplace_back();
    }
    if (f.size() != 12) {
        throw Error("report: expected 12 fields, got " + std::to_string(f.size()));
    }
    BenchRow r;
    r.benchmark = f[0];
    r.backend = f[1];
    r.n = detail::parse_field<std::size_t>(f[2]);
    r.steps = detail::parse_field<std::int64_t>(f[3]);
    r.seed = detail::parse_field<std::uint64_t>(f[4]);
    r.median_s = detail::parse_double(f[5]);
    for (std::size_t i = 0; i < kRunColumns; ++i) {
        if (!f[6 + i].empty()) {
            r.runs.push_back(detail::parse_double(f[6 + i]));
        }
    }
    if (f[11].size() != 16) {
        throw Error("report: digest must be 16 hex characters");
    }
    r.digest = detail::parse_field<std::uint64_t>(f[11], 16);
    return r;
}

inline std::vector<BenchRow> read_report(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kReportHeader) {
        throw Error("report: missing or unexpected header");
    }
    std::vector<BenchRow> rows;
    while (std::getline(is, line)) {
        if (!line.empty()) {
            rows.push_back(parse_row(line));
        }
    }
    return rows;
}

struct ConfigTiming {
    Timing timing;
    std::uint64_t digest = 0;
};

/// Called once per simulation run, warmups included.
using RunHook = std::function<void()>;

/**
 * @brief Times one (benchmark, backend, n) configuration.
 *
 * Every run re-seeds from `seed`, so all runs must end in the same state;
 * a differing digest is reported as an error.
 */
inline ConfigTiming time_config(BenchmarkKind kind, Backend backend, std::size_t n,
                                std::int64_t steps, std::uint64_t seed,
                                const TimingProtocol& protocol = {}, const RunHook& hook = {}) {
    std::optional<std::uint64_t> digest;
    auto run = [&] {
        if (hook) {
            hook();
        }
        const std::uint64_t d = run_benchmark(kind, backend, n, steps, seed).digest();
        if (digest && *digest != d) {
            throw Error("benchmark " + std::string(to_string(kind)) +
                        " produced different final states for one seed");
        }
        digest = d;
    };
    ConfigTiming out;
    out.timing = time_protocol(run, protocol);
    out.digest = digest.value_or(0);
    return out;
}

inline BenchRow make_row(BenchmarkKind kind, Backend backend, std::size_t n, std::int64_t steps,
                         std::uint64_t seed, const ConfigTiming& t) {
    BenchRow r;
    r.benchmark = to_string(kind);
    r.backend = to_string(backend);
    r.n = n;
    r.steps = steps;
    r.seed = seed;
    r.median_s = quantize9(t.timing.median_s);
    for (double s : t.timing.samples) {
        r.runs.push_back(quantize9(s));
    }
    r.digest = t.digest;
    return r;
}

struct SweepConfig {
    std::vector<BenchmarkKind> benchmarks{BenchmarkKind::Wealth, BenchmarkKind::Sir,
                                          BenchmarkKind::Walk};
    std::vector<Backend> backends{Backend::Columnar, Backend::Record};
    std::vector<std::size_t> sizes = default_sizes();
    std::int64_t steps = 100;
    std::uint64_t seed = 0;
    TimingProtocol protocol;
};

/**
 * @brief Times every (benchmark, backend, n) in that nesting order.
 *
 * When `sink` is given the header and each row are written and flushed as
 * soon as they exist, so a failure leaves the completed rows behind.
 */
inline std::vector<BenchRow> sweep(const SweepConfig& cfg, std::ostream* sink = nullptr,
                                   const RunHook& hook = {}) {
    cfg.protocol.validate();
    if (cfg.protocol.measured_runs > kRunColumns) {
        throw DomainError("the report schema holds at most 5 measured runs");
    }
    if (sink) {
        *sink << kReportHeader << '\n' << std::flush;
    }
    std::vector<BenchRow> rows;
    for (auto kind : cfg.benchmarks) {
        for (auto backend : cfg.backends) {
            for (auto n : cfg.sizes) {
                const auto t = time_config(kind, backend, n, cfg.steps, cfg.seed, cfg.protocol, hook);
                rows.push_back(make_row(kind, backend, n, cfg.steps, cfg.seed, t));
                if (sink) {
                    *sink << format_row(rows.back()) << '\n' << std::flush;
                }
            }
        }
    }
    return rows;
}

} // namespace colabm
