#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace colabm {

enum class Backend { Columnar, Record };
enum class BenchmarkKind { Wealth, Sir, Walk };

inline std::string_view to_string(Backend b) noexcept {
    return b == Backend::Columnar ? "columnar" : "record";
}

inline std::string_view to_string(BenchmarkKind k) noexcept {
    switch (k) {
    case BenchmarkKind::Wealth: return "wealth";
    case BenchmarkKind::Sir: return "sir";
    case BenchmarkKind::Walk: return "walk";
    }
    return "?";
}

/// 64-bit FNV-1a.
class Fnv1a {
public:
    static constexpr std::uint64_t offset_basis = 0xcbf29ce484222325ULL;
    static constexpr std::uint64_t prime = 0x100000001b3ULL;

    void bytes(std::span<const std::uint8_t> data) noexcept {
        for (auto b : data) {
            h_ = (h_ ^ b) * prime;
        }
    }

    void u8(std::uint8_t v) noexcept { h_ = (h_ ^ v) * prime; }

    /// Little-endian, independent of host byte order.
    void u64(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) {
            u8(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void i64(std::int64_t v) noexcept { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) noexcept { u64(std::bit_cast<std::uint64_t>(v)); }

    std::uint64_t value() const noexcept { return h_; }

private:
    std::uint64_t h_ = offset_basis;
};

/// SIR state codes shared by both backends.
enum class Health : std::uint8_t { Susceptible = 0, Infected = 1, Recovered = 2 };

/**
 * @brief Terminal state of a benchmark run.
 *
 * Canonical serialization, per agent in ascending ID: u64 id, then
 * wealth: i64 | sir: u8 state, f64 x, f64 y | walk: f64 x, f64 y.
 * All little-endian. The digest is FNV-1a over those bytes.
 */
struct FinalState {
    BenchmarkKind kind = BenchmarkKind::Wealth;
    std::vector<std::int64_t> wealth;
    std::vector<std::uint8_t> state;
    std::vector<double> x, y;

    std::size_t agents() const noexcept {
        switch (kind) {
        case BenchmarkKind::Wealth: return wealth.size();
        case BenchmarkKind::Sir: return state.size();
        case BenchmarkKind::Walk: return x.size();
        }
        return 0;
    }

    std::uint64_t digest() const noexcept {
        Fnv1a h;
        for (std::size_t i = 0; i < agents(); ++i) {
            h.u64(i);
            switch (kind) {
            case BenchmarkKind::Wealth: h.i64(wealth[i]); break;
            case BenchmarkKind::Sir:
                h.u8(state[i]);
                h.f64(x[i]);
                h.f64(y[i]);
                break;
            case BenchmarkKind::Walk:
                h.f64(x[i]);
                h.f64(y[i]);
                break;
            }
        }
        return h.value();
    }

    friend bool operator==(const FinalState&, const FinalState&) = default;
};

inline std::uint64_t state_digest(const FinalState& s) noexcept { return s.digest(); }

} // namespace colabm
