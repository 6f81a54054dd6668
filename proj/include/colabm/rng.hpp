#pragma once

#include "colabm/error.hpp"

#include <concepts>
#include <cstdint>

namespace colabm {

/**
 * @brief splitmix64 generator.
 *
 * Every model, generator and optimizer in the library draws from this
 * stream. Each call to uniform() or below() consumes exactly one
 * next_u64(), so two implementations that issue the same sequence of calls
 * see the same numbers.
 */
class Rng {
public:
    explicit constexpr Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

    constexpr std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Real in [0, 1) from the top 53 bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Integer in [0, n) via the high half of a 64x64 multiply.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) {
            throw DomainError("Rng::below: n must be >= 1");
        }
        const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    constexpr std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Wraps an Rng and counts how many 64-bit outputs were consumed.
class CountingRng {
public:
    explicit CountingRng(std::uint64_t seed = 0) noexcept : rng_(seed) {}

    std::uint64_t next_u64() noexcept {
        ++draws_;
        return rng_.next_u64();
    }
    double uniform() noexcept {
        ++draws_;
        return rng_.uniform();
    }
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t v = rng_.below(n);
        ++draws_;
        return v;
    }

    std::uint64_t draws() const noexcept { return draws_; }
    void reset_count() noexcept { draws_ = 0; }

private:
    Rng rng_;
    std::uint64_t draws_ = 0;
};

template <typename G>
concept RandomSource = requires(G g, std::uint64_t n) {
    { g.next_u64() } -> std::same_as<std::uint64_t>;
    { g.uniform() } -> std::same_as<double>;
    { g.below(n) } -> std::same_as<std::uint64_t>;
};

static_assert(RandomSource<Rng>);
static_assert(RandomSource<CountingRng>);

} // namespace colabm
