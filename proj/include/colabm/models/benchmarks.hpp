#pragma once

#include "colabm/models/final_state.hpp"
#include "colabm/models/sir.hpp"
#include "colabm/models/walk.hpp"
#include "colabm/models/wealth.hpp"

#include <optional>
#include <string_view>

namespace colabm {

inline std::optional<BenchmarkKind> parse_benchmark(std::string_view s) {
    if (s == "wealth") return BenchmarkKind::Wealth;
    if (s == "sir") return BenchmarkKind::Sir;
    if (s == "walk") return BenchmarkKind::Walk;
    return std::nullopt;
}

inline std::optional<Backend> parse_backend(std::string_view s) {
    if (s == "columnar") return Backend::Columnar;
    if (s == "record") return Backend::Record;
    return std::nullopt;
}

/// Attribute schema each benchmark stores per agent.
inline Schema benchmark_schema(BenchmarkKind k) {
    switch (k) {
    case BenchmarkKind::Wealth: return wealth_schema();
    case BenchmarkKind::Sir: return sir_schema();
    case BenchmarkKind::Walk: return walk_schema();
    }
    return {};
}

/// Full simulation with default parameters; returns the terminal state.
template <RandomSource R>
FinalState run_benchmark(BenchmarkKind kind, Backend backend, std::size_t n, std::int64_t steps,
                         R& rng) {
    switch (kind) {
    case BenchmarkKind::Wealth: {
        WealthParams p;
        p.n = n;
        p.steps = steps;
        return run_wealth(p, rng, backend).final_state;
    }
    case BenchmarkKind::Sir: {
        SirParams p;
        p.n = n;
        p.steps = steps;
        return run_sir(p, rng, backend).final_state;
    }
    case BenchmarkKind::Walk: {
        WalkParams p;
        p.n = n;
        p.steps = steps;
        return run_walk(p, rng, backend).final_state;
    }
    }
    return {};
}

inline FinalState run_benchmark(BenchmarkKind kind, Backend backend, std::size_t n,
                                std::int64_t steps, std::uint64_t seed) {
    Rng rng(seed);
    return run_benchmark(kind, backend, n, steps, rng);
}

} // namespace colabm
