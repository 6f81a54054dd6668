#pragma once

#include "colabm/models/final_state.hpp"
#include "colabm/models/record_store.hpp"
#include "colabm/population.hpp"
#include "colabm/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace colabm {

struct WealthParams {
    std::size_t n = 1000;
    std::int64_t steps = 100;
    std::int64_t w0 = 1;
    std::int64_t amount = 1;
};

struct WealthRun {
    FinalState final_state;
    std::vector<std::int64_t> total; // per step
    std::vector<std::int64_t> max;   // per step
};

inline Schema wealth_schema() { return {{"wealth", AttributeType::int64()}}; }

namespace detail {

inline void check(const WealthParams& p) {
    if (p.n < 2) {
        throw DomainError("wealth transfer needs n >= 2");
    }
    if (p.steps < 0) {
        throw DomainError("steps must be >= 0");
    }
}

/// Target of `self`: below(n-1), shifted past self.
template <RandomSource R>
inline std::size_t draw_target(R& rng, std::size_t self, std::size_t n) {
    const auto u = static_cast<std::size_t>(rng.below(n - 1));
    return u >= self ? u + 1 : u;
}

template <RandomSource R>
WealthRun wealth_columnar(const WealthParams& p, R& rng) {
    Population pop(wealth_schema());
    pop.add_agents(p.n, {{"wealth", p.w0}});
    const std::size_t n = p.n;

    WealthRun out;
    std::vector<std::int64_t> delta(n);
    for (std::int64_t t = 0; t < p.steps; ++t) {
        std::fill(delta.begin(), delta.end(), 0);
        const auto snapshot = pop.column<std::int64_t>("wealth");
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t to = draw_target(rng, i, n);
            const std::int64_t pay = snapshot[i] >= p.amount ? p.amount : 0;
            delta[i] -= pay;
            delta[to] += pay;
        }
        auto wealth = pop.column_mut<std::int64_t>("wealth");
        for (std::size_t i = 0; i < n; ++i) {
            wealth[i] += delta[i];
        }
        out.total.push_back(std::get<std::int64_t>(pop.aggregate("wealth", Aggregate::Sum)));
        out.max.push_back(std::get<std::int64_t>(pop.aggregate("wealth", Aggregate::Max)));
    }
    out.final_state.kind = BenchmarkKind::Wealth;
    const auto w = pop.column<std::int64_t>("wealth");
    out.final_state.wealth.assign(w.begin(), w.end());
    return out;
}

template <RandomSource R>
WealthRun wealth_record(const WealthParams& p, R& rng) {
    const std::string kWealth = "wealth", kTarget = "target", kPays = "pays";
    RecordStore agents;
    for (std::size_t i = 0; i < p.n; ++i) {
        agents.add({{kWealth, Value(p.w0)}, {kTarget, Value(std::int64_t{0})}, {kPays, Value(false)}});
    }
    const std::size_t n = p.n;

    WealthRun out;
    for (std::int64_t t = 0; t < p.steps; ++t) {
        // decide every transfer from the unmodified state
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = agents[i];
            rec[kTarget] = static_cast<std::int64_t>(draw_target(rng, i, n));
            rec[kPays] = std::get<std::int64_t>(rec[kWealth]) >= p.amount;
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = agents[i];
            if (std::get<bool>(rec[kPays])) {
                std::get<std::int64_t>(rec[kWealth]) -= p.amount;
                const auto to = static_cast<std::size_t>(std::get<std::int64_t>(rec[kTarget]));
                std::get<std::int64_t>(agents[to][kWealth]) += p.amount;
            }
        }
        std::int64_t total = 0;
        std::int64_t mx = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto w = std::get<std::int64_t>(agents[i][kWealth]);
            total += w;
            mx = i == 0 ? w : std::max(mx, w);
        }
        out.total.push_back(total);
        out.max.push_back(mx);
    }
    out.final_state.kind = BenchmarkKind::Wealth;
    for (std::size_t i = 0; i < n; ++i) {
        out.final_state.wealth.push_back(std::get<std::int64_t>(agents[i][kWealth]));
    }
    return out;
}

} // namespace detail

/**
 * @brief Wealth transfer: each agent gives `amount` to a random other agent.
 *
 * One target draw per agent per step in ascending ID, whether or not the
 * agent can pay. Payment depends on the wealth at the start of the step;
 * all transfers land together at the end of the step.
 */
template <RandomSource R>
WealthRun run_wealth(const WealthParams& p, R& rng, Backend backend) {
    detail::check(p);
    return backend == Backend::Columnar ? detail::wealth_columnar(p, rng)
                                        : detail::wealth_record(p, rng);
}

inline WealthRun run_wealth(const WealthParams& p, std::uint64_t seed, Backend backend) {
    Rng rng(seed);
    return run_wealth(p, rng, backend);
}

} // namespace colabm
