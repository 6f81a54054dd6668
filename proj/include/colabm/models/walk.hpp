#pragma once

#include "colabm/models/final_state.hpp"
#include "colabm/models/record_store.hpp"
#include "colabm/population.hpp"
#include "colabm/rng.hpp"
#include "colabm/space.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace colabm {

struct WalkParams {
    std::size_t n = 1000;
    std::int64_t steps = 100;
    double side = 100.0;
    double vmax = 1.0;
};

struct WalkRun {
    FinalState final_state;
    std::vector<double> mean_displacement; // per step, from each agent's start position
};

inline Schema walk_schema() {
    return {{"x", AttributeType::float64()},  {"y", AttributeType::float64()},
            {"x0", AttributeType::float64()}, {"y0", AttributeType::float64()},
            {"vx", AttributeType::float64()}, {"vy", AttributeType::float64()}};
}

namespace detail {

inline void check(const WalkParams& p) {
    if (p.steps < 0) {
        throw DomainError("steps must be >= 0");
    }
    if (!(p.vmax >= 0.0) || !(p.side > 0.0)) {
        throw DomainError("walk needs vmax >= 0 and side > 0");
    }
}

template <RandomSource R>
WalkRun walk_columnar(const WalkParams& p, R& rng) {
    const std::size_t n = p.n;
    WalkRun out;
    out.final_state.kind = BenchmarkKind::Walk;
    if (n == 0) {
        out.mean_displacement.assign(static_cast<std::size_t>(p.steps), 0.0);
        return out;
    }
    Population pop(walk_schema());
    pop.add_agents(n);
    std::vector<double> draws(2 * n);
    auto fill_draws = [&] {
        for (auto& d : draws) {
            d = rng.uniform();
        }
    };

    fill_draws();
    {
        auto x = pop.column_mut<double>("x");
        auto y = pop.column_mut<double>("y");
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = draws[2 * i] * p.side;
            y[i] = draws[2 * i + 1] * p.side;
        }
        auto x0 = pop.column_mut<double>("x0");
        auto y0 = pop.column_mut<double>("y0");
        std::copy(x.begin(), x.end(), x0.begin());
        std::copy(y.begin(), y.end(), y0.begin());
    }

    const double top = upper_clip(p.side);
    const double vmax = p.vmax;
    auto step_axis = [top](double pos, double v) { return std::clamp(pos + v, 0.0, top); };
    for (std::int64_t t = 0; t < p.steps; ++t) {
        fill_draws();
        {
            auto vx = pop.column_mut<double>("vx");
            auto vy = pop.column_mut<double>("vy");
            for (std::size_t i = 0; i < n; ++i) {
                vx[i] = (2.0 * draws[2 * i] - 1.0) * vmax;
                vy[i] = (2.0 * draws[2 * i + 1] - 1.0) * vmax;
            }
        }
        pop.update_column<double, double, double>({"x", "vx"}, "x", step_axis);
        pop.update_column<double, double, double>({"y", "vy"}, "y", step_axis);

        const auto x = pop.column<double>("x");
        const auto y = pop.column<double>("y");
        const auto x0 = pop.column<double>("x0");
        const auto y0 = pop.column<double>("y0");
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = x[i] - x0[i];
            const double dy = y[i] - y0[i];
            sum += std::sqrt(dx * dx + dy * dy);
        }
        out.mean_displacement.push_back(sum / static_cast<double>(n));
    }

    const auto x = pop.column<double>("x");
    const auto y = pop.column<double>("y");
    out.final_state.x.assign(x.begin(), x.end());
    out.final_state.y.assign(y.begin(), y.end());
    return out;
}

template <RandomSource R>
WalkRun walk_record(const WalkParams& p, R& rng) {
    const std::string kX = "x", kY = "y", kX0 = "x0", kY0 = "y0", kVx = "vx", kVy = "vy";
    const std::size_t n = p.n;
    RecordStore agents;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform() * p.side;
        const double y = rng.uniform() * p.side;
        agents.add({{kX, Value(x)}, {kY, Value(y)}, {kX0, Value(x)}, {kY0, Value(y)},
                    {kVx, Value(0.0)}, {kVy, Value(0.0)}});
    }
    const double top = upper_clip(p.side);

    WalkRun out;
    out.final_state.kind = BenchmarkKind::Walk;
    for (std::int64_t t = 0; t < p.steps; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = agents[i];
            rec[kVx] = (2.0 * rng.uniform() - 1.0) * p.vmax;
            rec[kVy] = (2.0 * rng.uniform() - 1.0) * p.vmax;
            rec[kX] = std::clamp(std::get<double>(rec[kX]) + std::get<double>(rec[kVx]), 0.0, top);
            rec[kY] = std::clamp(std::get<double>(rec[kY]) + std::get<double>(rec[kVy]), 0.0, top);
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = agents[i];
            const double dx = std::get<double>(rec[kX]) - std::get<double>(rec[kX0]);
            const double dy = std::get<double>(rec[kY]) - std::get<double>(rec[kY0]);
            sum += std::sqrt(dx * dx + dy * dy);
        }
        out.mean_displacement.push_back(n ? sum / static_cast<double>(n) : 0.0);
    }

    for (std::size_t i = 0; i < n; ++i) {
        out.final_state.x.push_back(std::get<double>(agents[i][kX]));
        out.final_state.y.push_back(std::get<double>(agents[i][kY]));
    }
    return out;
}

} // namespace detail

/**
 * @brief Random walk in [0, side)^2 with clipping at the walls.
 *
 * Setup draws x then y per agent. Each step draws vx then vy per agent
 * (ascending ID), v = (2u - 1) * vmax, and clips pos + v into
 * [0, largest double below side].
 */
template <RandomSource R>
WalkRun run_walk(const WalkParams& p, R& rng, Backend backend) {
    detail::check(p);
    return backend == Backend::Columnar ? detail::walk_columnar(p, rng)
                                        : detail::walk_record(p, rng);
}

inline WalkRun run_walk(const WalkParams& p, std::uint64_t seed, Backend backend) {
    Rng rng(seed);
    return run_walk(p, rng, backend);
}

} // namespace colabm
