#pragma once

#include "colabm/models/final_state.hpp"
#include "colabm/models/record_store.hpp"
#include "colabm/population.hpp"
#include "colabm/rng.hpp"
#include "colabm/spatial_index.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace colabm {

/// How the record baseline finds infected contacts.
enum class NeighborSearch { KdTree, BruteForce };

struct SirParams {
    std::size_t n = 1000;
    std::int64_t steps = 100;
    double side = 100.0;
    double radius = 2.0;
    double p_infect = 0.1;
    double p_recover = 0.05;
    double init_infected_frac = 0.01;
    NeighborSearch baseline_search = NeighborSearch::KdTree;
};

struct SirRun {
    FinalState final_state;
    std::vector<std::int64_t> s, i, r; // per step, after the step
    std::vector<std::int64_t> exposed; // susceptibles with >= 1 infected neighbor, per step
};

inline Schema sir_schema() {
    return {{"state", AttributeType::categorical({"S", "I", "R"})},
            {"x", AttributeType::float64()},
            {"y", AttributeType::float64()}};
}

namespace detail {

inline void check(const SirParams& p) {
    if (p.steps < 0) {
        throw DomainError("steps must be >= 0");
    }
    auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!prob(p.p_infect) || !prob(p.p_recover) || !prob(p.init_infected_frac)) {
        throw DomainError("SIR probabilities must lie in [0, 1]");
    }
    if (!(p.radius > 0.0) || !(p.side > 0.0)) {
        throw DomainError("SIR radius and side must be positive");
    }
}

inline std::size_t initial_infected(const SirParams& p) {
    return static_cast<std::size_t>(std::ceil(p.init_infected_frac * static_cast<double>(p.n)));
}

template <typename Counts>
void tally(SirRun& out, const Counts& c, std::int64_t exposed) {
    out.s.push_back(c[0]);
    out.i.push_back(c[1]);
    out.r.push_back(c[2]);
    out.exposed.push_back(exposed);
}

constexpr std::int32_t kS = 0, kI = 1, kR = 2;

template <RandomSource R>
SirRun sir_columnar(const SirParams& p, R& rng) {
    const std::size_t n = p.n;
    Population pop(sir_schema());
    SirRun out;
    out.final_state.kind = BenchmarkKind::Sir;
    if (n == 0) {
        for (std::int64_t t = 0; t < p.steps; ++t) {
            tally(out, std::array<std::int64_t, 3>{}, 0);
        }
        return out;
    }
    pop.add_agents(n);
    {
        std::vector<double> draws(2 * n);
        for (auto& d : draws) {
            d = rng.uniform();
        }
        auto x = pop.column_mut<double>("x");
        auto y = pop.column_mut<double>("y");
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = draws[2 * i] * p.side;
            y[i] = draws[2 * i + 1] * p.side;
        }
        auto state = pop.column_mut<Category>("state");
        const std::size_t k = std::min(initial_infected(p), n);
        for (std::size_t i = 0; i < k; ++i) {
            state[i] = Category{kI};
        }
    }

    // positions never move, so one index serves the whole run
    const auto xs = pop.column<double>("x");
    const auto ys = pop.column<double>("y");
    std::vector<double> coords(2 * n);
    std::vector<AgentId> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        coords[2 * i] = xs[i];
        coords[2 * i + 1] = ys[i];
        ids[i] = i;
    }
    const SpatialIndex index(2, std::move(ids), std::move(coords));

    std::vector<Category> next(n);
    for (std::int64_t t = 0; t < p.steps; ++t) {
        const auto snap = pop.column<Category>("state");
        std::copy(snap.begin(), snap.end(), next.begin());
        std::int64_t exposed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (snap[i].code != kS) {
                continue;
            }
            const std::array<double, 2> c{xs[i], ys[i]};
            const bool contact = index.any_within(c, p.radius, [&](AgentId j) {
                return j != i && snap[j].code == kI;
            });
            if (contact) {
                ++exposed;
                if (rng.uniform() < p.p_infect) {
                    next[i] = Category{kI};
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (snap[i].code == kI && rng.uniform() < p.p_recover) {
                next[i] = Category{kR};
            }
        }
        auto state = pop.column_mut<Category>("state");
        std::copy(next.begin(), next.end(), state.begin());

        std::array<std::int64_t, 3> counts{};
        for (auto s : state) {
            ++counts[static_cast<std::size_t>(s.code)];
        }
        tally(out, counts, exposed);
    }

    const auto state = pop.column<Category>("state");
    for (std::size_t i = 0; i < n; ++i) {
        out.final_state.state.push_back(static_cast<std::uint8_t>(state[i].code));
    }
    out.final_state.x.assign(xs.begin(), xs.end());
    out.final_state.y.assign(ys.begin(), ys.end());
    return out;
}

template <RandomSource R>
SirRun sir_record(const SirParams& p, R& rng) {
    const std::string kState = "state", kNext = "next_state", kX = "x", kY = "y";
    const std::size_t n = p.n;
    RecordStore agents;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform() * p.side;
        const double y = rng.uniform() * p.side;
        agents.add({{kState, Value(std::int64_t{kS})},
                    {kNext, Value(std::int64_t{kS})},
                    {kX, Value(x)},
                    {kY, Value(y)}});
    }
    const std::size_t k = std::min(initial_infected(p), n);
    for (std::size_t i = 0; i < k; ++i) {
        agents[i][kState] = std::int64_t{kI};
    }
    const double r2 = p.radius * p.radius;

    std::optional<SpatialIndex> index;
    if (p.baseline_search == NeighborSearch::KdTree && n > 0) {
        std::vector<AgentId> ids(n);
        std::vector<double> coords(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            ids[i] = i;
            coords[2 * i] = std::get<double>(agents[i][kX]);
            coords[2 * i + 1] = std::get<double>(agents[i][kY]);
        }
        index.emplace(2, std::move(ids), std::move(coords));
    }

    SirRun out;
    out.final_state.kind = BenchmarkKind::Sir;
    for (std::int64_t t = 0; t < p.steps; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = agents[i];
            rec[kNext] = rec[kState];
        }
        std::int64_t exposed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = agents[i];
            if (std::get<std::int64_t>(rec[kState]) != kS) {
                continue;
            }
            const std::array<double, 2> me{std::get<double>(rec[kX]), std::get<double>(rec[kY])};
            auto infected = [&](AgentId j) {
                return j != i && std::get<std::int64_t>(agents[j][kState]) == kI;
            };
            bool contact = false;
            if (index) {
                contact = index->any_within(me, p.radius, infected);
            } else {
                for (std::size_t j = 0; j < n && !contact; ++j) {
                    if (!infected(j)) {
                        continue;
                    }
                    auto& other = agents[j];
                    const std::array<double, 2> them{std::get<double>(other[kX]),
                                                     std::get<double>(other[kY])};
                    contact = squared_distance(me, them) <= r2;
                }
            }
            if (contact) {
                ++exposed;
                if (rng.uniform() < p.p_infect) {
                    rec[kNext] = std::int64_t{kI};
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = agents[i];
            if (std::get<std::int64_t>(rec[kState]) == kI && rng.uniform() < p.p_recover) {
                rec[kNext] = std::int64_t{kR};
            }
        }
        std::array<std::int64_t, 3> counts{};
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = agents[i];
            rec[kState] = rec[kNext];
            ++counts[static_cast<std::size_t>(std::get<std::int64_t>(rec[kState]))];
        }
        tally(out, counts, exposed);
    }

    for (std::size_t i = 0; i < n; ++i) {
        auto& rec = agents[i];
        out.final_state.state.push_back(
            static_cast<std::uint8_t>(std::get<std::int64_t>(rec[kState])));
        out.final_state.x.push_back(std::get<double>(rec[kX]));
        out.final_state.y.push_back(std::get<double>(rec[kY]));
    }
    return out;
}

} // namespace detail

/**
 * @brief SIR epidemic in a static square of side `side`.
 *
 * Setup draws x then y per agent (ascending ID); the lowest-ID
 * ceil(frac * n) agents start infected. Each step, from the state at its
 * start: every susceptible with at least one infected agent within
 * `radius` draws one uniform and becomes infected below p_infect; then
 * every infected agent draws one uniform and recovers below p_recover.
 * Both passes commit together.
 *
 * The columnar backend answers contact queries with a KD-tree over the
 * column data. The record baseline uses a KD-tree built from its records
 * or, with NeighborSearch::BruteForce, scans every record.
 */
template <RandomSource R>
SirRun run_sir(const SirParams& p, R& rng, Backend backend) {
    detail::check(p);
    return backend == Backend::Columnar ? detail::sir_columnar(p, rng) : detail::sir_record(p, rng);
}

inline SirRun run_sir(const SirParams& p, std::uint64_t seed, Backend backend) {
    Rng rng(seed);
    return run_sir(p, rng, backend);
}

} // namespace colabm
