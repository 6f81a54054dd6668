#pragma once

#include "colabm/graph.hpp"
#include "colabm/grid.hpp"
#include "colabm/population.hpp"
#include "colabm/rng.hpp"
#include "colabm/space.hpp"
#include "colabm/table.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace colabm {

enum class UpdateMode { Synchronous, Asynchronous };

using ParamValue = std::variant<std::int64_t, double, std::string>;
using Params = std::map<std::string, ParamValue, std::less<>>;

inline double param_double(const Params& p, std::string_view name) {
    auto it = p.find(name);
    if (it == p.end()) {
        throw SchemaError("missing parameter '" + std::string(name) + "'");
    }
    if (auto* i = std::get_if<std::int64_t>(&it->second)) {
        return static_cast<double>(*i);
    }
    if (auto* d = std::get_if<double>(&it->second)) {
        return *d;
    }
    throw DtypeError("parameter '" + std::string(name) + "' is not numeric");
}

inline std::int64_t param_int(const Params& p, std::string_view name) {
    auto it = p.find(name);
    if (it == p.end()) {
        throw SchemaError("missing parameter '" + std::string(name) + "'");
    }
    if (auto* i = std::get_if<std::int64_t>(&it->second)) {
        return *i;
    }
    throw DtypeError("parameter '" + std::string(name) + "' is not an integer");
}

/// Environments a model may use. Absent members are simply not used.
struct Environments {
    std::optional<GridEnv> grid;
    std::optional<SpaceEnv> space;
    std::optional<Graph> network;
};

using Metrics = std::vector<std::pair<std::string, double>>;

/**
 * @brief A model: setup once, then step/collect per tick.
 *
 * In Synchronous mode the runner forbids immediate set_value writes during
 * step; state changes must go through update_column/update_where, direct
 * column writes or a BatchUpdate. Asynchronous mode allows immediate
 * per-agent writes, which later agents in the same step observe.
 */
template <typename Env = Environments>
struct ModelSpec {
    std::function<void(Population&, Env&, const Params&, Rng&)> setup;
    std::function<void(std::int64_t, Population&, Env&, const Params&, Rng&)> step;
    std::function<Metrics(std::int64_t, const Population&, const Env&)> collect;
    UpdateMode mode = UpdateMode::Synchronous;
};

struct RunResult {
    Table metrics;
    Params params;
    std::uint64_t seed = 0;
};

template <typename Env>
RunResult run_model(const ModelSpec<Env>& spec, Population& pop, Env& env, const Params& params,
                    std::int64_t steps, std::uint64_t seed) {
    if (steps < 0) {
        throw DomainError("run_model: steps must be >= 0");
    }
    Rng rng(seed);
    if (spec.setup) {
        spec.setup(pop, env, params, rng);
    }

    std::optional<Table> metrics;
    for (std::int64_t t = 1; t <= steps; ++t) {
        if (spec.step) {
            const bool previous = pop.batched_writes_only();
            pop.set_batched_writes_only(spec.mode == UpdateMode::Synchronous);
            try {
                spec.step(t, pop, env, params, rng);
            } catch (...) {
                pop.set_batched_writes_only(previous);
                throw;
            }
            pop.set_batched_writes_only(previous);
        }
        Metrics row = spec.collect ? spec.collect(t, pop, env) : Metrics{};
        if (!metrics) {
            std::vector<std::string> names{"t"};
            for (const auto& [name, _] : row) {
                names.push_back(name);
            }
            metrics.emplace(std::move(names));
        }
        if (row.size() + 1 != metrics->cols()) {
            throw SchemaError("collect returned a different metric set than on the first step");
        }
        std::vector<Datum> cells{Datum{t}};
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (metrics->names()[i + 1] != row[i].first) {
                throw SchemaError("collect returned metric '" + row[i].first +
                                  "' where '" + metrics->names()[i + 1] + "' was expected");
            }
            cells.emplace_back(row[i].second);
        }
        metrics->append_row(cells);
    }
    if (!metrics) {
        metrics.emplace(std::vector<std::string>{"t"});
    }
    return RunResult{std::move(*metrics), params, seed};
}

} // namespace colabm
