#pragma once

#include "colabm/model.hpp"
#include "colabm/rng.hpp"
#include "colabm/table.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace colabm {

/// Explicit list of values.
struct Sample {
    std::string name;
    std::vector<ParamValue> values;
};

/// lo, lo+step, ... up to and including hi.
struct IntRange {
    std::string name;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::int64_t step = 1;
};

/// Continuous interval; only optimizers can sample it.
struct FloatRange {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
};

using ParameterSpec = std::variant<Sample, IntRange, FloatRange>;
using ParameterSpace = std::vector<ParameterSpec>;

inline const std::string& spec_name(const ParameterSpec& s) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, s);
}

inline void validate_spec(const ParameterSpec& spec) {
    if (const auto* s = std::get_if<Sample>(&spec)) {
        if (s->values.empty()) {
            throw DomainError("Sample '" + s->name + "' has no values");
        }
        for (const auto& v : s->values) {
            if (v.index() != s->values.front().index()) {
                throw DomainError("Sample '" + s->name + "' mixes value types");
            }
        }
    } else if (const auto* r = std::get_if<IntRange>(&spec)) {
        if (r->step < 1 || r->lo > r->hi) {
            throw DomainError("IntRange '" + r->name + "' needs step >= 1 and lo <= hi");
        }
    } else {
        const auto& f = std::get<FloatRange>(spec);
        if (!(f.lo < f.hi)) {
            throw DomainError("FloatRange '" + f.name + "' needs lo < hi");
        }
    }
}

inline void validate_space(const ParameterSpace& space) {
    std::set<std::string> names;
    for (const auto& s : space) {
        validate_spec(s);
        if (!names.insert(spec_name(s)).second) {
            throw DomainError("duplicate parameter name '" + spec_name(s) + "'");
        }
    }
}

/// Number of discrete values of a Sample or IntRange.
inline std::size_t cardinality(const ParameterSpec& spec) {
    if (const auto* s = std::get_if<Sample>(&spec)) {
        return s->values.size();
    }
    if (const auto* r = std::get_if<IntRange>(&spec)) {
        return static_cast<std::size_t>((r->hi - r->lo) / r->step) + 1;
    }
    throw DomainError("FloatRange '" + spec_name(spec) + "' has no discrete values");
}

inline ParamValue discrete_value(const ParameterSpec& spec, std::size_t index) {
    if (const auto* s = std::get_if<Sample>(&spec)) {
        return s->values.at(index);
    }
    if (const auto* r = std::get_if<IntRange>(&spec)) {
        return r->lo + static_cast<std::int64_t>(index) * r->step;
    }
    throw DomainError("FloatRange '" + spec_name(spec) + "' has no discrete values");
}

/// Every combination, last spec varying fastest.
inline std::vector<Params> cartesian(const ParameterSpace& space) {
    validate_space(space);
    std::vector<std::size_t> card;
    std::size_t total = 1;
    for (const auto& s : space) {
        card.push_back(cardinality(s));
        total *= card.back();
    }
    std::vector<Params> out;
    out.reserve(total);
    std::vector<std::size_t> idx(space.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rem = k;
        for (std::size_t i = space.size(); i-- > 0;) {
            idx[i] = rem % card[i];
            rem /= card[i];
        }
        Params p;
        for (std::size_t i = 0; i < space.size(); ++i) {
            p.emplace(spec_name(space[i]), discrete_value(space[i], idx[i]));
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct ExperimentPlan {
    ParameterSpace space;
    std::size_t replications = 1;
    std::int64_t steps = 0;
    std::uint64_t base_seed = 0;
};

template <typename Env = Environments>
struct ModelInstance {
    ModelSpec<Env> spec;
    Population population;
    Env env;
};

template <typename Env = Environments>
using ModelFactory = std::function<ModelInstance<Env>(const Params&)>;

/// A run failed; identifies which one.
class ExperimentError : public Error {
public:
    ExperimentError(std::size_t combo, std::size_t replication, const std::string& what)
        : Error("run (combo " + std::to_string(combo) + ", replication " +
                std::to_string(replication) + ") failed: " + what),
          combo_(combo), replication_(replication) {}

    std::size_t combo() const noexcept { return combo_; }
    std::size_t replication() const noexcept { return replication_; }

private:
    std::size_t combo_;
    std::size_t replication_;
};

/// Seed of flat run k is the k-th output of a splitmix64 stream seeded with base_seed.
inline std::vector<std::uint64_t> run_seeds(std::uint64_t base_seed, std::size_t count) {
    Rng master(base_seed);
    std::vector<std::uint64_t> seeds(count);
    for (auto& s : seeds) {
        s = master.next_u64();
    }
    return seeds;
}

namespace detail {

struct RunSummary {
    std::vector<std::string> metric_names;
    std::vector<double> final_values;
};

template <typename Env>
RunSummary run_one(const ModelFactory<Env>& factory, const Params& params, std::int64_t steps,
                   std::uint64_t seed) {
    ModelInstance<Env> inst = factory(params);
    RunResult res = run_model(inst.spec, inst.population, inst.env, params, steps, seed);
    RunSummary s;
    for (std::size_t c = 1; c < res.metrics.cols(); ++c) {
        const auto& name = res.metrics.names()[c];
        s.metric_names.push_back(name);
        s.final_values.push_back(res.metrics.column<double>(name).back());
    }
    return s;
}

inline Datum to_datum(const ParamValue& v) {
    return std::visit([](const auto& x) -> Datum { return x; }, v);
}

inline Table assemble(const ExperimentPlan& plan, const std::vector<Params>& combos,
                      const std::vector<std::uint64_t>& seeds,
                      const std::vector<RunSummary>& runs) {
    std::vector<std::string> names{"combo_index", "replication", "seed"};
    for (const auto& s : plan.space) {
        names.push_back(spec_name(s));
    }
    const auto& metric_names = runs.empty() ? std::vector<std::string>{} : runs.front().metric_names;
    for (const auto& m : metric_names) {
        names.push_back(m);
    }
    Table table(names);
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const std::size_t combo = k / plan.replications;
        const std::size_t rep = k % plan.replications;
        if (runs[k].metric_names != metric_names) {
            throw ExperimentError(combo, rep, "metric set differs from the first run");
        }
        std::vector<Datum> row{static_cast<std::int64_t>(combo), static_cast<std::int64_t>(rep),
                               seeds[k]};
        for (const auto& s : plan.space) {
            row.push_back(to_datum(combos[combo].at(spec_name(s))));
        }
        for (double v : runs[k].final_values) {
            row.emplace_back(v);
        }
        table.append_row(row);
    }
    return table;
}

} // namespace detail

/**
 * @brief Runs every (combination, replication) pair serially.
 *
 * Rows are ordered by (combo_index, replication). Metric columns hold each
 * run's final collected value.
 */
template <typename Env>
Table run_experiment(const ModelFactory<Env>& factory, const ExperimentPlan& plan) {
    if (plan.replications < 1) {
        throw DomainError("replications must be >= 1");
    }
    const auto combos = cartesian(plan.space);
    const std::size_t total = combos.size() * plan.replications;
    const auto seeds = run_seeds(plan.base_seed, total);
    std::vector<detail::RunSummary> runs;
    runs.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        try {
            runs.push_back(detail::run_one(factory, combos[k / plan.replications], plan.steps,
                                           seeds[k]));
        } catch (const std::exception& e) {
            throw ExperimentError(k / plan.replications, k % plan.replications, e.what());
        }
    }
    return detail::assemble(plan, combos, seeds, runs);
}

/// Same table as run_experiment, with runs spread over `workers` threads.
template <typename Env>
Table run_parallel(const ModelFactory<Env>& factory, const ExperimentPlan& plan,
                   std::size_t workers) {
    if (workers < 1) {
        throw DomainError("workers must be >= 1");
    }
    if (plan.replications < 1) {
        throw DomainError("replications must be >= 1");
    }
    const auto combos = cartesian(plan.space);
    const std::size_t total = combos.size() * plan.replications;
    const auto seeds = run_seeds(plan.base_seed, total);

    std::vector<std::optional<detail::RunSummary>> slots(total);
    std::atomic<std::size_t> next{0};
    std::mutex fail_mu;
    std::optional<ExperimentError> failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) {
                return;
            }
            try {
                slots[k] = detail::run_one(factory, combos[k / plan.replications], plan.steps,
                                           seeds[k]);
            } catch (const std::exception& e) {
                std::lock_guard lock(fail_mu);
                // keep the lowest failing run so the report is deterministic
                if (!failure || k < failure->combo() * plan.replications + failure->replication()) {
                    failure.emplace(k / plan.replications, k % plan.replications, e.what());
                }
            }
        }
    };

    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, std::max<std::size_t>(total, 1)); ++w) {
        pool.emplace_back(worker);
    }
    pool.clear(); // joins

    if (failure) {
        throw *failure;
    }
    std::vector<detail::RunSummary> runs;
    runs.reserve(total);
    for (auto& s : slots) {
        runs.push_back(std::move(*s));
    }
    return detail::assemble(plan, combos, seeds, runs);
}

} // namespace colabm
