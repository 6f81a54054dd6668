#pragma once

#include "colabm/population.hpp"

#include <string_view>
#include <vector>

namespace colabm {

/// Object-style handle to one agent. Holds no attribute state; every access
/// goes through the Population, so batch staging applies here as well.
class AgentView {
public:
    AgentView(Population& pop, AgentId id) : pop_(&pop), id_(id) {
        if (!pop.is_alive(id)) {
            throw LivenessError("cannot view agent " + std::to_string(id) + ": not alive");
        }
    }

    AgentId id() const noexcept { return id_; }
    Population& population() const noexcept { return *pop_; }

    Value get(std::string_view attr) const { return pop_->get_value(id_, attr); }
    void set(std::string_view attr, const Value& v) { pop_->set_value(id_, attr, v); }

    template <ColumnElement T>
    T get(std::string_view attr) const {
        return pop_->get<T>(id_, attr);
    }
    template <ColumnElement T>
    void set(std::string_view attr, T v) {
        pop_->set<T>(id_, attr, v);
    }

    /// Read-modify-write in the style of `agent.wealth += 100`.
    template <ColumnElement T, typename F>
    void modify(std::string_view attr, F&& fn) {
        set<T>(attr, fn(get<T>(attr)));
    }

private:
    Population* pop_;
    AgentId id_;
};

inline AgentView view(Population& pop, AgentId id) { return AgentView(pop, id); }

inline std::vector<AgentId> live_ids(const Population& pop) { return pop.live_ids(); }

} // namespace colabm
