#pragma once

#include "colabm/population.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace colabm {

enum class Neighborhood { Moore, VonNeumann };

using Cell = std::vector<std::int64_t>;

/**
 * @brief Discrete d-dimensional lattice.
 *
 * Agent positions live in the population's Int64 columns pos_0..pos_{d-1};
 * the environment keeps an occupancy index (cell -> agents) in step with
 * them. Several agents may share a cell.
 */
class GridEnv {
public:
    GridEnv(std::vector<std::int64_t> dims, bool torus, Neighborhood nb = Neighborhood::Moore)
        : dims_(std::move(dims)), torus_(torus), nb_(nb) {
        if (dims_.empty()) {
            throw DomainError("grid needs at least one dimension");
        }
        for (auto e : dims_) {
            if (e <= 0) {
                throw DomainError("grid extents must be positive");
            }
        }
    }

    std::size_t ndim() const noexcept { return dims_.size(); }
    const std::vector<std::int64_t>& dims() const noexcept { return dims_; }
    bool torus() const noexcept { return torus_; }
    Neighborhood neighborhood() const noexcept { return nb_; }

    static std::string position_column(std::size_t axis) { return "pos_" + std::to_string(axis); }

    /// Schema entries for the position columns of a d-dimensional grid.
    static Schema position_schema(std::size_t d) {
        Schema s;
        for (std::size_t i = 0; i < d; ++i) {
            s.push_back({position_column(i), AttributeType::int64()});
        }
        return s;
    }

    bool in_bounds(const Cell& c) const {
        if (c.size() != dims_.size()) {
            return false;
        }
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] < 0 || c[i] >= dims_[i]) {
                return false;
            }
        }
        return true;
    }

    /// Wraps on a torus; otherwise checks bounds. Throws DomainError when out of bounds.
    Cell normalize(Cell c) const {
        if (c.size() != dims_.size()) {
            throw DomainError("cell dimension does not match grid");
        }
        if (torus_) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                c[i] = ((c[i] % dims_[i]) + dims_[i]) % dims_[i];
            }
        } else if (!in_bounds(c)) {
            throw DomainError("cell out of bounds on a non-torus grid");
        }
        return c;
    }

    /// Cells within `radius` (Chebyshev for Moore, Manhattan for von Neumann),
    /// excluding `cell`, sorted and duplicate-free.
    std::vector<Cell> neighbor_cells(const Cell& cell, std::int64_t radius) const {
        if (!in_bounds(cell)) {
            throw DomainError("neighbor_cells: cell out of bounds");
        }
        if (radius < 1) {
            throw DomainError("neighbor_cells: radius must be positive");
        }
        const std::size_t d = dims_.size();
        const std::int64_t side = 2 * radius + 1;
        std::int64_t total = 1;
        for (std::size_t i = 0; i < d; ++i) {
            total *= side;
        }
        std::vector<Cell> out;
        Cell offset(d);
        for (std::int64_t k = 0; k < total; ++k) {
            std::int64_t rem = k;
            std::int64_t manhattan = 0;
            for (std::size_t i = d; i-- > 0;) {
                offset[i] = rem % side - radius;
                rem /= side;
                manhattan += offset[i] < 0 ? -offset[i] : offset[i];
            }
            if (manhattan == 0 || (nb_ == Neighborhood::VonNeumann && manhattan > radius)) {
                continue;
            }
            Cell target(d);
            bool keep = true;
            for (std::size_t i = 0; i < d && keep; ++i) {
                std::int64_t v = cell[i] + offset[i];
                if (torus_) {
                    v = ((v % dims_[i]) + dims_[i]) % dims_[i];
                } else if (v < 0 || v >= dims_[i]) {
                    keep = false;
                }
                target[i] = v;
            }
            if (keep && target != cell) {
                out.push_back(std::move(target));
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    void place(Population& pop, AgentId id, const Cell& cell) {
        if (!pop.is_alive(id)) {
            throw LivenessError("grid place: agent " + std::to_string(id) + " is not alive");
        }
        Cell c = normalize(cell);
        unlink(id);
        for (std::size_t i = 0; i < c.size(); ++i) {
            pop.set<std::int64_t>(id, position_column(i), c[i]);
        }
        occupancy_[c].insert(id);
        where_[id] = std::move(c);
    }

    void move(Population& pop, AgentId id, const Cell& cell) {
        if (!where_.contains(id)) {
            throw DomainError("grid move: agent " + std::to_string(id) + " has not been placed");
        }
        place(pop, id, cell);
    }

    /// Forgets an agent (e.g. before removing it from the population).
    void remove(AgentId id) { unlink(id); where_.erase(id); }

    std::vector<AgentId> agents_at(const Cell& cell) const {
        auto it = occupancy_.find(normalize(cell));
        if (it == occupancy_.end()) {
            return {};
        }
        return {it->second.begin(), it->second.end()};
    }

    /// Agents in the neighbor cells of `cell` (not including `cell` itself), ascending.
    std::vector<AgentId> neighbor_agents(const Cell& cell, std::int64_t radius) const {
        std::vector<AgentId> out;
        for (const auto& c : neighbor_cells(cell, radius)) {
            auto it = occupancy_.find(c);
            if (it != occupancy_.end()) {
                out.insert(out.end(), it->second.begin(), it->second.end());
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::optional<Cell> position_of(AgentId id) const {
        auto it = where_.find(id);
        if (it == where_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    const std::map<Cell, std::set<AgentId>>& occupancy() const noexcept { return occupancy_; }

    /// Occupancy recomputed from the population's position columns for every placed agent.
    std::map<Cell, std::set<AgentId>> occupancy_from_columns(const Population& pop) const {
        std::map<Cell, std::set<AgentId>> occ;
        for (const auto& [id, _] : where_) {
            Cell c(dims_.size());
            for (std::size_t i = 0; i < c.size(); ++i) {
                c[i] = pop.get<std::int64_t>(id, position_column(i));
            }
            occ[c].insert(id);
        }
        return occ;
    }

private:
    void unlink(AgentId id) {
        auto it = where_.find(id);
        if (it == where_.end()) {
            return;
        }
        auto occ = occupancy_.find(it->second);
        occ->second.erase(id);
        if (occ->second.empty()) {
            occupancy_.erase(occ);
        }
    }

    std::vector<std::int64_t> dims_;
    bool torus_;
    Neighborhood nb_;
    std::map<Cell, std::set<AgentId>> occupancy_;
    std::map<AgentId, Cell> where_;
};

} // namespace colabm
