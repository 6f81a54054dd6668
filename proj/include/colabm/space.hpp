#pragma once

#include "colabm/population.hpp"
#include "colabm/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace colabm {

enum class Boundary { Bounded, Wrapped, Unbounded };

/// Largest double strictly below `high`: the top of a clipped half-open interval.
inline double upper_clip(double high) noexcept {
    return std::nextafter(high, -std::numeric_limits<double>::infinity());
}

inline double clip_half_open(double x, double low, double high) noexcept {
    return std::clamp(x, low, upper_clip(high));
}

/// Maps x into [low, high) modulo the extent.
inline double wrap_half_open(double x, double low, double high) noexcept {
    const double w = high - low;
    double m = std::fmod(x - low, w);
    if (m < 0.0) {
        m += w;
    }
    const double y = low + m;
    return y >= high ? low : y;
}

/**
 * @brief Continuous d-dimensional space.
 *
 * Positions are Float64 columns (pos_0.. by default). Bounded and wrapped
 * spaces keep every stored coordinate in [low, high).
 *
 * neighbors_within caches a SpatialIndex keyed on the population's version,
 * so it is not safe to call concurrently.
 */
class SpaceEnv {
public:
    SpaceEnv(std::vector<double> low, std::vector<double> high, Boundary boundary,
             std::vector<std::string> coord_columns = {})
        : low_(std::move(low)), high_(std::move(high)), boundary_(boundary),
          columns_(std::move(coord_columns)) {
        if (low_.empty() || low_.size() != high_.size()) {
            throw DomainError("space bounds must be non-empty and of equal length");
        }
        for (std::size_t i = 0; i < low_.size(); ++i) {
            if (!(low_[i] < high_[i])) {
                throw DomainError("space bounds require low < high");
            }
        }
        if (columns_.empty()) {
            for (std::size_t i = 0; i < low_.size(); ++i) {
                columns_.push_back("pos_" + std::to_string(i));
            }
        }
        if (columns_.size() != low_.size()) {
            throw DomainError("one coordinate column per dimension is required");
        }
    }

    std::size_t ndim() const noexcept { return low_.size(); }
    Boundary boundary() const noexcept { return boundary_; }
    const std::vector<double>& low() const noexcept { return low_; }
    const std::vector<double>& high() const noexcept { return high_; }
    const std::vector<std::string>& coord_columns() const noexcept { return columns_; }

    Schema position_schema() const {
        Schema s;
        for (const auto& c : columns_) {
            s.push_back({c, AttributeType::float64()});
        }
        return s;
    }

    /// Applies the boundary rule to a target position.
    std::vector<double> normalize(std::span<const double> target) const {
        if (target.size() != ndim()) {
            throw DomainError("target dimension does not match space");
        }
        std::vector<double> out(target.begin(), target.end());
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!std::isfinite(out[i])) {
                throw DomainError("target coordinates must be finite");
            }
            switch (boundary_) {
            case Boundary::Bounded: out[i] = clip_half_open(out[i], low_[i], high_[i]); break;
            case Boundary::Wrapped: out[i] = wrap_half_open(out[i], low_[i], high_[i]); break;
            case Boundary::Unbounded: break;
            }
        }
        return out;
    }

    /// Moves an agent and returns the stored coordinates.
    std::vector<double> move(Population& pop, AgentId id, std::span<const double> target) const {
        if (!pop.is_alive(id)) {
            throw LivenessError("space move: agent " + std::to_string(id) + " is not alive");
        }
        auto pos = normalize(target);
        for (std::size_t i = 0; i < pos.size(); ++i) {
            pop.set<double>(id, columns_[i], pos[i]);
        }
        return pos;
    }

    std::vector<double> position(const Population& pop, AgentId id) const {
        std::vector<double> p(ndim());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = pop.get<double>(id, columns_[i]);
        }
        return p;
    }

    /// Squared distance under this space's metric (minimum image when wrapped).
    double distance2(std::span<const double> a, std::span<const double> b) const {
        if (boundary_ != Boundary::Wrapped) {
            return squared_distance(a, b);
        }
        double s = 0.0;
        for (std::size_t d = 0; d < a.size(); ++d) {
            double diff = std::fabs(a[d] - b[d]);
            diff = std::min(diff, (high_[d] - low_[d]) - diff);
            s += diff * diff;
        }
        return s;
    }

    /// Snapshot index over every live agent's current position.
    SpatialIndex build_index(const Population& pop) const {
        std::vector<AgentId> ids;
        std::vector<double> coords;
        ids.reserve(pop.live_count());
        coords.reserve(pop.live_count() * ndim());
        std::vector<std::span<const double>> cols;
        for (const auto& c : columns_) {
            cols.push_back(pop.column<double>(c));
        }
        const auto alive = pop.alive_mask();
        for (std::size_t r = 0; r < pop.rows(); ++r) {
            if (!alive[r]) {
                continue;
            }
            ids.push_back(pop.id_at(r));
            for (const auto& col : cols) {
                coords.push_back(col[r]);
            }
        }
        return SpatialIndex(ndim(), std::move(ids), std::move(coords));
    }

    /**
     * @brief Live agents within distance r of `center` (inclusive), ascending.
     *
     * Flat metrics go through a cached KD-tree. Wrapped spaces scan every
     * agent with the minimum-image metric instead.
     */
    std::vector<AgentId> neighbors_within(const Population& pop, std::span<const double> center,
                                          double r,
                                          std::optional<AgentId> exclude = std::nullopt) const {
        if (center.size() != ndim()) {
            throw DomainError("center dimension does not match space");
        }
        if (r < 0.0) {
            throw DomainError("radius must be non-negative");
        }
        std::vector<AgentId> out;
        if (boundary_ == Boundary::Wrapped) {
            out = scan_within(pop, center, r);
        } else {
            out = cached_index(pop).radius(center, r);
        }
        if (exclude) {
            std::erase(out, *exclude);
        }
        return out;
    }

    /// Exhaustive scan over live agents using this space's metric.
    std::vector<AgentId> scan_within(const Population& pop, std::span<const double> center,
                                     double r) const {
        std::vector<AgentId> out;
        const double r2 = r * r;
        std::vector<double> p(ndim());
        std::vector<std::span<const double>> cols;
        for (const auto& c : columns_) {
            cols.push_back(pop.column<double>(c));
        }
        const auto alive = pop.alive_mask();
        for (std::size_t row = 0; row < pop.rows(); ++row) {
            if (!alive[row]) {
                continue;
            }
            for (std::size_t d = 0; d < p.size(); ++d) {
                p[d] = cols[d][row];
            }
            if (distance2(p, center) <= r2) {
                out.push_back(pop.id_at(row));
            }
        }
        return out;
    }

private:
    const SpatialIndex& cached_index(const Population& pop) const {
        if (cache_owner_ != &pop || cache_version_ != pop.version() || !cache_) {
            cache_ = build_index(pop);
            cache_owner_ = &pop;
            cache_version_ = pop.version();
        }
        return *cache_;
    }

    std::vector<double> low_, high_;
    Boundary boundary_;
    std::vector<std::string> columns_;

    mutable std::optional<SpatialIndex> cache_;
    mutable const Population* cache_owner_ = nullptr;
    mutable std::uint64_t cache_version_ = 0;
};

} // namespace colabm
