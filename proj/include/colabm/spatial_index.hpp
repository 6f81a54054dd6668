#pragma once

#include "colabm/dtype.hpp"
#include "colabm/error.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace colabm {

/// Squared Euclidean distance, accumulated in dimension order.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

/**
 * @brief Static KD-tree over a snapshot of agent positions.
 *
 * Radius queries are boundary inclusive (distance <= r) and return IDs in
 * ascending order. k-nearest queries order by (distance, id). The index
 * never changes after construction and may be queried from many threads.
 */
class SpatialIndex {
public:
    SpatialIndex() = default;

    /// `coords` holds ids.size() points of `dims` values each, row-major.
    SpatialIndex(std::size_t dims, std::vector<AgentId> ids, std::vector<double> coords,
                 std::size_t leaf_size = 8)
        : dims_(dims), leaf_size_(std::max<std::size_t>(leaf_size, 1)), ids_(std::move(ids)),
          coords_(std::move(coords)) {
        if (dims_ == 0) {
            throw DomainError("SpatialIndex: dimension must be >= 1");
        }
        if (coords_.size() != ids_.size() * dims_) {
            throw DomainError("SpatialIndex: coordinate count does not match ids * dims");
        }
        order_.resize(ids_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        if (!order_.empty()) {
            nodes_.reserve(2 * order_.size() / leaf_size_ + 1);
            build(0, order_.size());
        }
    }

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t dims() const noexcept { return dims_; }
    bool empty() const noexcept { return ids_.empty(); }

    std::vector<AgentId> radius(std::span<const double> center, double r) const {
        check_center(center);
        std::vector<AgentId> out;
        if (empty() || r < 0.0) {
            return out;
        }
        radius_visit(0, center, r * r, out);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// True if any point lies within r of center.
    template <typename Pred>
    bool any_within(std::span<const double> center, double r, Pred&& accept) const {
        check_center(center);
        if (empty() || r < 0.0) {
            return false;
        }
        return any_visit(0, center, r * r, accept);
    }

    std::vector<AgentId> knn(std::span<const double> center, std::size_t k) const {
        check_center(center);
        if (empty()) {
            throw DomainError("knn on an empty index");
        }
        if (k == 0) {
            throw DomainError("knn: k must be >= 1");
        }
        k = std::min(k, size());
        std::priority_queue<Candidate> best; // max-heap: worst candidate on top
        knn_visit(0, center, k, best);
        std::vector<AgentId> out(best.size());
        for (std::size_t i = out.size(); i-- > 0;) {
            out[i] = best.top().id;
            best.pop();
        }
        return out;
    }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dims_, dims_};
    }
    AgentId id(std::size_t i) const { return ids_[i]; }

private:
    struct Node {
        std::size_t begin = 0, end = 0; // range in order_
        std::size_t axis = 0;
        double split = 0.0;
        std::size_t left = 0, right = 0; // 0 means leaf (root is never a child)
        std::vector<double> lo{}, hi{}; // bounding box
    };

    struct Candidate {
        double dist2;
        AgentId id;
        bool operator<(const Candidate& o) const {
            return dist2 < o.dist2 || (dist2 == o.dist2 && id < o.id);
        }
    };

    void check_center(std::span<const double> c) const {
        if (c.size() != dims_) {
            throw DomainError("query dimension does not match index dimension");
        }
    }

    double coord(std::size_t point, std::size_t axis) const { return coords_[point * dims_ + axis]; }

    std::size_t build(std::size_t begin, std::size_t end) {
        const std::size_t idx = nodes_.size();
        nodes_.push_back(Node{.begin = begin, .end = end});
        std::vector<double> lo(dims_, std::numeric_limits<double>::infinity());
        std::vector<double> hi(dims_, -std::numeric_limits<double>::infinity());
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t d = 0; d < dims_; ++d) {
                lo[d] = std::min(lo[d], coord(order_[i], d));
                hi[d] = std::max(hi[d], coord(order_[i], d));
            }
        }
        if (end - begin > leaf_size_) {
            std::size_t axis = 0;
            for (std::size_t d = 1; d < dims_; ++d) {
                if (hi[d] - lo[d] > hi[axis] - lo[axis]) {
                    axis = d;
                }
            }
            const std::size_t mid = begin + (end - begin) / 2;
            std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                             order_.begin() + static_cast<std::ptrdiff_t>(mid),
                             order_.begin() + static_cast<std::ptrdiff_t>(end),
                             [&](std::size_t a, std::size_t b) {
                                 return coord(a, axis) < coord(b, axis);
                             });
            const std::size_t left = build(begin, mid);
            const std::size_t right = build(mid, end);
            nodes_[idx].axis = axis;
            nodes_[idx].split = coord(order_[mid], axis);
            nodes_[idx].left = left;
            nodes_[idx].right = right;
        }
        nodes_[idx].lo = std::move(lo);
        nodes_[idx].hi = std::move(hi);
        return idx;
    }

    /// Squared distance from `c` to the node's bounding box.
    double box_distance2(const Node& n, std::span<const double> c) const {
        double s = 0.0;
        for (std::size_t d = 0; d < dims_; ++d) {
            double diff = 0.0;
            if (c[d] < n.lo[d]) {
                diff = n.lo[d] - c[d];
            } else if (c[d] > n.hi[d]) {
                diff = c[d] - n.hi[d];
            }
            s += diff * diff;
        }
        return s;
    }

    void radius_visit(std::size_t ni, std::span<const double> c, double r2,
                      std::vector<AgentId>& out) const {
        const Node& n = nodes_[ni];
        if (box_distance2(n, c) > r2) {
            return;
        }
        if (n.left == 0) {
            for (std::size_t i = n.begin; i < n.end; ++i) {
                if (squared_distance(point(order_[i]), c) <= r2) {
                    out.push_back(ids_[order_[i]]);
                }
            }
            return;
        }
        radius_visit(n.left, c, r2, out);
        radius_visit(n.right, c, r2, out);
    }

    template <typename Pred>
    bool any_visit(std::size_t ni, std::span<const double> c, double r2, Pred& accept) const {
        const Node& n = nodes_[ni];
        if (box_distance2(n, c) > r2) {
            return false;
        }
        if (n.left == 0) {
            for (std::size_t i = n.begin; i < n.end; ++i) {
                if (squared_distance(point(order_[i]), c) <= r2 && accept(ids_[order_[i]])) {
                    return true;
                }
            }
            return false;
        }
        return any_visit(n.left, c, r2, accept) || any_visit(n.right, c, r2, accept);
    }

    void knn_visit(std::size_t ni, std::span<const double> c, std::size_t k,
                   std::priority_queue<Candidate>& best) const {
        const Node& n = nodes_[ni];
        // Equal distances must still be visited: a lower id may win the tie.
        if (best.size() == k && box_distance2(n, c) > best.top().dist2) {
            return;
        }
        if (n.left == 0) {
            for (std::size_t i = n.begin; i < n.end; ++i) {
                const Candidate cand{squared_distance(point(order_[i]), c), ids_[order_[i]]};
                if (best.size() < k) {
                    best.push(cand);
                } else if (cand < best.top()) {
                    best.pop();
                    best.push(cand);
                }
            }
            return;
        }
        const bool go_left_first = c[n.axis] < n.split;
        knn_visit(go_left_first ? n.left : n.right, c, k, best);
        knn_visit(go_left_first ? n.right : n.left, c, k, best);
    }

    std::size_t dims_ = 0;
    std::size_t leaf_size_ = 8;
    std::vector<AgentId> ids_;
    std::vector<double> coords_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

} // namespace colabm
