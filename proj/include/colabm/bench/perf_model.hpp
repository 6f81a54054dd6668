#pragma once

#include "colabm/error.hpp"
#include "colabm/models/final_state.hpp"
#include "colabm/population.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace colabm {

/**
 * @brief Analytical cost model of a population-wide update.
 *
 * Per-object loop:   T_obj = N (c_iter + c_dict + c_op)
 * Columnar kernel:   T_col = c_call + (N / k) c_op
 * Speedup:           S = T_obj / T_col
 */
struct CostModel {
    double c_iter = 0.0; ///< per-agent loop overhead
    double c_dict = 0.0; ///< per-agent attribute lookup
    double c_op = 0.0;   ///< the operation itself
    double c_call = 0.0; ///< fixed cost of one vectorized call
    double k = 1.0;      ///< effective SIMD width

    double object_time(double n) const noexcept { return n * (c_iter + c_dict + c_op); }
    double columnar_time(double n) const noexcept { return c_call + (n / k) * c_op; }
};

inline double speedup_model(double c_iter, double c_dict, double c_op, double c_call, double k,
                            double n) {
    if (!(k > 0.0)) {
        throw DomainError("speedup_model: k must be positive");
    }
    const double den = c_call + (n / k) * c_op;
    if (!(den > 0.0)) {
        throw DomainError("speedup_model: columnar time must be positive");
    }
    return n * (c_iter + c_dict + c_op) / den;
}

inline double speedup_model(const CostModel& m, double n) {
    return speedup_model(m.c_iter, m.c_dict, m.c_op, m.c_call, m.k, n);
}

/// Large-N approximation that drops c_op from the numerator: k (c_iter + c_dict) / c_op.
inline double speedup_asymptote(double c_iter, double c_dict, double c_op, double k) {
    if (!(c_op > 0.0)) {
        throw DomainError("speedup_asymptote: c_op must be positive");
    }
    return k * (c_iter + c_dict) / c_op;
}

/// Exact N -> infinity limit of speedup_model: k (c_iter + c_dict + c_op) / c_op.
inline double speedup_limit(double c_iter, double c_dict, double c_op, double k) {
    if (!(c_op > 0.0)) {
        throw DomainError("speedup_limit: c_op must be positive");
    }
    return k * (c_iter + c_dict + c_op) / c_op;
}

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 1.0;
};

/// Ordinary least squares y = intercept + slope x. r2 is 1 when y has no variance.
inline LinearFit least_squares(std::span<const std::pair<double, double>> xy) {
    if (xy.size() < 2) {
        throw DomainError("least squares needs at least two points");
    }
    const double n = static_cast<double>(xy.size());
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) {
        throw DomainError("degenerate design: all x values are equal");
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (auto [x, y] : xy) {
        const double e = y - (f.intercept + f.slope * x);
        ss_res += e * e;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

/**
 * @brief Fits T = a + b N to (N, seconds) samples.
 *
 * For the record backend b estimates c_iter + c_dict + c_op per agent-step
 * (after dividing by the step count); for the columnar backend a estimates
 * the fixed per-call overhead.
 */
inline LinearFit fit_cost_constants(std::span<const std::pair<double, double>> times) {
    return least_squares(times);
}

/// Slope of log(seconds) against log(N), with its r^2.
inline LinearFit scaling_exponent(std::span<const std::pair<double, double>> times) {
    if (times.size() < 3) {
        throw DomainError("scaling_exponent needs at least three sizes");
    }
    std::vector<std::pair<double, double>> logs;
    for (auto [n, t] : times) {
        if (!(t > 0.0) || !(n > 0.0)) {
            throw DomainError("scaling_exponent needs positive sizes and times");
        }
        logs.emplace_back(std::log(n), std::log(t));
    }
    return least_squares(logs);
}

/**
 * @brief Analytic memory model.
 *
 * Columnar: n * sum(column widths), widths Int64/Float64 8, Bool 1, Categorical 4.
 * Records:  n * (56 + attributes * per_attribute_entry), where 56 bytes is
 * the base overhead of one heap object and the entry cost stands in for a
 * boxed value plus its hash-table slot.
 */
struct MemoryModel {
    double per_record_overhead = 56.0;
    double per_attribute_entry = 72.0;
};

inline double columnar_bytes(const Schema& schema, std::size_t n) {
    double w = 0.0;
    for (const auto& c : schema) {
        w += static_cast<double>(c.type.width());
    }
    return static_cast<double>(n) * w;
}

inline double record_bytes(const Schema& schema, std::size_t n, const MemoryModel& m = {}) {
    return static_cast<double>(n) *
           (m.per_record_overhead + static_cast<double>(schema.size()) * m.per_attribute_entry);
}

inline double memory_estimate(const Schema& schema, std::size_t n, Backend backend,
                              const MemoryModel& m = {}) {
    return backend == Backend::Columnar ? columnar_bytes(schema, n) : record_bytes(schema, n, m);
}

/// 1 - columnar / record.
inline double memory_reduction(const Schema& schema, std::size_t n, const MemoryModel& m = {}) {
    return 1.0 - columnar_bytes(schema, n) / record_bytes(schema, n, m);
}

} // namespace colabm
