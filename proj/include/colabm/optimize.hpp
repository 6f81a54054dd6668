#pragma once

#include "colabm/experiment.hpp"
#include "colabm/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace colabm {

/// Objective to minimize.
using Objective = std::function<double(const Params&)>;

struct Trial {
    Params params;
    double value = 0.0;
};

struct SearchResult {
    Trial best;
    std::vector<Trial> trace;
};

namespace detail {

inline Trial evaluate(const Objective& f, Params p) {
    const double v = f(p);
    if (!std::isfinite(v)) {
        throw DomainError("objective returned a non-finite value");
    }
    return Trial{std::move(p), v};
}

/// Earliest minimum wins ties.
inline Trial best_of(const std::vector<Trial>& trace) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i].value < trace[best].value) {
            best = i;
        }
    }
    return trace.at(best);
}

/// One draw per spec, in spec order.
template <RandomSource R>
Params sample_point(const ParameterSpace& space, R& rng) {
    Params p;
    for (const auto& spec : space) {
        if (const auto* f = std::get_if<FloatRange>(&spec)) {
            p.emplace(f->name, f->lo + rng.uniform() * (f->hi - f->lo));
        } else {
            p.emplace(spec_name(spec), discrete_value(spec, rng.below(cardinality(spec))));
        }
    }
    return p;
}

} // namespace detail

/// Exhaustive evaluation in cartesian order.
inline SearchResult grid_search(const ParameterSpace& space, const Objective& f) {
    SearchResult res;
    for (auto& p : cartesian(space)) {
        res.trace.push_back(detail::evaluate(f, std::move(p)));
    }
    res.best = detail::best_of(res.trace);
    return res;
}

template <RandomSource R>
SearchResult random_search(const ParameterSpace& space, const Objective& f, std::size_t n_iter,
                           R& rng) {
    validate_space(space);
    if (n_iter < 1) {
        throw DomainError("random_search: n_iter must be >= 1");
    }
    SearchResult res;
    for (std::size_t i = 0; i < n_iter; ++i) {
        res.trace.push_back(detail::evaluate(f, detail::sample_point(space, rng)));
    }
    res.best = detail::best_of(res.trace);
    return res;
}

// -- Gaussian process surrogate --

struct GpHyperparams {
    double lengthscale = 0.2;
    double signal_var = 1.0;
    double noise_var = 1e-6;
};

/**
 * @brief Zero-mean GP with a squared-exponential kernel.
 *
 * k(x, x') = signal_var * exp(-|x - x'|^2 / (2 lengthscale^2)). The kernel
 * matrix gets (noise_var + jitter) on its diagonal; jitter starts at 1e-8
 * and grows tenfold while the Cholesky factorization fails.
 */
class GpModel {
public:
    static GpModel fit(std::vector<std::vector<double>> x, std::vector<double> y,
                       GpHyperparams h = {}) {
        if (x.empty() || x.size() != y.size()) {
            throw DomainError("gp_fit needs >= 1 input with one target each");
        }
        if (!(h.lengthscale > 0.0) || !(h.signal_var > 0.0) || !(h.noise_var >= 0.0)) {
            throw DomainError("gp_fit: lengthscale, signal variance must be > 0, noise >= 0");
        }
        GpModel m;
        m.h_ = h;
        m.x_ = std::move(x);
        const auto n = static_cast<Eigen::Index>(m.x_.size());
        Eigen::MatrixXd k(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) {
                k(i, j) = k(j, i) = m.kernel(m.x_[i], m.x_[j]);
            }
        }
        Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
        double jitter = 1e-8;
        for (int attempt = 0; attempt < 7; ++attempt, jitter *= 10.0) {
            Eigen::MatrixXd kj = k;
            kj.diagonal().array() += h.noise_var + jitter;
            m.llt_.compute(kj);
            if (m.llt_.info() == Eigen::Success) {
                m.jitter_ = jitter;
                m.alpha_ = m.llt_.solve(yv);
                return m;
            }
        }
        throw DomainError("gp_fit: kernel matrix not positive definite after jitter escalation");
    }

    double kernel(std::span<const double> a, std::span<const double> b) const {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            d2 += d * d;
        }
        return h_.signal_var * std::exp(-d2 / (2.0 * h_.lengthscale * h_.lengthscale));
    }

    /// Posterior (mean, variance); variance clamped at 0.
    std::pair<double, double> predict(std::span<const double> x) const {
        const auto n = static_cast<Eigen::Index>(x_.size());
        Eigen::VectorXd kx(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            kx(i) = kernel(x, x_[i]);
        }
        const double mean = kx.dot(alpha_);
        const Eigen::VectorXd v = llt_.matrixL().solve(kx);
        const double var = kernel(x, x) - v.squaredNorm();
        return {mean, std::max(var, 0.0)};
    }

    double jitter() const noexcept { return jitter_; }
    const GpHyperparams& hyperparams() const noexcept { return h_; }

private:
    GpHyperparams h_;
    std::vector<std::vector<double>> x_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

inline double normal_pdf(double z) noexcept {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal CDF through the C library's erfc (error well below 1e-7).
inline double normal_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// Expected improvement below `best` for a minimization problem.
inline double expected_improvement(double mean, double variance, double best) {
    if (variance < 0.0) {
        throw DomainError("expected_improvement: negative variance");
    }
    const double delta = best - mean;
    const double sigma = std::sqrt(variance);
    if (sigma == 0.0) {
        return std::max(delta, 0.0);
    }
    const double z = delta / sigma;
    return std::max(delta * normal_cdf(z) + sigma * normal_pdf(z), 0.0);
}

namespace detail {

/// Maps a FloatRange/IntRange point onto [0, 1]^d.
inline std::vector<double> to_unit(const ParameterSpace& space, const Params& p) {
    std::vector<double> u;
    u.reserve(space.size());
    for (const auto& spec : space) {
        if (const auto* f = std::get_if<FloatRange>(&spec)) {
            u.push_back((param_double(p, f->name) - f->lo) / (f->hi - f->lo));
        } else {
            const auto& r = std::get<IntRange>(spec);
            const auto top = static_cast<double>((cardinality(spec) - 1) * r.step);
            u.push_back(top == 0.0 ? 0.0
                                   : static_cast<double>(param_int(p, r.name) - r.lo) / top);
        }
    }
    return u;
}

} // namespace detail

/**
 * @brief GP-guided minimization over FloatRange/IntRange spaces.
 *
 * Starts with n_init random-search points, then each round fits a GP to all
 * trials (targets standardized), scores 1000 random candidates by expected
 * improvement and evaluates the first best-scoring one.
 */
template <RandomSource R>
SearchResult bayes_opt(const ParameterSpace& space, const Objective& f, std::size_t n_init,
                       std::size_t n_iter, R& rng, GpHyperparams h = {},
                       std::size_t n_candidates = 1000) {
    validate_space(space);
    for (const auto& spec : space) {
        if (std::holds_alternative<Sample>(spec)) {
            throw DomainError("bayes_opt supports FloatRange and IntRange parameters only");
        }
    }
    if (n_init < 1) {
        throw DomainError("bayes_opt: n_init must be >= 1");
    }
    SearchResult res = random_search(space, f, n_init, rng);

    for (std::size_t it = 0; it < n_iter; ++it) {
        const std::size_t n = res.trace.size();
        double mu = 0.0;
        for (const auto& t : res.trace) {
            mu += t.value;
        }
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& t : res.trace) {
            var += (t.value - mu) * (t.value - mu);
        }
        double sd = std::sqrt(var / static_cast<double>(n));
        if (!(sd > 0.0)) {
            sd = 1.0;
        }

        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        double best_std = std::numeric_limits<double>::infinity();
        for (const auto& t : res.trace) {
            xs.push_back(detail::to_unit(space, t.params));
            ys.push_back((t.value - mu) / sd);
            best_std = std::min(best_std, ys.back());
        }
        const GpModel gp = GpModel::fit(std::move(xs), std::move(ys), h);

        Params chosen;
        double best_ei = -1.0;
        for (std::size_t c = 0; c < n_candidates; ++c) {
            Params cand = detail::sample_point(space, rng);
            const auto [m, v] = gp.predict(detail::to_unit(space, cand));
            const double ei = expected_improvement(m, v, best_std);
            if (ei > best_ei) {
                best_ei = ei;
                chosen = std::move(cand);
            }
        }
        res.trace.push_back(detail::evaluate(f, std::move(chosen)));
    }
    res.best = detail::best_of(res.trace);
    return res;
}

} // namespace colabm
