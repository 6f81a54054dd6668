#pragma once

#include "colabm/error.hpp"

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <vector>

namespace colabm {

/// Warmups are run and discarded; the median of the measured runs is reported.
struct TimingProtocol {
    std::size_t warmup_runs = 2;
    std::size_t measured_runs = 5;

    void validate() const {
        if (measured_runs == 0 || measured_runs % 2 == 0) {
            throw DomainError("measured_runs must be odd so the median is a sample");
        }
    }
};

inline double median(std::vector<double> samples) {
    if (samples.empty()) {
        throw DomainError("median of an empty sample");
    }
    const auto mid = samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2);
    std::nth_element(samples.begin(), mid, samples.end());
    if (samples.size() % 2 == 1) {
        return *mid;
    }
    const double hi = *mid;
    const double lo = *std::max_element(samples.begin(), mid);
    return (lo + hi) / 2.0;
}

struct Timing {
    double median_s = 0.0;
    std::vector<double> samples; // measured runs only, in execution order
};

/// Times `run` (a complete simulation, setup included) with a monotonic clock.
template <typename F>
Timing time_protocol(F&& run, const TimingProtocol& protocol = {}) {
    protocol.validate();
    for (std::size_t i = 0; i < protocol.warmup_runs; ++i) {
        run();
    }
    Timing t;
    for (std::size_t i = 0; i < protocol.measured_runs; ++i) {
        const auto start = std::chrono::steady_clock::now();
        run();
        const auto stop = std::chrono::steady_clock::now();
        t.samples.push_back(std::chrono::duration<double>(stop - start).count());
    }
    t.median_s = median(t.samples);
    return t;
}

} // namespace colabm
