#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "invgen/errors.hpp"
#include "invgen/rng.hpp"

namespace invgen {

// Two-sided additive Chernoff sample count for estimating the mean of a
// [-1,1] variable to +-tau with confidence 1-delta.
inline std::uint64_t chernoff_samples(double tau, double delta) {
    if (!(tau > 0.0 && tau <= 1.0)) throw invalid_input_error("tau must be in (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw invalid_input_error("delta must be in (0,1)");
    return static_cast<std::uint64_t>(std::ceil((2.0 / (tau * tau)) * std::log(2.0 / delta)));
}

// Empirical mean of m = chernoff_samples(tau, delta) draws from a [-1,1]
// source. Guarantee: |result - E[X]| <= tau with probability >= 1-delta.
inline double estimate_mean(const std::function<double(Rng&)>& draw, double tau, double delta,
                            Rng& rng) {
    const std::uint64_t m = chernoff_samples(tau, delta);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) sum += draw(rng);
    return sum / static_cast<double>(m);
}

// Same estimator with the sample count capped (used where a fixed sample pool
// backs the source).
inline double estimate_mean_capped(const std::function<double(Rng&)>& draw, double tau,
                                   double delta, std::uint64_t cap, Rng& rng) {
    std::uint64_t m = chernoff_samples(tau, delta);
    if (cap > 0 && m > cap) m = cap;
    double sum = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) sum += draw(rng);
    return sum / static_cast<double>(m);
}

} // namespace invgen
