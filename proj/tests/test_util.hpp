#pragma once

// Shared helpers for unit and acceptance tests: enumeration-backed oracles,
// chi-square uniformity checks, empirical TV.

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <vector>

#include "invgen/mass_table.hpp"
#include "invgen/sq.hpp"

namespace testutil {

using namespace invgen;

// Pearson goodness-of-fit against the uniform distribution over `cells`
// categories at significance `alpha`.
inline bool chi_square_uniform_pass(const std::map<std::string, std::uint64_t>& counts,
                                    std::uint64_t cells, std::uint64_t total, double alpha) {
    if (cells < 2) return true;
    const double expected = static_cast<double>(total) / static_cast<double>(cells);
    double stat = 0.0;
    std::uint64_t seen_total = 0;
    for (const auto& [key, c] : counts) {
        const double diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
        seen_total += c;
    }
    // Cells never hit still contribute their expectation.
    stat += static_cast<double>(cells - counts.size()) * expected;
    (void)seen_total;
    boost::math::chi_squared dist(static_cast<double>(cells - 1));
    return stat <= boost::math::quantile(dist, 1.0 - alpha);
}

// Empirical total variation between draw counts and the uniform distribution
// over `support` (counts outside the support contribute fully).
inline double empirical_tv_to_uniform(const std::map<std::string, std::uint64_t>& counts,
                                      const std::vector<Assignment>& support,
                                      std::uint64_t draws) {
    std::map<std::string, double> uniform;
    for (const Assignment& x : support)
        uniform[x.to_string()] = 1.0 / static_cast<double>(support.size());
    double l1 = 0.0;
    for (const auto& [key, c] : counts) {
        const double emp = static_cast<double>(c) / static_cast<double>(draws);
        auto it = uniform.find(key);
        const double u = it == uniform.end() ? 0.0 : it->second;
        l1 += std::fabs(emp - u);
    }
    for (const auto& [key, u] : uniform)
        if (counts.find(key) == counts.end()) l1 += u;
    return 0.5 * l1;
}

// Exact STAT(f, D) oracle by enumeration of an explicit distribution; valid
// for every tolerance.
inline StatAnswerFn exact_stat_answer(const MassTable& d, const BoolFunc& f) {
    return [&d, &f](const StatQuery& q, double, Rng&) {
        double e = 0.0;
        for (const auto& [x, px] : d.support()) e += px * q.chi(x, f.evaluate(x) ? 1 : -1);
        return e;
    };
}

// Exact expectation E_D[chi(x, f(x))] by enumeration.
inline double exact_expectation(const MassTable& d, const BoolFunc& f, const StatQuery& q) {
    double e = 0.0;
    for (const auto& [x, px] : d.support()) e += px * q.chi(x, f.evaluate(x) ? 1 : -1);
    return e;
}

// Exact uniform sampler over an explicit point set.
inline BottomSampler table_sampler(std::vector<Assignment> points) {
    auto pts = std::make_shared<std::vector<Assignment>>(std::move(points));
    return BottomSampler(
        [pts](Rng& rng) -> std::optional<Assignment> {
            return (*pts)[static_cast<std::size_t>(rng.below(pts->size()))];
        },
        0.0, 0.0);
}

// Sampler over an explicit finite distribution (cumulative inversion).
inline BottomSampler mass_table_sampler(const MassTable& table) {
    auto pts = std::make_shared<std::vector<std::pair<Assignment, double>>>();
    double acc = 0.0;
    for (const auto& [x, p] : table.support()) {
        acc += p;
        pts->push_back({x, acc});
    }
    return BottomSampler(
        [pts](Rng& rng) -> std::optional<Assignment> {
            const double u = rng.unit();
            for (const auto& [x, c] : *pts)
                if (u < c) return x;
            return pts->back().first;
        },
        0.0, 0.0);
}

} // namespace testutil
