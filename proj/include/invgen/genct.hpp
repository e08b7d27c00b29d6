#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "invgen/boolfunc.hpp"
#include "invgen/rng.hpp"

namespace invgen {

// A randomized generator that yields a satisfying assignment of its target or
// the distinguished failure symbol (nullopt). Conditioned on success, every
// emitted point x has probability within [1/(1+eps), 1+eps]/|g^-1(1)| of
// uniform, and Pr[failure] <= delta.
class BottomSampler {
public:
    using GenFn = std::function<std::optional<Assignment>(Rng&)>;

    BottomSampler() = default;
    BottomSampler(GenFn fn, double eps, double delta) : fn_(std::move(fn)), eps_(eps), delta_(delta) {}

    std::optional<Assignment> generate(Rng& rng) const { return fn_(rng); }
    double eps() const { return eps_; }
    double bottom_prob_bound() const { return delta_; }
    bool valid() const { return static_cast<bool>(fn_); }

private:
    GenFn fn_;
    double eps_ = 0.0;
    double delta_ = 0.0;
};

struct CountEstimate {
    double value = 0.0;    // satisfying fraction in [0,1]
    double epsilon = 0.0;  // multiplicative accuracy; 0 when exact
    double delta = 0.0;    // failure probability; 0 when exact
    bool exact = false;
};

// Exact satisfying fraction of an integer LTF via dynamic programming over
// partial sums; also the backbone of the exact uniform sampler below.
class LtfDpTable {
public:
    explicit LtfDpTable(const Ltf& f);

    std::uint64_t satisfying_count() const { return count_; }
    double satisfying_fraction() const;
    int n() const { return static_cast<int>(ltf_.weights.size()); }

    // Draws an exactly uniform satisfying assignment. Throws infeasible_error
    // at construction time if the LTF is unsatisfiable, so this never fails.
    Assignment sample(Rng& rng) const;
    bool satisfiable() const { return count_ > 0; }

private:
    // suffix_[i][s + offset_] = completions of coordinates i..n-1 reaching a
    // final sum >= theta, given partial sum s over coordinates 0..i-1.
    Ltf ltf_;
    std::vector<std::vector<std::uint64_t>> suffix_;
    std::int64_t offset_ = 0;
    std::uint64_t count_ = 0;
};

CountEstimate ltf_count_exact(const Ltf& f);
BottomSampler ltf_sample_exact(const Ltf& f);

// Karp-Luby canonical-witness estimator with a median-of-means wrapper.
// With probability >= 1-delta the value is within [1/(1+eps), 1+eps] of the
// true satisfying fraction.
CountEstimate dnf_count(const Dnf& f, int n, double epsilon, double delta, Rng& rng);

// Min-index rejection sampler: accepted outputs are exactly uniform over the
// satisfying set; Pr[failure symbol] <= delta via ceil(s ln(1/delta))+1 trials.
BottomSampler dnf_sample(const Dnf& f, int n, double delta);

// Exact per-trial acceptance probability |f^-1(1)| / sum_i |T_i^-1(1)| of the
// min-index sampler, computed by enumeration (test oracle; n <= cap).
double dnf_min_index_acceptance(const Dnf& f, int n);

// Class-appropriate (counter, sampler factory) pair. Counting takes
// (eps, delta, rng); sampling takes (eps, delta) and yields a BottomSampler.
struct ForwardTools {
    std::function<CountEstimate(double eps, double delta, Rng& rng)> count;
    std::function<BottomSampler(double eps, double delta)> make_sampler;
    bool exact = false;
};

// Dispatch on representation: Ltf -> exact DP pair; Dnf/Conjunction/
// FeatureDisjunction/ConstTrue -> Karp-Luby pair over the lowered DNF.
// ConstFalse and unsatisfiable inputs raise infeasible_error.
ForwardTools make_forward_tools(const BoolFunc& g);

} // namespace invgen
