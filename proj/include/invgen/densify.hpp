#pragma once

#include <functional>
#include <set>
#include <vector>

#include "invgen/genct.hpp"
#include "invgen/sq.hpp"

namespace invgen {

// Every constant of the densifier loops, with factory helpers computing the
// pinned defaults. gamma is the density target the loop drives toward; the
// factories fill in the analysis values and callers may override it.
struct DensifierParams {
    double epsilon = 0.1;
    double delta = 0.1;
    double p_hat = 1.0;       // in [2^-n, 1]
    double gamma = 0.0;       // density target
    std::uint64_t n_plus = 1; // positive-sample count (LTF)
    std::uint64_t m_cap = 1;  // iteration cap M
    int r = 1;                // per-candidate sample count (DNF)
    EllPoly ell;

    // N+ = ceil((2/eps)(n^2 + ln(1/delta))), M = ceil(4 n^2 ln(max(n,2))),
    // gamma = delta/(16 M).
    static DensifierParams for_ltf(int n, double epsilon, double delta, double p_hat);

    // r = ceil(2 log2 n), M = min(ceil(2 n^{2 log2(2s/l(eps/s))} ln(s/delta)),
    // iteration_cap), gamma = 1/(2M).
    static DensifierParams for_dnf(int n, int s, double epsilon, double delta, double p_hat,
                                   EllPoly ell = {}, std::uint64_t iteration_cap = 4000);
};

// Labeled point constraints for the online halfspace learner. A point may
// appear on only one side; requiring both is an immediate infeasibility.
struct ConstraintSet {
    std::vector<Assignment> positives;
    std::vector<Assignment> negatives;

    // Returns false if the point was already present on the same side.
    bool add_positive(const Assignment& x);
    bool add_negative(const Assignment& x);

private:
    std::set<Assignment> pos_seen_;
    std::set<Assignment> neg_seen_;
};

// Integer-weight LTF consistent with every constraint (negatives strictly),
// found by max-margin linear feasibility and denominator-doubling integer
// rounding with exact re-verification. Empty constraints yield the constant
// true LTF (w = 0, theta = 0). Throws infeasible_error when no separating
// halfspace with positive margin exists.
Ltf consistent_ltf(const ConstraintSet& constraints, int n);

using LtfCounterFn = std::function<CountEstimate(const Ltf&, double eps, double delta, Rng&)>;
using LtfSamplerFn = std::function<BottomSampler(const Ltf&, double delta)>;

// Exact-DP defaults for the two hooks above.
LtfCounterFn exact_ltf_counter();
LtfSamplerFn exact_ltf_sampler_factory();

// Online densifier for halfspaces: fixes misclassified positives first, else
// counts the hypothesis mass, exits once p_hat_i <= p_hat/(gamma (1+eps)^2),
// else feeds one generated point back as a negative counterexample. Loop
// capped at params.m_cap rounds.
Ltf densify_ltf(const BottomSampler& pos_source, const DensifierParams& params, int n,
                const LtfCounterFn& counter, const LtfSamplerFn& sampler_factory, Rng& rng);

// Candidate-term densifier for DNFs: each iteration takes r positives, forms
// the conjunction of literals constant across all of them, and keeps it iff
// its exact uniform mass 2^-width <= p_hat. Deduped, insertion order.
std::vector<Conjunction> densify_dnf(const BottomSampler& pos_source,
                                     const DensifierParams& params, int n, int s, Rng& rng);

struct KdnfDensifier {
    BoolFunc g;
    double gamma = 0.0;
};

// The constant-true function densifies every k-DNF with gamma = 2^-k.
KdnfDensifier densify_kdnf(int n, int k);

} // namespace invgen
