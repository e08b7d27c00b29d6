#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "invgen/estimate.hpp"
#include "invgen/genct.hpp"

namespace invgen {

// Query function over labeled examples, |chi(x,y)| <= 1 (clamped), with the
// tolerance the caller is willing to accept on the answer.
struct StatQuery {
    std::function<double(const Assignment&, int label)> chi;  // label in {-1,+1}
    double tolerance = 0.0;
};

struct LearnerSpec {
    std::uint64_t query_budget = 0;   // T1
    std::uint64_t eval_cost = 0;      // t2, abstract per-query evaluation cost
    double min_tolerance = 0.0;       // tau(n, 1/eps)
    std::uint64_t sample_budget = 0;  // pool size the SQ simulation should provision
};

struct BiasEstimate {
    double value = 0.0;             // \tilde{b}_f in [0,1]
    double claimed_accuracy = 0.0;  // tau'
};

// Answers E_D[chi(x, f(x))] from a D-sampler, a D_{f,+} source and a bias
// estimate, via the decomposition
//   E_D[chi(x,f(x))] = E_D[chi(x,-1)] + E_{D_{f,+}}[chi(x,1)-chi(x,-1)] * Pr_D[f=1].
// Estimates the first term to +-tau/4 and the second to +-tau/2, each at
// confidence 1-delta/2, and returns E1 + E2 * bias. If the bias estimate is
// tau'-accurate, |v - E| <= tau + tau' with probability 1-delta.
double simulate_stat(const StatQuery& q, const BottomSampler& d_sampler,
                     const BottomSampler& pos_sampler, const BiasEstimate& bias, double delta,
                     Rng& rng);

// Same, with per-estimate sample counts capped (pool-backed samplers).
double simulate_stat_capped(const StatQuery& q, const BottomSampler& d_sampler,
                            const BottomSampler& pos_sampler, const BiasEstimate& bias,
                            double delta, std::uint64_t sample_cap, Rng& rng);

// Rejection-filters U_{f^-1(1)} draws through g, yielding an exact draw from
// D_{f,+} for D = U_{g^-1(1)}. Caps at ceil((1/eps_prime) ln(1/delta)) + 1
// attempts; exhaustion returns nullopt.
std::optional<Assignment> simulate_sample_dfplus(const BottomSampler& pos_source,
                                                 const BoolFunc& g, double eps_prime, double delta,
                                                 Rng& rng);

// Estimate-Bias: runs the counter at eps* = tau'/2, confidence delta', and
// returns p_hat / p_g clamped to [0,1].
BiasEstimate estimate_bias(double p_hat, double tau_prime, double delta_prime, const BoolFunc& g,
                           const ForwardTools& tools, Rng& rng);

// Oracle surface handed to learners; implementations bake in the per-query
// confidence split.
class SqOracle {
public:
    virtual ~SqOracle() = default;
    virtual double query(const StatQuery& q) = 0;
};

class SqLearner {
public:
    virtual ~SqLearner() = default;
    virtual LearnerSpec declared_spec(double epsilon) const = 0;
    virtual BoolFunc learn(SqOracle& oracle, double epsilon, double delta, Rng& rng) = 0;
};

// Runs the learner, answering each query (chi, tau) through `answer` with
// per-query confidence delta/(2 T1) and the learner itself at confidence
// delta/2. Enforces the declared budget (budget exceeded -> algorithm_failure)
// and the declared tolerance floor.
using StatAnswerFn = std::function<double(const StatQuery& q, double delta_q, Rng& rng)>;
BoolFunc run_sq_learner(SqLearner& learner, const LearnerSpec& spec, const StatAnswerFn& answer,
                        double epsilon, double delta, Rng& rng);

// Polynomial l(.) from the sparse-disjunction robustness clause; the paper
// leaves it unpinned so it is a configuration knob. Default l(z) = z^2/8.
struct EllPoly {
    double coeff = 0.125;
    double power = 2.0;
    double operator()(double z) const { return coeff * std::pow(z, power); }
};

// Elimination learner for k-sparse disjunctions over an explicit feature
// list: one query Pr_D[f=1] plus one per feature, all at tolerance
// max(eps/(8N), tolerance_floor); include feature i iff the estimated
// Pr_D[feat_i=1 and f=-1] <= 2*tolerance + l(eps/k).
class SparseDisjunctionLearner : public SqLearner {
public:
    SparseDisjunctionLearner(int n, std::vector<Conjunction> features, int sparsity,
                             EllPoly ell = {}, double tolerance_floor = 0.0);

    LearnerSpec declared_spec(double epsilon) const override;
    BoolFunc learn(SqOracle& oracle, double epsilon, double delta, Rng& rng) override;

    int feature_count() const { return static_cast<int>(features_.size()); }

private:
    int n_;
    std::vector<Conjunction> features_;
    int sparsity_;
    EllPoly ell_;
    double tolerance_floor_;
};

// SQ-driven logistic-surrogate descent for halfspaces: every gradient
// coordinate is one bounded query at tolerance max(eps/(8n), tolerance_floor);
// T = ceil(64 n / eps^2) rounds, optionally capped for desk-scale runs.
// Checkpointed integer roundings are scored with extra error queries and the
// best one is returned.
class HalfspaceSqLearner : public SqLearner {
public:
    explicit HalfspaceSqLearner(int n, double tolerance_floor = 0.0, std::uint64_t round_cap = 0,
                                double step = 2.0);

    LearnerSpec declared_spec(double epsilon) const override;
    BoolFunc learn(SqOracle& oracle, double epsilon, double delta, Rng& rng) override;

    std::uint64_t rounds(double epsilon) const;

private:
    int n_;
    double tolerance_floor_;
    std::uint64_t round_cap_;  // 0 = uncapped
    double step_;
};

// Builds the conjunction feature space for k-DNF learning: all conjunctions
// of width 1..k over n variables (both polarities), excluding the empty one.
std::vector<Conjunction> all_conjunctions_up_to_width(int n, int k);

} // namespace invgen
