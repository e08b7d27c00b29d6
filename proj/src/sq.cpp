#include "invgen/sq.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace invgen {

namespace {

constexpr int kBottomRetries = 100;

Assignment draw_or_fail(const BottomSampler& sampler, Rng& rng, const char* what) {
    for (int i = 0; i < kBottomRetries; ++i) {
        auto x = sampler.generate(rng);
        if (x) return *x;
    }
    throw sampler_failure(std::string("sampler for ") + what + " kept returning bottom");
}

double clamp_pm1(double v) { return std::clamp(v, -1.0, 1.0); }

double simulate_stat_impl(const StatQuery& q, const BottomSampler& d_sampler,
                          const BottomSampler& pos_sampler, const BiasEstimate& bias, double delta,
                          std::uint64_t cap, Rng& rng) {
    if (!(q.tolerance > 0.0)) throw invalid_input_error("query tolerance must be positive");
    const double tau = q.tolerance;
    // E_D[chi(x,-1)] to +-tau/4: the D side only needs a tau/8-approximate
    // sampler, and the quarter-tolerance estimate absorbs that slack.
    auto draw_neg = [&](Rng& r) {
        Assignment x = draw_or_fail(d_sampler, r, "D");
        return clamp_pm1(q.chi(x, -1));
    };
    const double e1 = estimate_mean_capped(draw_neg, tau / 4.0, delta / 2.0, cap, rng);
    // E_{D_{f,+}}[chi(x,1)-chi(x,-1)] to +-tau/2; difference lies in [-2,2],
    // so estimate its half and double.
    auto draw_diff_half = [&](Rng& r) {
        Assignment x = draw_or_fail(pos_sampler, r, "D_{f,+}");
        return clamp_pm1(0.5 * (clamp_pm1(q.chi(x, 1)) - clamp_pm1(q.chi(x, -1))));
    };
    const double e2 = 2.0 * estimate_mean_capped(draw_diff_half, tau / 4.0, delta / 2.0, cap, rng);
    return e1 + e2 * bias.value;
}

} // namespace

double simulate_stat(const StatQuery& q, const BottomSampler& d_sampler,
                     const BottomSampler& pos_sampler, const BiasEstimate& bias, double delta,
                     Rng& rng) {
    return simulate_stat_impl(q, d_sampler, pos_sampler, bias, delta, 0, rng);
}

double simulate_stat_capped(const StatQuery& q, const BottomSampler& d_sampler,
                            const BottomSampler& pos_sampler, const BiasEstimate& bias,
                            double delta, std::uint64_t sample_cap, Rng& rng) {
    return simulate_stat_impl(q, d_sampler, pos_sampler, bias, delta, sample_cap, rng);
}

std::optional<Assignment> simulate_sample_dfplus(const BottomSampler& pos_source,
                                                 const BoolFunc& g, double eps_prime, double delta,
                                                 Rng& rng) {
    if (!(eps_prime > 0.0 && eps_prime <= 1.0))
        throw invalid_input_error("eps_prime must be in (0,1]");
    const std::uint64_t cap =
        static_cast<std::uint64_t>(std::ceil((1.0 / eps_prime) * std::log(1.0 / delta))) + 1;
    for (std::uint64_t i = 0; i < cap; ++i) {
        auto x = pos_source.generate(rng);
        if (!x) continue;
        if (g.evaluate(*x)) return x;
    }
    return std::nullopt;
}

BiasEstimate estimate_bias(double p_hat, double tau_prime, double delta_prime, const BoolFunc& g,
                           const ForwardTools& tools, Rng& rng) {
    if (!(p_hat > 0.0 && p_hat <= 1.0)) throw invalid_input_error("p_hat must be in (0,1]");
    if (!(tau_prime > 0.0)) throw invalid_input_error("tau_prime must be positive");
    (void)g;
    const CountEstimate pg = tools.count(tau_prime / 2.0, delta_prime, rng);
    if (!(pg.value > 0.0)) throw algorithm_failure("counter reported zero mass for g");
    const double ratio = p_hat / pg.value;
    return BiasEstimate{std::clamp(ratio, 0.0, 1.0), tau_prime};
}

namespace {

// Oracle adapter enforcing budget, tolerance floor and the delta/(2 T1)
// split of the SQ simulation.
class BudgetedOracle : public SqOracle {
public:
    BudgetedOracle(const LearnerSpec& spec, const StatAnswerFn& answer, double delta, Rng& rng)
        : spec_(spec), answer_(answer), delta_(delta), rng_(rng) {}

    double query(const StatQuery& q) override {
        if (issued_ >= spec_.query_budget)
            throw algorithm_failure("sq learner exceeded its declared query budget");
        ++issued_;
        if (q.tolerance + 1e-15 < spec_.min_tolerance)
            throw invalid_input_error("sq learner issued a query below its declared tolerance");
        const double delta_q = delta_ / (2.0 * static_cast<double>(spec_.query_budget));
        return answer_(q, delta_q, rng_);
    }

private:
    const LearnerSpec& spec_;
    const StatAnswerFn& answer_;
    double delta_;
    Rng& rng_;
    std::uint64_t issued_ = 0;
};

} // namespace

BoolFunc run_sq_learner(SqLearner& learner, const LearnerSpec& spec, const StatAnswerFn& answer,
                        double epsilon, double delta, Rng& rng) {
    if (spec.query_budget == 0) {
        // A learner that declares zero queries just runs.
        BudgetedOracle oracle(spec, answer, delta, rng);
        return learner.learn(oracle, epsilon, delta / 2.0, rng);
    }
    BudgetedOracle oracle(spec, answer, delta, rng);
    return learner.learn(oracle, epsilon, delta / 2.0, rng);
}

SparseDisjunctionLearner::SparseDisjunctionLearner(int n, std::vector<Conjunction> features,
                                                   int sparsity, EllPoly ell,
                                                   double tolerance_floor)
    : n_(n), features_(std::move(features)), sparsity_(std::max(1, sparsity)), ell_(ell),
      tolerance_floor_(tolerance_floor) {}

LearnerSpec SparseDisjunctionLearner::declared_spec(double epsilon) const {
    const double big_n = static_cast<double>(std::max<std::size_t>(1, features_.size()));
    LearnerSpec spec;
    spec.query_budget = features_.size() + 1;
    spec.eval_cost = static_cast<std::uint64_t>(n_);
    spec.min_tolerance = std::max(epsilon / (8.0 * big_n), tolerance_floor_);
    spec.sample_budget = chernoff_samples(std::max(spec.min_tolerance / 4.0, 1e-6), 1e-4);
    return spec;
}

BoolFunc SparseDisjunctionLearner::learn(SqOracle& oracle, double epsilon, double delta, Rng&) {
    (void)delta;
    const double big_n = static_cast<double>(std::max<std::size_t>(1, features_.size()));
    const double tol = std::max(epsilon / (8.0 * big_n), tolerance_floor_);

    StatQuery bias_query;
    bias_query.tolerance = tol;
    bias_query.chi = [](const Assignment&, int label) { return label > 0 ? 1.0 : 0.0; };
    const double pr_true = oracle.query(bias_query);
    if (pr_true <= epsilon) return BoolFunc::make_const(n_, false);

    const double include_threshold = 2.0 * tol + ell_(epsilon / static_cast<double>(sparsity_));
    std::vector<int> selected;
    for (std::size_t i = 0; i < features_.size(); ++i) {
        const Conjunction& feat = features_[i];
        StatQuery q;
        q.tolerance = tol;
        q.chi = [&feat](const Assignment& x, int label) {
            return (label < 0 && feat.evaluate(x)) ? 1.0 : 0.0;
        };
        const double violation = oracle.query(q);
        if (violation <= include_threshold) selected.push_back(static_cast<int>(i));
    }
    return BoolFunc::make_feature_disjunction(n_,
                                              FeatureDisjunction{features_, std::move(selected)});
}

HalfspaceSqLearner::HalfspaceSqLearner(int n, double tolerance_floor, std::uint64_t round_cap,
                                       double step)
    : n_(n), tolerance_floor_(tolerance_floor), round_cap_(round_cap), step_(step) {}

std::uint64_t HalfspaceSqLearner::rounds(double epsilon) const {
    std::uint64_t t = static_cast<std::uint64_t>(
        std::ceil(64.0 * static_cast<double>(n_) / (epsilon * epsilon)));
    if (round_cap_ > 0 && t > round_cap_) t = round_cap_;
    return t;
}

LearnerSpec HalfspaceSqLearner::declared_spec(double epsilon) const {
    const std::uint64_t t = rounds(epsilon);
    const std::uint64_t nu = static_cast<std::uint64_t>(n_);
    // Gradient queries per round plus the fixed overhead: the bias probe,
    // the warm-start moments, checkpoint scorings and the threshold sweep.
    LearnerSpec spec;
    spec.query_budget = (nu + 1) * t + 2 * (nu + 1) + std::min<std::uint64_t>(16, t) + 24;
    spec.eval_cost = nu;
    spec.min_tolerance = std::max(epsilon / (8.0 * static_cast<double>(n_)), tolerance_floor_);
    spec.sample_budget = chernoff_samples(std::max(spec.min_tolerance / 4.0, 1e-6), 1e-4);
    return spec;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Ltf round_iterate(const std::vector<double>& v, int n) {
    double maxc = 0.0;
    for (double c : v) maxc = std::max(maxc, std::fabs(c));
    Ltf h;
    h.weights.assign(static_cast<std::size_t>(n), 0);
    h.theta = 0;
    if (maxc == 0.0) return h;  // constant-true hypothesis (0 >= 0)
    const double scale = (static_cast<double>(kDefaultWeightCap) - 1.0) / maxc;
    for (int j = 0; j < n; ++j)
        h.weights[static_cast<std::size_t>(j)] =
            static_cast<std::int64_t>(std::llround(v[static_cast<std::size_t>(j)] * scale));
    h.theta = -static_cast<std::int64_t>(std::llround(v[static_cast<std::size_t>(n)] * scale));
    return h;
}

} // namespace

BoolFunc HalfspaceSqLearner::learn(SqOracle& oracle, double epsilon, double delta, Rng&) {
    (void)delta;
    const int n = n_;
    const double tol = std::max(epsilon / (8.0 * static_cast<double>(n)), tolerance_floor_);
    const double inv_r = 1.0 / std::sqrt(static_cast<double>(n + 1));
    const std::uint64_t t_rounds = rounds(epsilon);
    const std::uint64_t checkpoint_every = std::max<std::uint64_t>(1, t_rounds / 16);

    std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);

    auto phi = [&](const Assignment& x, int j) {
        return j < n ? static_cast<double>(x.pm1(j)) * inv_r : inv_r;
    };
    // The n+1 gradient queries of one round share the same iterate, so the
    // per-point margins can be memoized across them.
    auto margin_cache = std::make_shared<std::unordered_map<std::uint64_t, double>>();
    auto margin = [&, margin_cache](const Assignment& x) {
        const std::uint64_t key = x.to_index();
        auto it = margin_cache->find(key);
        if (it != margin_cache->end()) return it->second;
        double s = v[static_cast<std::size_t>(n)] * inv_r;
        for (int j = 0; j < n; ++j) s += v[static_cast<std::size_t>(j)] * phi(x, j);
        (*margin_cache)[key] = s;
        return s;
    };

    auto estimate_error = [&](const Ltf& h) {
        StatQuery q;
        q.tolerance = tol;
        q.chi = [&h](const Assignment& x, int label) {
            const int pred = h.evaluate(x) ? 1 : -1;
            return pred == label ? 0.0 : 1.0;
        };
        return oracle.query(q);
    };

    // Moment-based warm start: v0_j proportional to E[1_{f=1} phi_j] - b E[phi_j],
    // the correlation of phi_j with the positive class. Two queries per
    // coordinate; the second is the class bias itself for j = n.
    double bias_hat = 0.0;
    {
        StatQuery qb;
        qb.tolerance = tol;
        qb.chi = [](const Assignment&, int label) { return label > 0 ? 1.0 : 0.0; };
        bias_hat = std::clamp(oracle.query(qb), 0.0, 1.0);
    }
    // Class weights for the balanced surrogate; the clamp keeps both classes
    // contributing when the bias estimate is extreme.
    const double bal = std::clamp(bias_hat, 0.05, 0.95);
    const double weight_pos = 1.0 - bal;
    const double weight_neg = bal;
    double norm0 = 0.0;
    for (int j = 0; j <= n; ++j) {
        StatQuery qa, qm;
        qa.tolerance = tol;
        qa.chi = [&, j](const Assignment& x, int label) {
            return label > 0 ? phi(x, j) : 0.0;
        };
        qm.tolerance = tol;
        qm.chi = [&, j](const Assignment& x, int) { return phi(x, j); };
        const double corr = oracle.query(qa) - bias_hat * oracle.query(qm);
        v[static_cast<std::size_t>(j)] = corr;
        norm0 += corr * corr;
    }
    // A warm start below the sampling-noise scale is meaningless; zero instead.
    if (norm0 > 1e-3) {
        const double scale0 = 3.0 / std::sqrt(norm0);
        for (double& c : v) c *= scale0;
    } else {
        std::fill(v.begin(), v.end(), 0.0);
    }

    // Seed the running best with the two constant hypotheses so degenerate
    // targets are never lost to descent noise.
    Ltf best{std::vector<std::int64_t>(static_cast<std::size_t>(n), 0), 0};  // constant true
    double best_err = estimate_error(best);
    {
        Ltf all_false{std::vector<std::int64_t>(static_cast<std::size_t>(n), 0), 1};
        const double err = estimate_error(all_false);
        if (err < best_err) {
            best_err = err;
            best = std::move(all_false);
        }
        Ltf warm = round_iterate(v, n);
        const double werr = estimate_error(warm);
        if (werr < best_err) {
            best_err = werr;
            best = std::move(warm);
        }
    }

    for (std::uint64_t round = 0; round < t_rounds; ++round) {
        margin_cache->clear();
        std::vector<double> grad(static_cast<std::size_t>(n + 1), 0.0);
        double grad_norm2 = 0.0;
        for (int j = 0; j <= n; ++j) {
            StatQuery q;
            q.tolerance = tol;
            q.chi = [&, j](const Assignment& x, int label) {
                const double y = static_cast<double>(label);
                const double cw = label > 0 ? weight_pos : weight_neg;
                return std::clamp(y * cw * sigmoid(-y * margin(x)) * phi(x, j), -1.0, 1.0);
            };
            const double gj = oracle.query(q);
            grad[static_cast<std::size_t>(j)] = gj;
            grad_norm2 += gj * gj;
        }
        // Norm-capped step with mild decay: signal-sized gradients move a
        // full step, noise-sized ones are damped instead of blown up to unit
        // length (which would turn convergence into a random walk).
        const double gnorm = std::sqrt(grad_norm2);
        const double scale = step_ / std::max(gnorm, 0.01) /
                             std::sqrt(1.0 + static_cast<double>(round) / 16.0);
        for (int j = 0; j <= n; ++j)
            v[static_cast<std::size_t>(j)] += scale * grad[static_cast<std::size_t>(j)];
        if ((round + 1) % checkpoint_every == 0 || round + 1 == t_rounds) {
            Ltf cand = round_iterate(v, n);
            const double err = estimate_error(cand);
            if (err < best_err) {
                best_err = err;
                best = std::move(cand);
            }
        }
    }

    // Threshold sweep around the best iterate: sparse targets live or die by
    // the bias coordinate.
    {
        double vnorm = 0.0;
        for (double c : v) vnorm = std::max(vnorm, std::fabs(c));
        const double span = std::max(1.0, vnorm) * inv_r;
        std::vector<double> vb = v;
        for (int shift = -8; shift <= 8; ++shift) {
            if (shift == 0) continue;
            vb[static_cast<std::size_t>(n)] =
                v[static_cast<std::size_t>(n)] + span * static_cast<double>(shift) / 8.0;
            Ltf cand = round_iterate(vb, n);
            const double err = estimate_error(cand);
            if (err < best_err) {
                best_err = err;
                best = std::move(cand);
            }
        }
    }
    return BoolFunc::make_ltf(n, best.weights, best.theta);
}

std::vector<Conjunction> all_conjunctions_up_to_width(int n, int k) {
    if (k < 1) throw invalid_input_error("conjunction width bound must be >= 1");
    std::vector<Conjunction> out;
    std::vector<int> vars;
    std::function<void(int, int)> choose = [&](int start, int remaining) {
        if (remaining == 0) {
            // assign polarities
            const int w = static_cast<int>(vars.size());
            for (int mask = 0; mask < (1 << w); ++mask) {
                Conjunction c;
                for (int idx = 0; idx < w; ++idx)
                    c.literals.push_back(Literal{vars[static_cast<std::size_t>(idx)],
                                                 ((mask >> idx) & 1) == 1});
                out.push_back(std::move(c));
            }
            return;
        }
        for (int var = start; var + remaining - 1 <= n; ++var) {
            vars.push_back(var);
            choose(var + 1, remaining - 1);
            vars.pop_back();
        }
    };
    for (int width = 1; width <= std::min(n, k); ++width) choose(1, width);
    return out;
}

} // namespace invgen
