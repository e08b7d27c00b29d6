#include "invgen/genct.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace invgen {

namespace {

// Memory guard for the DP table: rows * cols of uint64 counts.
constexpr std::uint64_t kDpCellCap = 1ULL << 28;

// Lowers any supported representation to a DNF term list.
std::vector<Conjunction> lower_to_terms(const BoolFunc& g) {
    std::vector<Conjunction> terms;
    std::visit(
        [&terms](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Dnf>) {
                terms = node.terms;
            } else if constexpr (std::is_same_v<T, Conjunction>) {
                terms.push_back(node);
            } else if constexpr (std::is_same_v<T, FeatureDisjunction>) {
                for (int idx : node.selected)
                    terms.push_back(node.features[static_cast<std::size_t>(idx)]);
            } else if constexpr (std::is_same_v<T, ConstTrue>) {
                terms.push_back(Conjunction{});  // empty conjunction = constant true
            } else if constexpr (std::is_same_v<T, ConstFalse>) {
                // no terms
            } else {
                throw unsupported_class_error("cannot lower ltf to dnf terms");
            }
        },
        g.node());
    return terms;
}

} // namespace

LtfDpTable::LtfDpTable(const Ltf& f) : ltf_(f) {
    const int n = static_cast<int>(f.weights.size());
    if (n > 62) throw capacity_error("ltf dp limited to n <= 62");
    const std::int64_t wsum = f.weight_sum_abs();
    offset_ = wsum;
    const std::uint64_t cols = static_cast<std::uint64_t>(2 * wsum + 1);
    if (cols * static_cast<std::uint64_t>(n + 1) > kDpCellCap)
        throw capacity_error("ltf dp table too large (weight overflow)");
    suffix_.assign(static_cast<std::size_t>(n + 1), std::vector<std::uint64_t>(cols, 0));
    for (std::int64_t s = -wsum; s <= wsum; ++s)
        suffix_[static_cast<std::size_t>(n)][static_cast<std::size_t>(s + offset_)] =
            (s >= f.theta) ? 1 : 0;
    for (int i = n - 1; i >= 0; --i) {
        const std::int64_t wi = f.weights[static_cast<std::size_t>(i)];
        // Partial sums over coordinates 0..i-1 stay within +-(sum of their
        // absolute weights), so s +- wi never leaves the table.
        std::int64_t reach = 0;
        for (int j = 0; j < i; ++j) reach += std::llabs(f.weights[static_cast<std::size_t>(j)]);
        auto& row = suffix_[static_cast<std::size_t>(i)];
        const auto& next = suffix_[static_cast<std::size_t>(i + 1)];
        for (std::int64_t s = -reach; s <= reach; ++s) {
            row[static_cast<std::size_t>(s + offset_)] =
                next[static_cast<std::size_t>(s - wi + offset_)] +
                next[static_cast<std::size_t>(s + wi + offset_)];
        }
    }
    count_ = suffix_[0][static_cast<std::size_t>(offset_)];
}

double LtfDpTable::satisfying_fraction() const {
    return std::ldexp(static_cast<double>(count_), -n());
}

Assignment LtfDpTable::sample(Rng& rng) const {
    if (count_ == 0) throw infeasible_error("sampling from unsatisfiable ltf");
    const int n = this->n();
    Assignment x = Assignment::from_index(0, n);
    std::int64_t s = 0;
    for (int i = 0; i < n; ++i) {
        const std::int64_t wi = ltf_.weights[static_cast<std::size_t>(i)];
        const std::uint64_t ones =
            suffix_[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(s + wi + offset_)];
        const std::uint64_t total =
            suffix_[static_cast<std::size_t>(i)][static_cast<std::size_t>(s + offset_)];
        const bool bit = rng.below(total) < ones;
        x.set_bit(i, bit);
        s += bit ? wi : -wi;
    }
    return x;
}

CountEstimate ltf_count_exact(const Ltf& f) {
    LtfDpTable table(f);
    return CountEstimate{table.satisfying_fraction(), 0.0, 0.0, true};
}

BottomSampler ltf_sample_exact(const Ltf& f) {
    auto table = std::make_shared<LtfDpTable>(f);
    if (!table->satisfiable()) throw infeasible_error("ltf has no satisfying assignment");
    return BottomSampler(
        [table](Rng& rng) -> std::optional<Assignment> { return table->sample(rng); }, 0.0, 0.0);
}

namespace {

// Shared state of the Karp-Luby union estimator: term weights 2^{n-width}
// normalized into a cumulative table for proportional selection.
struct TermSelector {
    std::vector<Conjunction> terms;
    std::vector<double> cum;   // cumulative weights
    double total_weight = 0.0; // sum over terms of 2^{n - width}, as a fraction of 2^n it is cum/2^n
    int n = 0;

    TermSelector(std::vector<Conjunction> ts, int n_) : terms(std::move(ts)), n(n_) {
        cum.reserve(terms.size());
        double acc = 0.0;
        for (const Conjunction& t : terms) {
            double w = t.contradictory() ? 0.0 : std::ldexp(1.0, n - t.width());
            acc += w;
            cum.push_back(acc);
        }
        total_weight = acc;
    }

    bool degenerate() const { return total_weight <= 0.0; }

    int pick(Rng& rng) const {
        const double u = rng.unit() * total_weight;
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        int idx = static_cast<int>(it - cum.begin());
        if (idx >= static_cast<int>(terms.size())) idx = static_cast<int>(terms.size()) - 1;
        return idx;
    }

    // Uniform completion of term i: fixed literals forced, free bits random.
    Assignment complete(int i, Rng& rng) const {
        Assignment x = Assignment::from_index(0, n);
        std::vector<bool> fixed(static_cast<std::size_t>(n), false);
        for (const Literal& lit : terms[static_cast<std::size_t>(i)].literals) {
            x.set_bit(lit.var - 1, lit.positive);
            fixed[static_cast<std::size_t>(lit.var - 1)] = true;
        }
        for (int j = 0; j < n; ++j)
            if (!fixed[static_cast<std::size_t>(j)]) x.set_bit(j, rng.coin());
        return x;
    }

    int min_satisfied_index(const Assignment& x) const {
        for (std::size_t j = 0; j < terms.size(); ++j)
            if (!terms[j].contradictory() && terms[j].evaluate(x)) return static_cast<int>(j);
        return -1;
    }
};

} // namespace

CountEstimate dnf_count(const Dnf& f, int n, double epsilon, double delta, Rng& rng) {
    if (f.terms.empty()) throw invalid_input_error("dnf_count needs at least one term");
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw invalid_input_error("dnf_count needs epsilon, delta in (0,1)");
    TermSelector sel(f.terms, n);
    if (sel.degenerate()) return CountEstimate{0.0, 0.0, 0.0, true};

    const double s = static_cast<double>(f.terms.size());
    const std::uint64_t budget = static_cast<std::uint64_t>(
        std::ceil((8.0 * s / (epsilon * epsilon)) * std::log(2.0 / delta)));
    // Median of 9 group means upgrades the per-group constant-confidence
    // estimate to the full 1-delta guarantee.
    constexpr int kGroups = 9;
    const std::uint64_t per_group = std::max<std::uint64_t>(1, budget / kGroups);
    std::vector<double> group_means;
    group_means.reserve(kGroups);
    for (int gidx = 0; gidx < kGroups; ++gidx) {
        std::uint64_t hits = 0;
        for (std::uint64_t trial = 0; trial < per_group; ++trial) {
            const int i = sel.pick(rng);
            const Assignment x = sel.complete(i, rng);
            if (sel.min_satisfied_index(x) == i) ++hits;
        }
        group_means.push_back(static_cast<double>(hits) / static_cast<double>(per_group));
    }
    std::nth_element(group_means.begin(), group_means.begin() + kGroups / 2, group_means.end());
    const double canonical_fraction = group_means[kGroups / 2];
    const double value = canonical_fraction * std::ldexp(sel.total_weight, -n);
    return CountEstimate{std::min(1.0, value), epsilon, delta, false};
}

BottomSampler dnf_sample(const Dnf& f, int n, double delta) {
    if (f.terms.empty()) throw invalid_input_error("dnf_sample needs at least one term");
    if (!(delta > 0.0 && delta < 1.0)) throw invalid_input_error("delta must be in (0,1)");
    auto sel = std::make_shared<TermSelector>(f.terms, n);
    if (sel->degenerate()) throw infeasible_error("all dnf terms are contradictory");
    const std::uint64_t trials = static_cast<std::uint64_t>(std::ceil(
                                     static_cast<double>(f.terms.size()) * std::log(1.0 / delta))) +
                                 1;
    return BottomSampler(
        [sel, trials](Rng& rng) -> std::optional<Assignment> {
            for (std::uint64_t t = 0; t < trials; ++t) {
                const int i = sel->pick(rng);
                const Assignment x = sel->complete(i, rng);
                if (sel->min_satisfied_index(x) == i) return x;
            }
            return std::nullopt;
        },
        0.0, delta);
}

double dnf_min_index_acceptance(const Dnf& f, int n) {
    if (n > kEnumerationCap) throw capacity_error("acceptance oracle needs n within enumeration cap");
    double union_count = 0.0;
    double weight_sum = 0.0;
    BoolFunc bf = BoolFunc::make_dnf(n, f.terms);
    union_count = static_cast<double>(brute_force_satisfying_count(bf, n));
    for (const Conjunction& t : f.terms)
        if (!t.contradictory()) weight_sum += std::ldexp(1.0, n - t.width());
    if (weight_sum == 0.0) throw infeasible_error("all dnf terms are contradictory");
    return union_count / weight_sum;
}

ForwardTools make_forward_tools(const BoolFunc& g) {
    if (g.is_const_false()) throw infeasible_error("constant-false function has no forward tools");
    if (g.is_ltf()) {
        Ltf f = g.as_ltf();
        auto table = std::make_shared<LtfDpTable>(f);
        if (!table->satisfiable()) throw infeasible_error("ltf has no satisfying assignment");
        ForwardTools tools;
        tools.exact = true;
        tools.count = [table](double, double, Rng&) {
            return CountEstimate{table->satisfying_fraction(), 0.0, 0.0, true};
        };
        tools.make_sampler = [table](double, double) {
            return BottomSampler(
                [table](Rng& rng) -> std::optional<Assignment> { return table->sample(rng); }, 0.0,
                0.0);
        };
        return tools;
    }
    std::vector<Conjunction> terms = lower_to_terms(g);
    if (terms.empty()) throw infeasible_error("no satisfiable representation to sample from");
    bool any_ok = false;
    for (const Conjunction& t : terms)
        if (!t.contradictory()) any_ok = true;
    if (!any_ok) throw infeasible_error("all terms are contradictory");
    const int n = g.n();
    Dnf dnf{std::move(terms)};
    ForwardTools tools;
    tools.exact = false;
    tools.count = [dnf, n](double eps, double delta, Rng& rng) {
        return dnf_count(dnf, n, eps, delta, rng);
    };
    tools.make_sampler = [dnf, n](double, double delta) { return dnf_sample(dnf, n, delta); };
    return tools;
}

} // namespace invgen
