#include "invgen/densify.hpp"

#include <algorithm>
#include <cmath>

#include "invgen/linprog.hpp"

namespace invgen {

DensifierParams DensifierParams::for_ltf(int n, double epsilon, double delta, double p_hat) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw invalid_input_error("densifier needs epsilon, delta in (0,1)");
    DensifierParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.p_hat = std::min(1.0, p_hat);
    const double nn = static_cast<double>(n);
    p.n_plus = static_cast<std::uint64_t>(
        std::ceil((2.0 / epsilon) * (nn * nn + std::log(1.0 / delta))));
    p.m_cap = static_cast<std::uint64_t>(
        std::ceil(4.0 * nn * nn * std::log(std::max(nn, 2.0))));
    p.gamma = delta / (16.0 * static_cast<double>(p.m_cap));
    return p;
}

DensifierParams DensifierParams::for_dnf(int n, int s, double epsilon, double delta, double p_hat,
                                         EllPoly ell, std::uint64_t iteration_cap) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw invalid_input_error("densifier needs epsilon, delta in (0,1)");
    if (s < 1) throw invalid_input_error("term count s must be >= 1");
    DensifierParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.p_hat = std::min(1.0, p_hat);
    p.ell = ell;
    p.r = static_cast<int>(std::ceil(2.0 * std::log2(std::max(2.0, static_cast<double>(n)))));
    // M = 2 n^{2 log2(2s/l(eps/s))} ln(s/delta), computed in log space and
    // clamped to the desk-scale iteration cap.
    const double ell_val = std::max(1e-300, ell(epsilon / static_cast<double>(s)));
    const double exponent = 2.0 * std::log2(2.0 * static_cast<double>(s) / ell_val);
    const double log_m = std::log(2.0) + exponent * std::log(static_cast<double>(n)) +
                         std::log(std::max(1.0 + 1e-9, std::log(static_cast<double>(s) / delta)));
    double m_real;
    if (log_m > std::log(static_cast<double>(iteration_cap)))
        m_real = static_cast<double>(iteration_cap);
    else
        m_real = std::ceil(std::exp(log_m));
    p.m_cap = static_cast<std::uint64_t>(std::max(1.0, m_real));
    p.gamma = 1.0 / (2.0 * static_cast<double>(p.m_cap));
    return p;
}

bool ConstraintSet::add_positive(const Assignment& x) {
    if (!pos_seen_.insert(x).second) return false;
    positives.push_back(x);
    return true;
}

bool ConstraintSet::add_negative(const Assignment& x) {
    if (!neg_seen_.insert(x).second) return false;
    negatives.push_back(x);
    return true;
}

namespace {

constexpr double kMarginFloor = 1e-9;

bool verify_integer_ltf(const Ltf& h, const ConstraintSet& c) {
    for (const Assignment& x : c.positives)
        if (!h.evaluate(x)) return false;
    for (const Assignment& x : c.negatives)
        if (h.evaluate(x)) return false;
    return true;
}

} // namespace

Ltf consistent_ltf(const ConstraintSet& constraints, int n) {
    if (constraints.positives.empty() && constraints.negatives.empty())
        return Ltf{std::vector<std::int64_t>(static_cast<std::size_t>(n), 0), 0};

    {
        std::set<Assignment> pos(constraints.positives.begin(), constraints.positives.end());
        for (const Assignment& x : constraints.negatives)
            if (pos.count(x))
                throw infeasible_error("point constrained both positive and negative");
    }

    // Variables z = [u(n), v(n), tp, tm, t]: w = u - v, theta = tp - tm,
    // maximize the margin t. Box rows keep the polytope bounded.
    const std::size_t nu = static_cast<std::size_t>(n);
    const std::size_t dim = 2 * nu + 3;
    std::vector<double> c(dim, 0.0);
    c[dim - 1] = 1.0;

    std::vector<std::vector<double>> a;
    std::vector<double> b;
    auto add_point_row = [&](const Assignment& x, bool positive) {
        // positive: -(u-v).x + (tp-tm) + t <= 0 ; negative: (u-v).x - (tp-tm) + t <= 0
        std::vector<double> row(dim, 0.0);
        const double sgn = positive ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) {
            row[static_cast<std::size_t>(j)] = sgn * static_cast<double>(x.pm1(j));
            row[nu + static_cast<std::size_t>(j)] = -sgn * static_cast<double>(x.pm1(j));
        }
        row[2 * nu] = -sgn;
        row[2 * nu + 1] = sgn;
        row[dim - 1] = 1.0;
        a.push_back(std::move(row));
        b.push_back(0.0);
    };
    for (const Assignment& x : constraints.positives) add_point_row(x, true);
    for (const Assignment& x : constraints.negatives) add_point_row(x, false);
    for (std::size_t j = 0; j < 2 * nu; ++j) {
        std::vector<double> row(dim, 0.0);
        row[j] = 1.0;
        a.push_back(std::move(row));
        b.push_back(1.0);
    }
    for (std::size_t j : {2 * nu, 2 * nu + 1}) {
        std::vector<double> row(dim, 0.0);
        row[j] = 1.0;
        a.push_back(std::move(row));
        b.push_back(static_cast<double>(n + 1));
    }
    {
        std::vector<double> row(dim, 0.0);
        row[dim - 1] = 1.0;
        a.push_back(std::move(row));
        b.push_back(1.0);
    }

    const SimplexResult res = simplex_max(c, a, b);
    if (!res.optimal || res.objective <= kMarginFloor)
        throw infeasible_error("no separating halfspace with positive margin");

    std::vector<double> w(nu);
    for (std::size_t j = 0; j < nu; ++j) w[j] = res.x[j] - res.x[nu + j];
    const double theta = res.x[2 * nu] - res.x[2 * nu + 1];

    // Integer rounding: double the denominator until the exact-arithmetic
    // verification passes all constraints (negatives strictly).
    for (std::int64_t q = 1; q <= (1LL << 21); q *= 2) {
        Ltf h;
        h.weights.resize(nu);
        for (std::size_t j = 0; j < nu; ++j)
            h.weights[j] = static_cast<std::int64_t>(std::llround(w[j] * static_cast<double>(q)));
        h.theta = static_cast<std::int64_t>(std::llround(theta * static_cast<double>(q)));
        // "w.x >= theta" admits equality; bump theta so rounded negatives
        // stay strictly below when the margin allows it.
        if (verify_integer_ltf(h, constraints)) return h;
        Ltf h2 = h;
        h2.theta += 1;
        if (verify_integer_ltf(h2, constraints)) return h2;
    }
    throw infeasible_error("integer rounding failed to preserve constraint signs");
}

LtfCounterFn exact_ltf_counter() {
    return [](const Ltf& h, double, double, Rng&) { return ltf_count_exact(h); };
}

LtfSamplerFn exact_ltf_sampler_factory() {
    return [](const Ltf& h, double) { return ltf_sample_exact(h); };
}

namespace {

Assignment draw_positive(const BottomSampler& source, Rng& rng) {
    for (int i = 0; i < 100; ++i) {
        auto x = source.generate(rng);
        if (x) return *x;
    }
    throw sampler_failure("positive-sample source kept returning bottom");
}

} // namespace

Ltf densify_ltf(const BottomSampler& pos_source, const DensifierParams& params, int n,
                const LtfCounterFn& counter, const LtfSamplerFn& sampler_factory, Rng& rng) {
    if (!(params.gamma > 0.0)) throw invalid_input_error("densifier needs gamma > 0");
    const double eps = params.epsilon;
    const double exit_threshold = params.p_hat / (params.gamma * (1.0 + eps) * (1.0 + eps));
    const std::uint64_t m_cap = params.m_cap;
    const double round_delta = params.delta / (4.0 * static_cast<double>(std::max<std::uint64_t>(1, m_cap)));

    // S+ deduped: consistency is a set property and the scan gets cheap.
    std::set<Assignment> s_plus;
    for (std::uint64_t i = 0; i < params.n_plus; ++i) s_plus.insert(draw_positive(pos_source, rng));

    ConstraintSet constraints;
    Ltf h = consistent_ltf(constraints, n);
    for (std::uint64_t round = 0; round <= m_cap; ++round) {
        bool fixed_positive = false;
        for (const Assignment& x : s_plus) {
            if (!h.evaluate(x)) {
                constraints.add_positive(x);
                h = consistent_ltf(constraints, n);
                fixed_positive = true;
                break;
            }
        }
        if (fixed_positive) continue;

        const CountEstimate mass = counter(h, eps, round_delta, rng);
        if (mass.value <= exit_threshold) return h;

        const BottomSampler gen = sampler_factory(h, round_delta);
        const Assignment x = draw_positive(gen, rng);
        constraints.add_negative(x);
        h = consistent_ltf(constraints, n);  // throws infeasible_error on a mislabel
    }
    // The round budget ran out; consistency with S+ is enforced, not left to
    // chance, so clean up any positives the last hypothesis misses.
    for (bool dirty = true; dirty;) {
        dirty = false;
        for (const Assignment& x : s_plus) {
            if (!h.evaluate(x)) {
                constraints.add_positive(x);
                h = consistent_ltf(constraints, n);
                dirty = true;
                break;
            }
        }
    }
    return h;
}

std::vector<Conjunction> densify_dnf(const BottomSampler& pos_source,
                                     const DensifierParams& params, int n, int s, Rng& rng) {
    (void)s;
    std::vector<Conjunction> kept;
    std::set<Conjunction> seen;
    const int r = std::max(1, params.r);
    for (std::uint64_t iter = 0; iter < params.m_cap; ++iter) {
        std::vector<Assignment> batch;
        batch.reserve(static_cast<std::size_t>(r));
        for (int j = 0; j < r; ++j) batch.push_back(draw_positive(pos_source, rng));
        // Literals constant across the whole batch.
        Conjunction cand;
        for (int var = 1; var <= n; ++var) {
            const bool first = batch.front().bit(var - 1);
            bool constant = true;
            for (int j = 1; j < r && constant; ++j)
                if (batch[static_cast<std::size_t>(j)].bit(var - 1) != first) constant = false;
            if (constant) cand.literals.push_back(Literal{var, first});
        }
        const double mass = std::ldexp(1.0, -cand.width());
        if (mass > params.p_hat) continue;
        if (seen.insert(cand).second) kept.push_back(cand);
    }
    return kept;
}

KdnfDensifier densify_kdnf(int n, int k) {
    if (k < 1) throw invalid_input_error("k must be >= 1");
    return KdnfDensifier{BoolFunc::make_const(n, true), std::ldexp(1.0, -k)};
}

} // namespace invgen
