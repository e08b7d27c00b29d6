#include <doctest.h>

#include <map>

#include "test_util.hpp"

using namespace invgen;
using namespace testutil;

namespace {

Conjunction conj(std::initializer_list<int> lits) {
    Conjunction c;
    for (int sv : lits) c.literals.push_back(Literal::from_signed(sv));
    c.canonicalize();
    return c;
}

} // namespace

TEST_CASE("simulate_stat: label-independent queries ignore the bias") {
    Rng rng(42);
    const BoolFunc g = BoolFunc::make_ltf(3, {1, 1, 1}, 1);
    const auto gsat = brute_force_satisfying_set(g, 3);
    const BottomSampler d = table_sampler(gsat);
    const BottomSampler pos = table_sampler(gsat);

    StatQuery q;
    q.tolerance = 0.05;
    q.chi = [](const Assignment& x, int) { return x.bit(0) ? 1.0 : -1.0; };

    Rng r1(42), r2(42);
    const double v_low = simulate_stat(q, d, pos, BiasEstimate{0.0, 0.0}, 0.05, r1);
    const double v_high = simulate_stat(q, d, pos, BiasEstimate{1.0, 0.0}, 0.05, r2);
    // The second expectation is of the constant zero, so the bias cannot move
    // the answer.
    CHECK(std::fabs(v_low - v_high) <= 1e-12);
}

TEST_CASE("simulate_stat: f == g with chi(x,y)=y lands near 1") {
    Rng rng(43);
    const BoolFunc f = BoolFunc::make_ltf(3, {1, 1, 1}, 1);
    const auto fsat = brute_force_satisfying_set(f, 3);
    const BottomSampler d = table_sampler(fsat);

    StatQuery q;
    q.tolerance = 0.05;
    q.chi = [](const Assignment&, int label) { return static_cast<double>(label); };

    const double v = simulate_stat(q, d, d, BiasEstimate{1.0, 0.0}, 0.02, rng);
    CHECK(std::fabs(v - 1.0) <= 0.05);
}

TEST_CASE("simulate_stat meets tau+tau' on enumerated instances") {
    // D = uniform over g^-1(1) for majority-of-3 g; f a sub-halfspace.
    const BoolFunc g = BoolFunc::make_ltf(3, {1, 1, 1}, 1);
    const BoolFunc f = BoolFunc::make_ltf(3, {2, 1, 1}, 2);
    const auto gsat = brute_force_satisfying_set(g, 3);
    const MassTable d_table = MassTable::uniform_over(gsat);

    std::vector<Assignment> dfp;
    for (const auto& x : gsat)
        if (f.evaluate(x)) dfp.push_back(x);
    const double true_bias = static_cast<double>(dfp.size()) / static_cast<double>(gsat.size());

    StatQuery q;
    q.tolerance = 0.05;
    q.chi = [](const Assignment&, int label) { return static_cast<double>(label); };
    const double exact = exact_expectation(d_table, f, q);

    const double tau_prime = 0.025;
    const double delta = 0.02;
    const BottomSampler d = table_sampler(gsat);
    const BottomSampler pos = table_sampler(dfp);

    Rng rng(4242);
    int ok = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        Rng local = rng.child(static_cast<std::uint64_t>(t));
        // Bias estimate off by up to tau' in a deterministic sweep.
        const double off = (2.0 * local.unit() - 1.0) * tau_prime;
        const BiasEstimate bias{std::clamp(true_bias + off, 0.0, 1.0), tau_prime};
        const double v = simulate_stat(q, d, pos, bias, delta, local);
        if (std::fabs(v - exact) <= q.tolerance + tau_prime) ++ok;
    }
    CHECK(static_cast<double>(ok) / trials >= 1.0 - delta - 0.02);
}

TEST_CASE("simulate_sample_dfplus semantics") {
    Rng rng(77);
    const BoolFunc f = BoolFunc::make_ltf(3, {1, 1, 1}, 1);
    const auto fsat = brute_force_satisfying_set(f, 3);
    const BottomSampler pos = table_sampler(fsat);

    SUBCASE("g == f is a passthrough") {
        auto x = simulate_sample_dfplus(pos, f, 1.0, 0.01, rng);
        REQUIRE(x);
        CHECK(f.evaluate(*x));
    }
    SUBCASE("rejected points never appear") {
        const BoolFunc g = BoolFunc::make_conjunction(3, conj({1}));
        for (int i = 0; i < 500; ++i) {
            auto x = simulate_sample_dfplus(pos, g, 0.5, 0.01, rng);
            REQUIRE(x);
            CHECK(g.evaluate(*x));
            CHECK(f.evaluate(*x));
        }
    }
    SUBCASE("conditional distribution is uniform on the intersection") {
        const BoolFunc g = BoolFunc::make_conjunction(3, conj({1}));  // x1-halfspace
        std::vector<Assignment> inter;
        for (const auto& x : fsat)
            if (g.evaluate(x)) inter.push_back(x);
        REQUIRE(inter.size() == 3);  // 110, 101, 111

        std::map<std::string, std::uint64_t> freq;
        const std::uint64_t draws = 300000;
        for (std::uint64_t i = 0; i < draws; ++i) {
            auto x = simulate_sample_dfplus(pos, g, 0.5, 1e-9, rng);
            REQUIRE(x);
            freq[x->to_string()]++;
        }
        for (const auto& [s, c] : freq)
            CHECK(std::fabs(static_cast<double>(c) / draws - 1.0 / 3.0) <= 0.01);
        CHECK(chi_square_uniform_pass(freq, inter.size(), draws, 1e-3));
    }
}

TEST_CASE("estimate_bias") {
    Rng rng(12);
    const BoolFunc g = BoolFunc::make_ltf(3, {1, 1, 1}, 1);
    const ForwardTools tools = make_forward_tools(g);
    const double p = 0.5;

    SUBCASE("g == f with exact p gives exactly 1") {
        const BiasEstimate b = estimate_bias(p, 0.1, 0.05, g, tools, rng);
        CHECK(b.value == doctest::Approx(1.0));
    }
    SUBCASE("enumerated instance lands within tau' of B/A") {
        const BoolFunc f = BoolFunc::make_ltf(3, {2, 1, 1}, 2);
        const auto gsat = brute_force_satisfying_set(g, 3);
        std::uint64_t b_count = 0;
        for (const auto& x : gsat)
            if (f.evaluate(x)) ++b_count;
        const double target = static_cast<double>(b_count) / static_cast<double>(gsat.size());
        const double pf = static_cast<double>(brute_force_satisfying_count(f, 3)) / 8.0;
        const BiasEstimate b = estimate_bias(pf, 0.05, 0.05, g, tools, rng);
        CHECK(std::fabs(b.value - target) <= 0.05);
    }
    SUBCASE("overshooting p_hat stays bounded and total") {
        const BiasEstimate b = estimate_bias(1.0, 0.1, 0.05, g, tools, rng);
        CHECK(b.value >= 0.0);
        CHECK(b.value <= 1.0);
    }
}

namespace {

// Counting wrapper asserting the declared LearnerSpec is honored.
struct InstrumentedAnswer {
    StatAnswerFn inner;
    std::uint64_t queries = 0;
    double min_tolerance_seen = 1.0;

    StatAnswerFn fn() {
        return [this](const StatQuery& q, double delta_q, Rng& rng) {
            ++queries;
            min_tolerance_seen = std::min(min_tolerance_seen, q.tolerance);
            return inner(q, delta_q, rng);
        };
    }
};

struct FixedLearner : SqLearner {
    BoolFunc h;
    explicit FixedLearner(BoolFunc f) : h(std::move(f)) {}
    LearnerSpec declared_spec(double) const override { return LearnerSpec{0, 1, 1.0, 0}; }
    BoolFunc learn(SqOracle&, double, double, Rng&) override { return h; }
};

struct GreedyLearner : SqLearner {
    std::uint64_t to_issue;
    explicit GreedyLearner(std::uint64_t q) : to_issue(q) {}
    LearnerSpec declared_spec(double) const override { return LearnerSpec{2, 1, 0.1, 0}; }
    BoolFunc learn(SqOracle& oracle, double, double, Rng&) override {
        StatQuery q;
        q.tolerance = 0.5;
        q.chi = [](const Assignment&, int label) { return static_cast<double>(label); };
        for (std::uint64_t i = 0; i < to_issue; ++i) oracle.query(q);
        return BoolFunc::make_const(2, true);
    }
};

} // namespace

TEST_CASE("run_sq_learner: passthrough and budget enforcement") {
    Rng rng(5);
    const BoolFunc fixed = BoolFunc::make_ltf(2, {1, 1}, 2);
    FixedLearner learner(fixed);
    const StatAnswerFn answer = [](const StatQuery&, double, Rng&) { return 0.0; };
    const BoolFunc h = run_sq_learner(learner, learner.declared_spec(0.1), answer, 0.1, 0.1, rng);
    CHECK(h.is_ltf());

    GreedyLearner hog(5);
    CHECK_THROWS_AS(run_sq_learner(hog, hog.declared_spec(0.1), answer, 0.1, 0.1, rng),
                    algorithm_failure);
}

TEST_CASE("sparse disjunction learner recovers a planted disjunction") {
    // 50 features: both polarities of the 10 variables plus filler pairs; the
    // planted target selects features {2, 17, 40}.
    const int n = 10;
    Rng rng(888);
    std::vector<Conjunction> features;
    for (int v = 1; v <= n; ++v) features.push_back(conj({v}));
    for (int v = 1; v <= n; ++v) features.push_back(conj({-v}));
    int a = 0;
    while (static_cast<int>(features.size()) < 50) {
        const int v1 = a % n + 1;
        const int v2 = (a * 7 + 3) % n + 1;
        if (v1 != v2) features.push_back(conj({v1, -v2}));
        ++a;
    }
    const std::vector<int> planted{2, 17, 40};
    const BoolFunc f =
        BoolFunc::make_feature_disjunction(n, FeatureDisjunction{features, planted});

    std::vector<Assignment> cube;
    for (int i = 0; i < (1 << n); ++i)
        cube.push_back(Assignment::from_index(static_cast<std::uint64_t>(i), n));
    const MassTable d = MassTable::uniform_over(cube);

    SparseDisjunctionLearner learner(n, features, 3);
    const LearnerSpec spec = learner.declared_spec(0.1);
    CHECK(spec.query_budget == features.size() + 1);

    InstrumentedAnswer instrumented{exact_stat_answer(d, f)};
    StatAnswerFn fn = instrumented.fn();
    const BoolFunc h = run_sq_learner(learner, spec, fn, 0.1, 0.1, rng);

    CHECK(instrumented.queries == features.size() + 1);
    CHECK(instrumented.min_tolerance_seen >= spec.min_tolerance);

    int disagreements = 0;
    for (const auto& x : cube)
        if (f.evaluate(x) != h.evaluate(x)) ++disagreements;
    CHECK(static_cast<double>(disagreements) / static_cast<double>(cube.size()) <= 0.1);
}

TEST_CASE("sparse disjunction learner: constant-false shortcut") {
    const int n = 6;
    Rng rng(9);
    std::vector<Conjunction> features{conj({1}), conj({2}), conj({3})};
    const BoolFunc f = BoolFunc::make_const(n, false);
    std::vector<Assignment> cube;
    for (int i = 0; i < (1 << n); ++i)
        cube.push_back(Assignment::from_index(static_cast<std::uint64_t>(i), n));
    const MassTable d = MassTable::uniform_over(cube);

    SparseDisjunctionLearner learner(n, features, 2);
    StatAnswerFn fn = exact_stat_answer(d, f);
    const BoolFunc h = run_sq_learner(learner, learner.declared_spec(0.1), fn, 0.1, 0.1, rng);
    CHECK(h.is_const_false());
}

TEST_CASE("sparse disjunction learner tolerates a noisy target") {
    // f differs from a 2-sparse disjunction on a kappa <= l(eps/2) fraction.
    const int n = 8;
    std::vector<Conjunction> features;
    for (int v = 1; v <= n; ++v) features.push_back(conj({v}));
    const std::vector<int> planted{0, 3};  // x1 or x4

    std::vector<Assignment> cube;
    for (int i = 0; i < (1 << n); ++i)
        cube.push_back(Assignment::from_index(static_cast<std::uint64_t>(i), n));
    const MassTable d = MassTable::uniform_over(cube);

    const BoolFunc fprime =
        BoolFunc::make_feature_disjunction(n, FeatureDisjunction{features, planted});
    const Assignment flip = Assignment::from_string("00000000");
    auto noisy_eval = [&](const Assignment& x) {
        const bool v = fprime.evaluate(x);
        return x == flip ? !v : v;
    };

    const double eps = 0.5;
    SparseDisjunctionLearner learner(n, features, 2);
    Rng rng(31337);
    StatAnswerFn fn = [&](const StatQuery& q, double, Rng&) {
        double e = 0.0;
        for (const auto& [x, px] : d.support()) e += px * q.chi(x, noisy_eval(x) ? 1 : -1);
        return e;
    };
    const BoolFunc h = run_sq_learner(learner, learner.declared_spec(eps), fn, eps, 0.1, rng);

    int disagreements = 0;
    for (const auto& x : cube)
        if (noisy_eval(x) != h.evaluate(x)) ++disagreements;
    CHECK(static_cast<double>(disagreements) / static_cast<double>(cube.size()) <= eps);
}

TEST_CASE("halfspace learner: trivial constant target") {
    const int n = 4;
    Rng rng(2);
    const BoolFunc f = BoolFunc::make_const(n, true);
    std::vector<Assignment> cube;
    for (int i = 0; i < (1 << n); ++i)
        cube.push_back(Assignment::from_index(static_cast<std::uint64_t>(i), n));
    const MassTable d = MassTable::uniform_over(cube);

    HalfspaceSqLearner learner(n, 0.01, 64);
    StatAnswerFn fn = exact_stat_answer(d, f);
    const BoolFunc h = run_sq_learner(learner, learner.declared_spec(0.2), fn, 0.2, 0.1, rng);
    int wrong = 0;
    for (const auto& x : cube)
        if (!h.evaluate(x)) ++wrong;
    CHECK(static_cast<double>(wrong) / cube.size() <= 0.2);
}

TEST_CASE("halfspace learner: majority-of-5 under a densifier-style distribution") {
    const int n = 5;
    const BoolFunc f = BoolFunc::make_ltf(n, {1, 1, 1, 1, 1}, 1);
    // D = uniform over a superset halfspace's satisfying set.
    const BoolFunc g = BoolFunc::make_ltf(n, {1, 1, 1, 1, 1}, -1);
    const auto gsat = brute_force_satisfying_set(g, n);
    const MassTable d = MassTable::uniform_over(gsat);

    const double eps = 0.1;
    int ok = 0;
    const int trials = 50;
    Rng rng(606);
    for (int t = 0; t < trials; ++t) {
        Rng local = rng.child(static_cast<std::uint64_t>(t));
        HalfspaceSqLearner learner(n, 0.005, 400);
        InstrumentedAnswer instrumented{exact_stat_answer(d, f)};
        StatAnswerFn fn = instrumented.fn();
        const LearnerSpec spec = learner.declared_spec(eps);
        const BoolFunc h = run_sq_learner(learner, spec, fn, eps, 0.1, local);
        CHECK(instrumented.min_tolerance_seen >= spec.min_tolerance);
        double err = 0.0;
        for (const auto& [x, px] : d.support())
            if (f.evaluate(x) != h.evaluate(x)) err += px;
        if (err <= eps) ++ok;
    }
    CHECK(ok >= 45);
}

TEST_CASE("all_conjunctions_up_to_width counts") {
    CHECK(all_conjunctions_up_to_width(3, 1).size() == 6);
    // n=4, k=2: 8 literals + C(4,2)*4 pairs
    CHECK(all_conjunctions_up_to_width(4, 2).size() == 8 + 24);
}
