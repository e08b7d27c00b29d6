#include <doctest.h>

#include "test_util.hpp"

#include "invgen/densify.hpp"

using namespace invgen;
using namespace testutil;

namespace {

Ltf random_small_ltf(int n, int wmax, Rng& rng) {
    Ltf f;
    f.weights.resize(static_cast<std::size_t>(n));
    std::int64_t sum = 0;
    for (auto& wi : f.weights) {
        wi = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * wmax + 1))) - wmax;
        sum += std::llabs(wi);
    }
    f.theta = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(sum + 1)));
    return f;
}

} // namespace

TEST_CASE("consistent_ltf basics") {
    ConstraintSet empty;
    const Ltf trivial = consistent_ltf(empty, 4);
    CHECK(trivial.theta == 0);
    for (auto w : trivial.weights) CHECK(w == 0);
    // Constant-true under the w.x >= theta convention.
    CHECK(trivial.evaluate(Assignment::from_string("0000")));

    ConstraintSet majority_pos;
    majority_pos.add_positive(Assignment::from_string("110"));
    majority_pos.add_positive(Assignment::from_string("101"));
    majority_pos.add_positive(Assignment::from_string("011"));
    const Ltf h = consistent_ltf(majority_pos, 3);
    CHECK(h.evaluate(Assignment::from_string("110")));
    CHECK(h.evaluate(Assignment::from_string("101")));
    CHECK(h.evaluate(Assignment::from_string("011")));

    ConstraintSet contradictory;
    contradictory.add_positive(Assignment::from_string("10"));
    contradictory.add_negative(Assignment::from_string("10"));
    CHECK_THROWS_AS(consistent_ltf(contradictory, 2), infeasible_error);
}

TEST_CASE("consistent_ltf separates random labelings of random halfspaces") {
    Rng rng(314);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + static_cast<int>(rng.below(6));
        const Ltf target = random_small_ltf(n, 8, rng);
        ConstraintSet cs;
        for (int i = 0; i < 40; ++i) {
            const Assignment x = Assignment::from_index(rng.below(1ULL << n), n);
            if (target.evaluate(x)) cs.add_positive(x);
            else cs.add_negative(x);
        }
        const Ltf h = consistent_ltf(cs, n);
        for (const Assignment& x : cs.positives) CHECK(h.evaluate(x));
        for (const Assignment& x : cs.negatives) CHECK_FALSE(h.evaluate(x));
    }
}

TEST_CASE("online loop with truthful counterexamples identifies the target") {
    // The online learner behind the densifier: feed it one mistake at a time,
    // always truthfully labeled; it must converge to the target exactly.
    Rng rng(271);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4 + static_cast<int>(rng.below(4));
        const Ltf target = random_small_ltf(n, 5, rng);
        ConstraintSet cs;
        Ltf h = consistent_ltf(cs, n);
        int rounds = 0;
        const int cap = 4 * n * n * 8;
        for (; rounds < cap; ++rounds) {
            bool mistake = false;
            for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
                const Assignment x = Assignment::from_index(idx, n);
                if (h.evaluate(x) != target.evaluate(x)) {
                    if (target.evaluate(x)) cs.add_positive(x);
                    else cs.add_negative(x);
                    h = consistent_ltf(cs, n);
                    mistake = true;
                    break;
                }
            }
            if (!mistake) break;
        }
        for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
            const Assignment x = Assignment::from_index(idx, n);
            CHECK(h.evaluate(x) == target.evaluate(x));
        }
    }
}

TEST_CASE("densifier params pin the analysis constants") {
    const DensifierParams ltf = DensifierParams::for_ltf(12, 0.1, 0.1, 0.25);
    CHECK(ltf.n_plus ==
          static_cast<std::uint64_t>(std::ceil((2.0 / 0.1) * (144.0 + std::log(10.0)))));
    CHECK(ltf.m_cap == static_cast<std::uint64_t>(std::ceil(4.0 * 144.0 * std::log(12.0))));
    CHECK(ltf.gamma == doctest::Approx(0.1 / (16.0 * static_cast<double>(ltf.m_cap))));
    // gamma = delta/(16 M): with M = 16 the value is delta/256.
    CHECK(0.1 / (16.0 * 16.0) == doctest::Approx(0.1 / 256.0));

    const DensifierParams dnf16 = DensifierParams::for_dnf(16, 2, 0.1, 0.1, 0.25);
    CHECK(dnf16.r == 8);  // 2 log2(16)
    CHECK(dnf16.gamma == doctest::Approx(1.0 / (2.0 * static_cast<double>(dnf16.m_cap))));
}

TEST_CASE("densify_ltf: majority-of-3 satisfies (a) and (b) by enumeration") {
    const int n = 3;
    const BoolFunc f = BoolFunc::make_ltf(n, {1, 1, 1}, 1);
    const auto fsat = brute_force_satisfying_set(f, n);
    const BottomSampler pos = table_sampler(fsat);

    Rng rng(161);
    DensifierParams params = DensifierParams::for_ltf(n, 0.1, 0.1, 0.5);
    const Ltf g =
        densify_ltf(pos, params, n, exact_ltf_counter(), exact_ltf_sampler_factory(), rng);

    std::uint64_t g_count = 0, fg_count = 0;
    for (std::uint64_t idx = 0; idx < 8; ++idx) {
        const Assignment x = Assignment::from_index(idx, n);
        const bool gx = g.evaluate(x);
        if (gx) ++g_count;
        if (gx && f.evaluate(x)) ++fg_count;
    }
    // (a): coverage of f's satisfying set; (b): density of f inside g.
    CHECK(static_cast<double>(fg_count) / static_cast<double>(fsat.size()) >=
          1.0 - params.epsilon);
    CHECK(static_cast<double>(fg_count) / static_cast<double>(g_count) >= params.gamma);
}

TEST_CASE("densify_ltf hits a desk-scale density target on random instances") {
    Rng rng(51);
    int cond_a = 0, cond_b = 0, runs = 0, failures = 0;
    const int total = 20;
    for (int t = 0; t < total; ++t) {
        Rng local = rng.child(static_cast<std::uint64_t>(t));
        const int n = 6 + static_cast<int>(local.below(4));
        Ltf target = random_small_ltf(n, 10, local);
        const BoolFunc f = BoolFunc::make_ltf(n, target.weights, target.theta);
        const auto fsat = brute_force_satisfying_set(f, n);
        if (fsat.empty()) continue;
        const double p = static_cast<double>(fsat.size()) / std::ldexp(1.0, n);
        const BottomSampler pos = table_sampler(fsat);

        DensifierParams params = DensifierParams::for_ltf(n, 0.1, 0.1, p);
        params.gamma = std::max(params.gamma, 1.0 / 16.0);
        ++runs;
        Ltf g;
        try {
            g = densify_ltf(pos, params, n, exact_ltf_counter(), exact_ltf_sampler_factory(),
                            local);
        } catch (const algorithm_failure&) {
            ++failures;  // mislabeled counterexample; a bounded-probability event
            continue;
        }
        std::uint64_t g_count = 0, fg_count = 0;
        for (std::uint64_t idx = 0; idx < (1ULL << n); ++idx) {
            const Assignment x = Assignment::from_index(idx, n);
            if (g.evaluate(x)) {
                ++g_count;
                if (f.evaluate(x)) ++fg_count;
            }
        }
        const double coverage = static_cast<double>(fg_count) / static_cast<double>(fsat.size());
        const double density = static_cast<double>(fg_count) / static_cast<double>(g_count);
        if (coverage >= 1.0 - params.epsilon) ++cond_a;
        if (density >= params.gamma) ++cond_b;
    }
    REQUIRE(runs > 0);
    CHECK(cond_a + failures >= runs - runs / 5);
    CHECK(cond_b + failures >= runs - runs / 5);
}

TEST_CASE("densify_dnf: planted term recovery and the mass filter") {
    const int n = 10;
    Conjunction planted;
    planted.literals = {Literal{2, true}, Literal{5, false}, Literal{7, true}};
    const BoolFunc f = BoolFunc::make_dnf(n, {planted});
    const auto fsat = brute_force_satisfying_set(f, n);
    const double p = static_cast<double>(fsat.size()) / std::ldexp(1.0, n);
    const BottomSampler pos = table_sampler(fsat);

    Rng rng(404);
    int found = 0;
    const int trials = 30;
    for (int t = 0; t < trials; ++t) {
        Rng local = rng.child(static_cast<std::uint64_t>(t));
        DensifierParams params = DensifierParams::for_dnf(n, 1, 0.1, 0.1, p, {}, 2000);
        const auto terms = densify_dnf(pos, params, n, 1, local);
        bool hit = false;
        for (const Conjunction& c : terms) {
            CHECK(std::ldexp(1.0, -c.width()) <= p + 1e-12);  // filter rule
            if (c == planted) hit = true;
        }
        if (hit) ++found;
    }
    CHECK(found >= trials - 3);
}

TEST_CASE("densify_dnf: candidates with mass above p_hat are excluded") {
    const int n = 8;
    Conjunction term;
    term.literals = {Literal{1, true}};
    const BoolFunc f = BoolFunc::make_dnf(n, {term});
    const auto fsat = brute_force_satisfying_set(f, n);
    const BottomSampler pos = table_sampler(fsat);

    Rng rng(7);
    DensifierParams params = DensifierParams::for_dnf(n, 1, 0.1, 0.1, 0.25, {}, 500);
    const auto terms = densify_dnf(pos, params, n, 1, rng);
    for (const Conjunction& c : terms) CHECK(std::ldexp(1.0, -c.width()) <= 0.25);
}

TEST_CASE("densify_kdnf") {
    const KdnfDensifier d2 = densify_kdnf(6, 2);
    CHECK(d2.g.is_const_true());
    CHECK(d2.gamma == doctest::Approx(0.25));
    CHECK(densify_kdnf(6, 1).gamma == doctest::Approx(0.5));

    // Any satisfiable k-DNF has mass >= 2^-k.
    Rng rng(99);
    for (int t = 0; t < 20; ++t) {
        const int n = 6 + static_cast<int>(rng.below(5));
        const int k = 1 + static_cast<int>(rng.below(3));
        Dnf f;
        for (int term = 0; term < 3; ++term) {
            Conjunction c;
            std::set<int> vars;
            const int w = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
            while (static_cast<int>(vars.size()) < w)
                vars.insert(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
            for (int v : vars) c.literals.push_back(Literal{v, rng.coin()});
            f.terms.push_back(std::move(c));
        }
        const BoolFunc bf = BoolFunc::make_dnf(n, f.terms);
        const double mass =
            static_cast<double>(brute_force_satisfying_count(bf, n)) / std::ldexp(1.0, n);
        CHECK(mass >= std::ldexp(1.0, -k) - 1e-12);
    }
}
