#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "invgen/genct.hpp"
#include "invgen/mass_table.hpp"

using namespace invgen;

namespace {

Conjunction conj(std::initializer_list<int> lits) {
    Conjunction c;
    for (int sv : lits) c.literals.push_back(Literal::from_signed(sv));
    c.canonicalize();
    return c;
}

Ltf random_ltf(int n, int wmax, Rng& rng) {
    Ltf f;
    f.weights.resize(static_cast<std::size_t>(n));
    std::int64_t sum = 0;
    for (auto& wi : f.weights) {
        wi = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * wmax + 1))) - wmax;
        sum += std::llabs(wi);
    }
    f.theta = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * sum + 1))) - sum;
    return f;
}

Dnf random_dnf(int n, int terms, int min_width, int max_width, Rng& rng) {
    Dnf f;
    for (int t = 0; t < terms; ++t) {
        const int width =
            min_width + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_width - min_width + 1)));
        Conjunction c;
        std::set<int> vars;
        while (static_cast<int>(vars.size()) < width)
            vars.insert(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
        for (int v : vars) c.literals.push_back(Literal{v, rng.coin()});
        f.terms.push_back(std::move(c));
    }
    return f;
}

} // namespace

TEST_CASE("ltf_count_exact pins") {
    CHECK(ltf_count_exact(Ltf{{1, 1, 1}, 1}).value == doctest::Approx(0.5));
    // brute force over {0,1}^3 for w=(1,2,3), theta=6: only 111 reaches 6
    CHECK(ltf_count_exact(Ltf{{1, 2, 3}, 6}).value == doctest::Approx(1.0 / 8.0));
    CHECK(ltf_count_exact(Ltf{{0, 0, 0, 0}, 0}).value == doctest::Approx(1.0));
    CHECK(ltf_count_exact(Ltf{{1, 2, 3}, 6}).exact);
}

TEST_CASE("ltf_count_exact equals brute force on random instances") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 4 + static_cast<int>(rng.below(12));  // up to 15 here; the acceptance suite pushes to 18
        const Ltf f = random_ltf(n, 30, rng);
        const BoolFunc bf = BoolFunc::make_ltf(n, f.weights, f.theta);
        const double exact = static_cast<double>(brute_force_satisfying_count(bf, n)) /
                             std::ldexp(1.0, n);
        CHECK(ltf_count_exact(f).value == exact);
    }
}

TEST_CASE("ltf_sample_exact: uniformity and edge cases") {
    Rng rng(55);
    const Ltf maj{{1, 1, 1}, 1};
    const BottomSampler sampler = ltf_sample_exact(maj);
    std::map<std::string, int> freq;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) {
        auto x = sampler.generate(rng);
        REQUIRE(x);
        freq[x->to_string()]++;
    }
    CHECK(freq.size() == 4);
    for (const auto& [s, c] : freq)
        CHECK(std::fabs(static_cast<double>(c) / draws - 0.25) < 0.01);

    const BottomSampler unique = ltf_sample_exact(Ltf{{1, 1, 1}, 3});
    for (int i = 0; i < 10; ++i) CHECK(unique.generate(rng)->to_string() == "111");

    CHECK_THROWS_AS(ltf_sample_exact(Ltf{{1, 1, 1}, 4}), infeasible_error);
}

TEST_CASE("sampler reproducibility: same seed, same draws") {
    const Ltf f{{2, -3, 1, 4}, 1};
    const BottomSampler s = ltf_sample_exact(f);
    Rng r1(99), r2(99);
    for (int i = 0; i < 100; ++i) CHECK(s.generate(r1)->to_string() == s.generate(r2)->to_string());
}

TEST_CASE("dnf_count pins") {
    Rng rng(7);
    const Dnf single{{conj({1})}};
    const CountEstimate e = dnf_count(single, 4, 0.05, 0.05, rng);
    CHECK(std::fabs(e.value - 0.5) <= 0.5 * 0.06);

    const Dnf or2{{conj({1}), conj({2})}};
    const CountEstimate e2 = dnf_count(or2, 2, 0.05, 0.05, rng);
    CHECK(e2.value >= 0.75 / 1.06);
    CHECK(e2.value <= 0.75 * 1.06);

    CHECK_THROWS_AS(dnf_count(Dnf{}, 3, 0.1, 0.1, rng), invalid_input_error);
}

TEST_CASE("dnf_count meets its (eps,delta) contract empirically") {
    Rng rng(2024);
    const double eps = 0.05, delta = 0.05;
    int failures = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        Rng local = rng.child(static_cast<std::uint64_t>(t));
        const Dnf f = random_dnf(12, 4, 2, 5, local);
        const BoolFunc bf = BoolFunc::make_dnf(12, f.terms);
        const double exact =
            static_cast<double>(brute_force_satisfying_count(bf, 12)) / std::ldexp(1.0, 12);
        const CountEstimate e = dnf_count(f, 12, eps, delta, local);
        if (exact == 0.0) {
            if (e.value != 0.0) ++failures;
            continue;
        }
        const double ratio = e.value / exact;
        if (ratio < 1.0 / (1.0 + eps) || ratio > 1.0 + eps) ++failures;
    }
    CHECK(static_cast<double>(failures) / trials <= delta + 0.02);
}

TEST_CASE("dnf_sample: exact uniformity and acceptance rate") {
    Rng rng(33);
    // single width-3 term over n=10: uniform over 2^7 completions
    const Dnf one{{conj({1, -2, 3})}};
    const BottomSampler s1 = dnf_sample(one, 10, 0.01);
    for (int i = 0; i < 1000; ++i) {
        auto x = s1.generate(rng);
        REQUIRE(x);
        CHECK(one.evaluate(*x));
    }

    const Dnf or2{{conj({1}), conj({2})}};
    CHECK(dnf_min_index_acceptance(or2, 2) == doctest::Approx(0.75));
    const BottomSampler s2 = dnf_sample(or2, 2, 1e-6);
    std::map<std::string, int> freq;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
        auto x = s2.generate(rng);
        REQUIRE(x);
        freq[x->to_string()]++;
    }
    CHECK(freq.size() == 3);
    for (const auto& [str, c] : freq)
        CHECK(std::fabs(static_cast<double>(c) / draws - 1.0 / 3.0) < 0.01);

    Dnf raw;  // an internally contradictory term, built without canonicalization
    raw.terms.push_back(Conjunction{{Literal{1, true}, Literal{1, false}}});
    CHECK_THROWS_AS(dnf_sample(raw, 3, 0.1), infeasible_error);
}

TEST_CASE("make_forward_tools dispatch") {
    Rng rng(3);
    const ForwardTools ltf_tools = make_forward_tools(BoolFunc::make_ltf(3, {1, 1, 1}, 1));
    CHECK(ltf_tools.exact);
    CHECK(ltf_tools.count(0.1, 0.1, rng).value == doctest::Approx(0.5));

    Conjunction c = conj({1, -2});
    const ForwardTools conj_tools = make_forward_tools(BoolFunc::make_conjunction(4, c));
    CHECK_FALSE(conj_tools.exact);
    const BottomSampler cs = conj_tools.make_sampler(0.0, 0.01);
    for (int i = 0; i < 100; ++i) {
        auto x = cs.generate(rng);
        REQUIRE(x);
        CHECK(c.evaluate(*x));
    }

    CHECK_THROWS_AS(make_forward_tools(BoolFunc::make_const(4, false)), infeasible_error);

    const ForwardTools true_tools = make_forward_tools(BoolFunc::make_const(4, true));
    CHECK(true_tools.count(0.1, 0.1, rng).value == doctest::Approx(1.0));
}
