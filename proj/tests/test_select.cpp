#include <catch2/catch_amalgamated.hpp>

#include "infosubs/select.hpp"

using namespace infosubs;
using Catch::Matchers::WithinAbs;

TEST_CASE("brute force selection") {
    const ValueContext du(fixtures::dup2(), log_rule(2));
    const auto best = brute_force_select(du, Constraint{Cardinality{1}});
    REQUIRE(best.mask == 0b01);
    REQUIRE_THAT(best.value, WithinAbs(0.0, 1e-12));

    const ValueContext xo(fixtures::xor2(0.5), log_rule(2));
    const auto tie = brute_force_select(xo, Constraint{Cardinality{1}});
    REQUIRE(tie.mask == 0b01);  // singletons tie at -1, lexicographic tie-break
    REQUIRE_THAT(tie.value, WithinAbs(-1.0, 1e-12));

    const ValueContext ci(fixtures::ci2(0.5, 0.8), log_rule(2));
    const auto fam = brute_force_select(
        ci, Constraint{ExplicitFamily{{0b01, 0b10}}});
    REQUIRE(fam.mask == 0b01);  // symmetric, lexicographic tie-break

    REQUIRE_THROWS_AS(brute_force_select(ci, Constraint{Cardinality{5}}), InvalidInput);
}

TEST_CASE("greedy matches naive greedy bit for bit") {
    Rng rng(13);
    std::uniform_real_distribution<double> unif(0.55, 0.95);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        std::vector<double> acc(n);
        for (double& a : acc) a = unif(rng);
        const ValueContext ctx(fixtures::ci(unif(rng) - 0.25, acc), log_rule(2));
        const SetFunction f = make_value_oracle(ctx);
        const int k = 1 + static_cast<int>(rng() % n);
        REQUIRE(greedy_select(f, n, k).mask == naive_greedy_select(f, n, k).mask);
    }
}

TEST_CASE("greedy picks the most accurate signal first") {
    const ValueContext ctx(fixtures::ci(0.5, {0.9, 0.8, 0.7}), log_rule(2));
    const auto res = greedy_select(make_value_oracle(ctx), 3, 2);
    REQUIRE((res.mask & 0b001) != 0);
}

TEST_CASE("greedy ratio bound on substitutes instances") {
    Rng rng(101);
    std::uniform_real_distribution<double> unif(0.55, 0.95);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        std::vector<double> acc(n);
        for (double& a : acc) a = unif(rng);
        const ValueContext ctx(fixtures::ci(0.5, acc), log_rule(2));
        const int k = 1 + static_cast<int>(rng() % std::min(n, 4));
        const auto greedy = greedy_select(make_value_oracle(ctx), n, k);
        const auto opt = brute_force_select(ctx, Constraint{Cardinality{k}});
        const double base = value_subset(ctx, 0);
        const double bound = 1.0 - std::pow(1.0 - 1.0 / k, k);
        REQUIRE(greedy.value - base >= bound * (opt.value - base) - 1e-9);
    }
}

TEST_CASE("knapsack selection") {
    const ValueContext ctx(fixtures::ci(0.5, {0.9, 0.8, 0.7}), log_rule(2));
    const SetFunction f = make_value_oracle(ctx);
    SECTION("unit costs reduce to cardinality") {
        const auto kn = knapsack_select(f, 3, {1, 1, 1}, 2);
        const auto gr = greedy_select(f, 3, 2);
        REQUIRE(kn.value >= gr.value - 1e-12);
    }
    SECTION("zero budget selects nothing") {
        REQUIRE(knapsack_select(f, 3, {1, 1, 1}, 0).mask == 0);
    }
    SECTION("ratio bound against brute force") {
        const std::vector<double> costs{1, 1, 3};
        const auto kn = knapsack_select(f, 3, costs, 3);
        const auto opt = brute_force_select(ctx, Constraint{Knapsack{costs, 3}});
        const double base = value_subset(ctx, 0);
        REQUIRE(kn.value - base >= 0.316 * (opt.value - base) - 1e-9);
    }
    SECTION("partial enumeration never does worse") {
        const std::vector<double> costs{2, 1, 2};
        const auto plain = knapsack_select(f, 3, costs, 3);
        const auto seeded = knapsack_select(f, 3, costs, 3, true);
        REQUIRE(seeded.value >= plain.value - 1e-12);
    }
}

TEST_CASE("adaptive greedy") {
    const DecisionProblem guess = guess_event_problem(2);
    SECTION("perfect signal gives utility one") {
        const auto s = fixtures::dup2();
        for (const auto& entry : s.prior()) {
            const auto run = adaptive_greedy(s, guess, 1, entry);
            REQUIRE(run.sequence == std::vector<int>{0});
            REQUIRE_THAT(run.utility, WithinAbs(1.0, 1e-12));
        }
    }
    SECTION("picks the more accurate signal") {
        const auto s = fixtures::ci(0.5, {0.9, 0.6});
        REQUIRE(adaptive_greedy(s, guess, 1, s.prior().front()).sequence ==
                std::vector<int>{0});
        REQUIRE_THAT(adaptive_greedy_expected(s, guess, 1), WithinAbs(0.9, 1e-12));
    }
    SECTION("observing everything matches the full-information value") {
        const auto s = fixtures::ci(0.5, {0.8, 0.7});
        const ValueContext ctx(s, revelation(guess));
        REQUIRE_THAT(adaptive_greedy_expected(s, guess, 2),
                     WithinAbs(value_subset(ctx, 0b11), 1e-9));
    }
}

TEST_CASE("optimal adaptive policy") {
    const DecisionProblem guess = guess_event_problem(2);
    const auto s = fixtures::ci(0.5, {0.8, 0.7});
    const ValueContext ctx(s, revelation(guess));
    REQUIRE_THAT(brute_force_policy(s, guess, 0), WithinAbs(value_subset(ctx, 0), 1e-12));
    REQUIRE_THAT(brute_force_policy(s, guess, 2), WithinAbs(value_subset(ctx, 0b11), 1e-9));
    REQUIRE_THAT(brute_force_policy(fixtures::dup2(), guess, 1), WithinAbs(1.0, 1e-12));
    // Greedy is within the adaptive bound.
    REQUIRE(adaptive_greedy_expected(s, guess, 1) >=
            0.5 * brute_force_policy(s, guess, 1) - 1e-9);
}

TEST_CASE("set-function reduction") {
    SECTION("modular example") {
        const SetFunction card = [](std::uint64_t s) {
            return static_cast<double>(std::popcount(s));
        };
        const auto inst = reduce_from_set_function(card, 3);
        REQUIRE(inst.F({0.5, 0.5, 0.5}) == 0.0);
        REQUIRE(inst.value(0b011) == 2.0);
    }
    SECTION("boolean or example") {
        const SetFunction f = [](std::uint64_t s) { return s ? 1.0 : 0.0; };
        const auto inst = reduce_from_set_function(f, 2);
        REQUIRE(inst.value(0b00) == 0.0);
        REQUIRE(inst.value(0b01) == 1.0);
        REQUIRE(inst.value(0b10) == 1.0);
        REQUIRE(inst.value(0b11) == 1.0);
    }
    SECTION("off-face reports score minus infinity") {
        const SetFunction card = [](std::uint64_t s) {
            return static_cast<double>(std::popcount(s));
        };
        const auto inst = reduce_from_set_function(card, 2);
        REQUIRE(inst.score({1.0, 0.5}, 0b01) == 1.0);
        REQUIRE(inst.score({1.0, 0.5}, 0b00) == neg_inf());
    }
    SECTION("exact equality for random monotone functions") {
        Rng rng(55);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 4);
            // Random coverage function: monotone and submodular.
            std::vector<std::uint64_t> covers(n);
            for (auto& c : covers) c = rng() % 1024;
            const SetFunction f = [covers](std::uint64_t s) {
                std::uint64_t covered = 0;
                for (std::size_t i = 0; i < covers.size(); ++i)
                    if (s & (1ull << i)) covered |= covers[i];
                return static_cast<double>(std::popcount(covered));
            };
            const auto inst = reduce_from_set_function(f, n);
            for (std::uint64_t s = 0; s < (1ull << n); ++s)
                REQUIRE(inst.value(s) == f(s));
            REQUIRE(is_submodular_setfn(inst.value_oracle(), n));
        }
    }
    SECTION("non-monotone functions are rejected") {
        const SetFunction bad = [](std::uint64_t s) {
            return s == 0b01 ? 1.0 : 0.0;
        };
        REQUIRE_THROWS_AS(reduce_from_set_function(bad, 2), InvalidInput);
    }
}

TEST_CASE("supermodular hardness instances") {
    const auto oracle = supermodular_hardness_instance(12, 4, 3);
    REQUIRE(oracle(oracle.planted()) == 0.5);
    std::uint64_t big = oracle.planted() | 0b111111;
    REQUIRE(oracle(big) == static_cast<double>(std::popcount(big) - 4));
    REQUIRE(oracle.queries() == 2);

    int hits = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const auto inst = supermodular_hardness_instance(12, 4, seed);
        const auto res = greedy_select(inst.as_function(), 12, 4);
        if (res.value > 0.0) ++hits;
    }
    REQUIRE(hits <= 5);  // planted set found only by luck
}
