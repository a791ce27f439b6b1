#include <catch2/catch_amalgamated.hpp>

#include "infosubs/fixtures.hpp"
#include "infosubs/info_model.hpp"

using namespace infosubs;

TEST_CASE("structure validation") {
    SECTION("prior must sum to one") {
        std::vector<PriorEntry> prior{{0, {0}, 0.5}};
        REQUIRE_THROWS_AS(InformationStructure({"0", "1"}, {{"A", {"0"}}}, prior),
                          InvalidInput);
    }
    SECTION("probabilities must be positive") {
        std::vector<PriorEntry> prior{{0, {0}, 1.0}, {1, {0}, 0.0}};
        REQUIRE_THROWS_AS(InformationStructure({"0", "1"}, {{"A", {"0"}}}, prior),
                          InvalidInput);
    }
    SECTION("duplicate entries rejected") {
        std::vector<PriorEntry> prior{{0, {0}, 0.5}, {0, {0}, 0.5}};
        REQUIRE_THROWS_AS(InformationStructure({"0", "1"}, {{"A", {"0"}}}, prior),
                          InvalidInput);
    }
    SECTION("support is lexicographic over signal tuples") {
        const auto s = fixtures::xor2(0.5);
        REQUIRE(s.support_size() == 4);
        REQUIRE(s.support()[0] == std::vector<int>{0, 0});
        REQUIRE(s.support()[3] == std::vector<int>{1, 1});
    }
}

TEST_CASE("partition canonicalization and validation") {
    const Partition p(4, {{2, 3}, {0, 1}});
    REQUIRE(p.cells()[0] == std::vector<int>{0, 1});
    REQUIRE(p.cell_of(3) == 1);
    REQUIRE_THROWS_AS(Partition(3, {{0, 1}}), InvalidInput);
    REQUIRE_THROWS_AS(Partition(3, {{0, 1}, {1, 2}}), InvalidInput);
    REQUIRE(Partition::bottom(4).num_cells() == 1);
    REQUIRE(Partition::top(4).num_cells() == 4);
}

TEST_CASE("lattice laws on small ground sets") {
    Rng rng(17);
    auto random_partition = [&](int n) {
        std::vector<std::vector<int>> cells;
        for (int g = 0; g < n; ++g) {
            const int c = static_cast<int>(rng() % (cells.size() + 1));
            if (c == static_cast<int>(cells.size()))
                cells.push_back({g});
            else
                cells[c].push_back(g);
        }
        return Partition(n, cells);
    };
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const Partition a = random_partition(n), b = random_partition(n);
        const Partition c = random_partition(n);
        REQUIRE(join(a, a) == a);
        REQUIRE(meet(a, a) == a);
        REQUIRE(join(a, b) == join(b, a));
        REQUIRE(meet(a, b) == meet(b, a));
        REQUIRE(join(a, join(b, c)) == join(join(a, b), c));
        REQUIRE(meet(a, meet(b, c)) == meet(meet(a, b), c));
        // Absorption.
        REQUIRE(join(a, meet(a, b)) == a);
        REQUIRE(meet(a, join(a, b)) == a);
        // Bounds.
        REQUIRE(join(a, Partition::top(n)) == Partition::top(n));
        REQUIRE(meet(a, Partition::bottom(n)) == Partition::bottom(n));
    }
}

TEST_CASE("subset signals join correctly") {
    const auto s = fixtures::ci(0.5, {0.8, 0.7, 0.6});
    const Partition a1 = subset_signal(s, std::vector<int>{0});
    const Partition a2 = subset_signal(s, std::vector<int>{1});
    const Partition both = subset_signal(s, std::vector<int>{0, 1});
    REQUIRE(join(a1, a2) == both);
    REQUIRE(subset_signal(s, std::uint64_t{0b11}) == both);
    REQUIRE(subset_signal(s, std::vector<int>{}) == Partition::bottom(s.support_size()));
}

TEST_CASE("bell numbers and coarsening enumeration") {
    REQUIRE(bell_number(0) == 1);
    REQUIRE(bell_number(3) == 5);
    REQUIRE(bell_number(5) == 52);
    REQUIRE(bell_number(8) == 4140);
    const auto coarsenings = enumerate_coarsenings(Partition::top(4));
    REQUIRE(coarsenings.size() == 15);  // Bell(4)
    bool saw_self = false, saw_bottom = false;
    for (const auto& p : coarsenings) {
        if (p == Partition::top(4)) saw_self = true;
        if (p == Partition::bottom(4)) saw_bottom = true;
    }
    REQUIRE(saw_self);
    REQUIRE(saw_bottom);
    REQUIRE_THROWS_AS(enumerate_coarsenings(Partition::top(13)), CapExceeded);
}

TEST_CASE("posteriors obey the law of total probability") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = fixtures::ci(0.3 + 0.4 * (trial % 5) / 4.0, {0.6, 0.9});
        const Partition p = subset_signal(s, std::uint64_t{1} << (trial % 2));
        std::vector<double> mixed(s.num_events(), 0.0);
        double total = 0.0;
        for (int c = 0; c < p.num_cells(); ++c) {
            const auto post = posterior(s, p, c);
            total += post.cell_prob;
            for (int e = 0; e < s.num_events(); ++e)
                mixed[e] += post.cell_prob * post.dist[e];
        }
        REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
        const auto prior = s.prior_on_event();
        for (int e = 0; e < s.num_events(); ++e)
            REQUIRE_THAT(mixed[e], Catch::Matchers::WithinAbs(prior[e], 1e-12));
    }
    (void)rng;
}

TEST_CASE("garbled joint tables") {
    const auto s = fixtures::dup2();
    const Partition a1 = subset_signal(s, std::vector<int>{0});
    SECTION("identity garbling reproduces the partition masses") {
        const auto table = garbled_joint(s, Garbling::identity(a1), Partition::bottom(2));
        for (int c = 0; c < a1.num_cells(); ++c) {
            const auto post = posterior(s, a1, c);
            double mass = 0.0;
            for (int e = 0; e < s.num_events(); ++e) mass += table.at(c, 0, e);
            REQUIRE_THAT(mass, Catch::Matchers::WithinAbs(post.cell_prob, 1e-12));
        }
    }
    SECTION("rows must be stochastic") {
        REQUIRE_THROWS_AS(Garbling(a1, {{0.5, 0.4}, {1.0, 0.0}}), InvalidInput);
    }
    SECTION("total mass is one") {
        const Garbling garb(a1, {{0.8, 0.2}, {0.3, 0.7}});
        const auto table = garbled_joint(s, garb, subset_signal(s, std::vector<int>{1}));
        double total = 0.0;
        for (int o = 0; o < table.num_outcomes; ++o)
            for (int c = 0; c < table.num_b_cells; ++c)
                for (int e = 0; e < table.num_events; ++e) total += table.at(o, c, e);
        REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("distinguishability") {
    REQUIRE(is_distinguishable(fixtures::xor2(0.6)).distinguishable);
    REQUIRE(is_distinguishable(fixtures::ci(0.5, {0.8, 0.7})).distinguishable);
    const auto res = is_distinguishable(fixtures::xor2(0.5));
    REQUIRE_FALSE(res.distinguishable);  // single signals are pure noise
    REQUIRE_FALSE(res.subset.empty());
}

TEST_CASE("fixtures parse by name") {
    REQUIRE(fixtures::by_name("dup2").num_signals() == 2);
    REQUIRE(fixtures::by_name("xor2?q=0.6").support_size() == 4);
    REQUIRE(fixtures::by_name("ci?r=0.5,s=0.9,s=0.6,s=0.7").num_signals() == 3);
    REQUIRE(fixtures::by_name("dice").signals()[0].outcomes.size() == 6);
    REQUIRE(fixtures::by_name("pair").num_events() == 4);
    REQUIRE_THROWS_AS(fixtures::by_name("nope"), InvalidInput);
}
