#include <catch2/catch_amalgamated.hpp>

#include "infosubs/fixtures.hpp"
#include "infosubs/value.hpp"

using namespace infosubs;
using Catch::Matchers::WithinAbs;

namespace {

InformationStructure random_structure(Rng& rng) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int ke = 2 + static_cast<int>(rng() % 2);
    std::vector<std::string> events;
    for (int e = 0; e < ke; ++e) events.push_back(std::to_string(e));
    std::vector<SignalSpec> signals;
    for (int i = 0; i < n; ++i)
        signals.push_back({"A" + std::to_string(i), {"0", "1"}});
    std::exponential_distribution<double> exp1(1.0);
    std::vector<PriorEntry> prior;
    double total = 0.0;
    for (int e = 0; e < ke; ++e)
        for (int mask = 0; mask < (1 << n); ++mask) {
            PriorEntry entry;
            entry.e = e;
            for (int i = 0; i < n; ++i) entry.a.push_back((mask >> i) & 1);
            entry.p = exp1(rng) + 1e-3;
            total += entry.p;
            prior.push_back(std::move(entry));
        }
    for (auto& entry : prior) entry.p /= total;
    // Renormalize exactly enough for validation.
    double sum = 0.0;
    for (const auto& entry : prior) sum += entry.p;
    prior.back().p += 1.0 - sum;
    return InformationStructure(events, signals, prior);
}

Partition random_partition(Rng& rng, int n) {
    std::vector<std::vector<int>> cells;
    for (int g = 0; g < n; ++g) {
        const int c = static_cast<int>(rng() % (cells.size() + 1));
        if (c == static_cast<int>(cells.size()))
            cells.push_back({g});
        else
            cells[c].push_back(g);
    }
    return Partition(n, cells);
}

}  // namespace

TEST_CASE("entropy values on canonical fixtures") {
    const ValueContext xo(fixtures::xor2(0.5), log_rule(2));
    REQUIRE_THAT(value_subset(xo, 0b00), WithinAbs(-1.0, 1e-12));
    REQUIRE_THAT(value_subset(xo, 0b01), WithinAbs(-1.0, 1e-12));
    REQUIRE_THAT(value_subset(xo, 0b10), WithinAbs(-1.0, 1e-12));
    REQUIRE_THAT(value_subset(xo, 0b11), WithinAbs(0.0, 1e-12));

    const ValueContext du(fixtures::dup2(), log_rule(2));
    REQUIRE_THAT(value_subset(du, 0b00), WithinAbs(-1.0, 1e-12));
    REQUIRE_THAT(value_subset(du, 0b01), WithinAbs(0.0, 1e-12));
}

TEST_CASE("kinked rule values on the or structure") {
    const ValueContext ctx(fixtures::or2(),
                           custom1d({{0.0, 0.0}, {0.75, 0.0}, {1.0, 0.25}}));
    REQUIRE_THAT(value_subset(ctx, 0b00), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(value_subset(ctx, 0b01), WithinAbs(0.125, 1e-12));
    REQUIRE_THAT(value_subset(ctx, 0b10), WithinAbs(0.125, 1e-12));
    REQUIRE_THAT(value_subset(ctx, 0b11), WithinAbs(0.1875, 1e-12));
}

TEST_CASE("monotonicity on the lattice") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = random_structure(rng);
        const ValueContext ctx(s, trial % 2 ? log_rule(s.num_events())
                                            : quadratic_rule(s.num_events()));
        const Partition p = random_partition(rng, s.support_size());
        const Partition q = random_partition(rng, s.support_size());
        const double vj = value_exact(ctx, join(p, q));
        REQUIRE(vj >= value_exact(ctx, p) - 1e-12);
        REQUIRE(vj >= value_exact(ctx, q) - 1e-12);
    }
}

TEST_CASE("marginals by both routes") {
    const ValueContext xo(fixtures::xor2(0.5), log_rule(2));
    const Partition bot = Partition::bottom(4);
    const Partition a1 = subset_signal(xo.structure, std::vector<int>{0});
    const Partition a2 = subset_signal(xo.structure, std::vector<int>{1});
    REQUIRE_THAT(marginal(xo, a1, a2), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(marginal(xo, bot, a2), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(marginal(xo, a1, bot), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(marginal_bregman(xo, bot, a1), WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(marginal_bregman(xo, a1, a2), WithinAbs(1.0, 1e-9));

    const ValueContext du(fixtures::dup2(), log_rule(2));
    const Partition b1 = subset_signal(du.structure, std::vector<int>{0});
    const Partition b2 = subset_signal(du.structure, std::vector<int>{1});
    REQUIRE_THAT(marginal(du, b1, b2), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(marginal_bregman(du, b1, b2), WithinAbs(0.0, 1e-9));
}

TEST_CASE("three-way agreement on random structures") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_structure(rng);
        std::vector<ExpectedScoreFunction> rules{log_rule(s.num_events()),
                                                 quadratic_rule(s.num_events())};
        for (const auto& g : rules) {
            const ValueContext ctx(s, g);
            const Partition a = random_partition(rng, s.support_size());
            const Partition b = random_partition(rng, s.support_size());
            REQUIRE_THAT(marginal(ctx, a, b),
                         WithinAbs(marginal_bregman(ctx, a, b), 1e-9));
            // Entropy route: V(p) = -E h(posterior).
            std::vector<double> terms;
            for (int c = 0; c < a.num_cells(); ++c) {
                const auto post = posterior(s, a, c);
                terms.push_back(post.cell_prob * -entropy(g, post.dist));
            }
            REQUIRE_THAT(value_exact(ctx, a), WithinAbs(pairwise_sum(terms), 1e-9));
        }
    }
}

TEST_CASE("garbling cannot help") {
    Rng rng(29);
    std::exponential_distribution<double> exp1(1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const auto s = random_structure(rng);
        const ValueContext ctx(s, log_rule(s.num_events()));
        const Partition a = random_partition(rng, s.support_size());
        const int cols = 1 + static_cast<int>(rng() % 3);
        std::vector<std::vector<double>> mat(a.num_cells(), std::vector<double>(cols));
        for (auto& row : mat) {
            double total = 0.0;
            for (double& x : row) total += (x = exp1(rng) + 1e-9);
            for (double& x : row) x /= total;
        }
        REQUIRE(value_garbled(ctx, Garbling(a, mat)) <= value_exact(ctx, a) + 1e-12);
    }
}

TEST_CASE("garbled values") {
    const ValueContext du(fixtures::dup2(), log_rule(2));
    const Partition a1 = subset_signal(du.structure, std::vector<int>{0});
    SECTION("identity garbling reproduces the exact value") {
        REQUIRE_THAT(value_garbled(du, Garbling::identity(a1)),
                     WithinAbs(value_exact(du, a1), 1e-12));
    }
    SECTION("one-outcome garbling is worthless") {
        const Garbling uninformative(a1, {{1.0}, {1.0}});
        REQUIRE_THAT(value_garbled(du, uninformative),
                     WithinAbs(value_subset(du, 0), 1e-12));
    }
    SECTION("binary symmetric channel") {
        // Flip probability 0.2: posterior entropy H(0.8) per outcome.
        const Garbling channel(a1, {{0.8, 0.2}, {0.2, 0.8}});
        const double h = -(0.8 * std::log2(0.8) + 0.2 * std::log2(0.2));
        REQUIRE_THAT(value_garbled(du, channel), WithinAbs(-h, 1e-12));
    }
    SECTION("joint with the other signal recovers everything") {
        const Garbling channel(a1, {{0.8, 0.2}, {0.2, 0.8}});
        const Partition a2 = subset_signal(du.structure, std::vector<int>{1});
        REQUIRE_THAT(value_garbled(du, channel, a2), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("sampled values") {
    SECTION("empty subset needs no samples") {
        const ValueContext ctx(fixtures::xor2(0.5), quadratic_rule(2));
        SamplingSpec spec;
        REQUIRE_THAT(value_sampled(ctx, {}, spec), WithinAbs(0.5, 1e-12));
    }
    SECTION("point-mass posteriors estimate exactly") {
        const ValueContext ctx(fixtures::xor2(0.5), quadratic_rule(2));
        SamplingSpec spec;
        spec.seed = 99;
        REQUIRE_THAT(value_sampled(ctx, {0, 1}, spec), WithinAbs(1.0, 0.05));
        const ValueContext du(fixtures::dup2(), quadratic_rule(2));
        REQUIRE_THAT(value_sampled(du, {0}, spec), WithinAbs(1.0, 0.05));
    }
    SECTION("soundness over repeated seeds") {
        const ValueContext ctx(fixtures::ci(0.55, {0.7, 0.8}), quadratic_rule(2));
        const double exact = value_subset(ctx, 0b01);
        int hits = 0;
        for (int seed = 0; seed < 200; ++seed) {
            SamplingSpec spec;
            spec.seed = seed;
            if (std::fabs(value_sampled(ctx, {0}, spec) - exact) <= 0.05) ++hits;
        }
        REQUIRE(hits >= 186);
    }
}

TEST_CASE("sampled decision values") {
    const DecisionProblem guess = guess_event_problem(2);
    SamplingSpec spec;
    spec.seed = 7;
    SECTION("perfect signal") {
        REQUIRE_THAT(value_sampled_decision(fixtures::dup2(), guess, {0}, spec),
                     WithinAbs(1.0, 0.05));
    }
    SECTION("no information, uniform prior") {
        REQUIRE_THAT(value_sampled_decision(fixtures::dup2(), guess, {}, spec),
                     WithinAbs(0.5, 0.05));
    }
    SECTION("pair problem with both signals") {
        REQUIRE_THAT(value_sampled_decision(fixtures::pair_structure(),
                                            pair_problem(0.1, true), {0, 1}, spec),
                     WithinAbs(2.1, 0.05));
    }
}
