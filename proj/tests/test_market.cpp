#include <catch2/catch_amalgamated.hpp>

#include "infosubs/market.hpp"

using namespace infosubs;
using Catch::Matchers::WithinAbs;

namespace {

MarketGame two_trader_game(InformationStructure s, ExpectedScoreFunction g,
                           std::vector<int> order) {
    return MarketGame(ValueContext(std::move(s), std::move(g)), {{0}, {1}},
                      std::move(order));
}

}  // namespace

TEST_CASE("game validation") {
    REQUIRE_THROWS_AS(two_trader_game(fixtures::dup2(), log_rule(2), {0, 0}),
                      InvalidInput);
    REQUIRE_THROWS_AS(two_trader_game(fixtures::dup2(), log_rule(2), {0}),
                      InvalidInput);
    // A piecewise-linear rule is proper but not strictly proper.
    REQUIRE_THROWS_AS(
        two_trader_game(fixtures::dup2(), revelation(guess_event_problem(2)), {0, 1}),
        InvalidInput);
    // Duplicated signals are trivial given each other.
    REQUIRE_THROWS_AS(two_trader_game(fixtures::dup2(), log_rule(2), {0, 1}),
                      InvalidInput);
    REQUIRE_NOTHROW(two_trader_game(fixtures::ci2(0.5, 0.8), log_rule(2), {0, 1}));
}

TEST_CASE("market runs") {
    const auto game = two_trader_game(fixtures::ci2(0.5, 0.8), log_rule(2), {0, 1});
    const auto profile = StrategyProfile::uniform(2, ReportRule::truthful());
    SECTION("prices follow posteriors and payoffs telescope") {
        for (const auto& entry : game.ctx.structure.prior()) {
            const auto run = run_market(game, profile, entry);
            REQUIRE(run.prices.size() == 3);
            const double total =
                game.ctx.g.score(run.prices.back(), entry.e) -
                game.ctx.g.score(run.prices.front(), entry.e);
            double paid = 0.0;
            for (double p : run.payoffs) paid += p;
            REQUIRE_THAT(paid, WithinAbs(total, 1e-12));
        }
    }
    SECTION("all silent leaves prices at the prior") {
        const auto silent = StrategyProfile::uniform(2, ReportRule::silent());
        const auto run = run_market(game, silent, game.ctx.structure.prior().front());
        REQUIRE(run.prices.front() == run.prices.back());
        for (double p : run.payoffs) REQUIRE(p == 0.0);
    }
    SECTION("out-of-support realizations are rejected") {
        PriorEntry fake{0, {2, 0}, 1.0};
        REQUIRE_THROWS_AS(run_market(game, profile, fake), InvalidInput);
    }
}

TEST_CASE("expected payoffs match value differences") {
    SECTION("conditionally independent signals") {
        const auto game = two_trader_game(fixtures::ci2(0.5, 0.8), log_rule(2), {0, 1});
        const auto pay =
            expected_payoffs(game, StrategyProfile::uniform(2, ReportRule::truthful()));
        REQUIRE(pay.finite);
        const auto& ctx = game.ctx;
        REQUIRE_THAT(pay.payoffs[0],
                     WithinAbs(value_subset(ctx, 0b01) - value_subset(ctx, 0b00), 1e-9));
        REQUIRE_THAT(pay.payoffs[1],
                     WithinAbs(value_subset(ctx, 0b11) - value_subset(ctx, 0b01), 1e-9));
    }
    SECTION("xor bits: first mover earns nothing") {
        const auto game = two_trader_game(fixtures::xor2(0.5), log_rule(2), {0, 1});
        const auto pay =
            expected_payoffs(game, StrategyProfile::uniform(2, ReportRule::truthful()));
        REQUIRE_THAT(pay.payoffs[0], WithinAbs(0.0, 1e-9));
        REQUIRE_THAT(pay.payoffs[1], WithinAbs(1.0, 1e-9));
    }
    SECTION("zero-sum given full revelation") {
        const auto game =
            two_trader_game(fixtures::xor2(0.6), log_rule(2), {0, 1, 0});
        for (const auto& profile :
             {all_rush_profile(game), all_delay_profile(game)}) {
            const auto pay = expected_payoffs(game, profile);
            double total = 0.0;
            for (double p : pay.payoffs) total += p;
            const auto& ctx = game.ctx;
            REQUIRE_THAT(total,
                         WithinAbs(value_subset(ctx, 0b11) - value_subset(ctx, 0b00), 1e-9));
        }
    }
    SECTION("garbled reports average over outcomes") {
        const auto game = two_trader_game(fixtures::ci2(0.5, 0.8), log_rule(2), {0, 1});
        const Partition own = game.trader_partition(0);
        StrategyProfile profile = StrategyProfile::uniform(2, ReportRule::truthful());
        profile.slots[0] = ReportRule::garbled(Garbling(own, {{0.9, 0.1}, {0.1, 0.9}}));
        const auto pay = expected_payoffs(game, profile);
        REQUIRE(pay.finite);
        const auto truthful =
            expected_payoffs(game, StrategyProfile::uniform(2, ReportRule::truthful()));
        REQUIRE(pay.payoffs[0] < truthful.payoffs[0]);  // garbling loses information rent
    }
}

TEST_CASE("profile syntax checks") {
    const auto game = two_trader_game(fixtures::xor2(0.6), log_rule(2), {0, 1, 0});
    SECTION("canonical profiles") {
        REQUIRE(is_all_rush(game, all_rush_profile(game)));
        REQUIRE_FALSE(is_all_delay(game, all_rush_profile(game)));
        REQUIRE(is_all_delay(game, all_delay_profile(game)));
        REQUIRE_FALSE(is_all_rush(game, all_delay_profile(game)));
    }
    SECTION("all silent is neither") {
        const auto silent = StrategyProfile::uniform(3, ReportRule::silent());
        REQUIRE_FALSE(is_all_rush(game, silent));
        REQUIRE_FALSE(is_all_delay(game, silent));
    }
    SECTION("delayed truthful at the last own slot") {
        StrategyProfile p = StrategyProfile::uniform(3, ReportRule::silent());
        p.slots[1] = ReportRule::truthful();
        p.slots[2] = ReportRule::truthful();
        REQUIRE(is_all_delay(game, p));
    }
}

TEST_CASE("final-slot truthfulness dominates") {
    const std::vector<MarketGame> games{
        two_trader_game(fixtures::ci2(0.5, 0.8), log_rule(2), {0, 1, 0}),
        two_trader_game(fixtures::xor2(0.6), log_rule(2), {0, 1, 0}),
    };
    for (const auto& game : games) {
        for (const auto& profile : {all_rush_profile(game), all_delay_profile(game),
                                    StrategyProfile::uniform(3, ReportRule::silent())}) {
            std::vector<int> last(game.traders.size(), -1);
            for (int t = 0; t < game.num_slots(); ++t) last[game.order[t]] = t;
            for (int i = 0; i < game.num_traders(); ++i) {
                StrategyProfile truthier = profile;
                truthier.slots[last[i]] = ReportRule::truthful();
                REQUIRE(expected_payoffs(game, truthier).payoffs[i] >=
                        expected_payoffs(game, profile).payoffs[i] - 1e-9);
            }
        }
    }
}

TEST_CASE("equilibrium verification") {
    SECTION("substitutes: rush verified, delay rejected") {
        const auto game = two_trader_game(fixtures::ci2(0.5, 0.8), log_rule(2), {0, 1, 0});
        const auto rush = verify_equilibrium(game, all_rush_profile(game), 20, 5);
        REQUIRE(rush.verified);
        const auto delay = verify_equilibrium(game, all_delay_profile(game), 20, 5);
        REQUIRE_FALSE(delay.verified);
    }
    SECTION("complements: delay verified, rush rejected") {
        const auto game = two_trader_game(fixtures::xor2(0.6), log_rule(2), {0, 1, 0});
        const auto delay = verify_equilibrium(game, all_delay_profile(game), 20, 5);
        REQUIRE(delay.verified);
        const auto rush = verify_equilibrium(game, all_rush_profile(game), 20, 5);
        REQUIRE_FALSE(rush.verified);
        // Trader 0's withholding gain matches the value-function identity.
        const auto& ctx = game.ctx;
        const double gain = (value_subset(ctx, 0b11) - value_subset(ctx, 0b01)) -
                            (value_subset(ctx, 0b10) - value_subset(ctx, 0b00));
        REQUIRE(gain > 1e-9);
        REQUIRE_THAT(rush.margins[0], WithinAbs(-gain, 1e-9));
    }
}

TEST_CASE("rush and delay refutations") {
    SECTION("complements refute rushing") {
        const ValueContext ctx(fixtures::xor2(0.6), log_rule(2));
        const auto w = rush_refutation(ctx);
        REQUIRE(w.status == "witness");
        REQUIRE(w.alice_gain > 1e-9);
        REQUIRE_THAT(w.alice_gain, WithinAbs(w.rhs - w.lhs, 1e-12));
    }
    SECTION("substitutes do not refute rushing") {
        const ValueContext ctx(fixtures::ci2(0.5, 0.8), log_rule(2));
        REQUIRE(rush_refutation(ctx).status == "none");
    }
    SECTION("paired structure refutes rushing via a component coarsening") {
        const ValueContext ctx(fixtures::pair_structure(),
                               revelation(pair_problem(0.1, true)));
        const auto w = rush_refutation(ctx);
        REQUIRE(w.status == "witness");
        REQUIRE(w.a_prime.has_value());
    }
    SECTION("substitutes refute delaying") {
        const ValueContext ctx(fixtures::ci2(0.5, 0.8), log_rule(2));
        const auto w = delay_refutation(ctx);
        REQUIRE(w.status == "witness");
        REQUIRE(w.lhs > w.rhs + 1e-9);
    }
    SECTION("complements do not refute delaying") {
        const ValueContext ctx(fixtures::xor2(0.6), log_rule(2));
        REQUIRE(delay_refutation(ctx).status == "none");
    }
    SECTION("indistinguishable structures are skipped") {
        const ValueContext ctx(fixtures::xor2(0.5), log_rule(2));
        REQUIRE(delay_refutation(ctx).status == "precondition-failed");
    }
}
