#pragma once

// Finite market-scoring-rule games: exact replay, exact expected payoffs,
// syntactic all-rush / all-delay recognition, deviation checking within
// enumerable classes, and the rush/delay refutation searches.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "infosubs/classify.hpp"
#include "infosubs/value.hpp"

namespace infosubs {

struct MarketGame {
    ValueContext ctx;
    std::vector<std::vector<int>> traders;  // signal indices held by each trader
    std::vector<int> order;                 // trader id per trading slot

    MarketGame(ValueContext c, std::vector<std::vector<int>> t, std::vector<int> o)
        : ctx(std::move(c)), traders(std::move(t)), order(std::move(o)) {
        validate();
    }

    int num_traders() const { return static_cast<int>(traders.size()); }
    int num_slots() const { return static_cast<int>(order.size()); }

    Partition trader_partition(int i) const {
        return subset_signal(ctx.structure, traders[i]);
    }

  private:
    void validate() const {
        if (order.empty()) throw InvalidInput("market: empty order");
        std::vector<bool> seen(traders.size(), false);
        for (std::size_t t = 0; t < order.size(); ++t) {
            if (order[t] < 0 || order[t] >= num_traders())
                throw InvalidInput("market: trader id out of range");
            if (t > 0 && order[t] == order[t - 1])
                throw InvalidInput("market: trader participates twice in a row");
            seen[order[t]] = true;
        }
        for (bool s : seen)
            if (!s) throw InvalidInput("market: trader never trades");
        for (const auto& subset : traders)
            for (int i : subset)
                if (i < 0 || i >= ctx.structure.num_signals())
                    throw InvalidInput("market: signal index out of range");
        probe_strict_properness();
        check_nontrivial();
    }

    // Strictly proper rule: misreporting must strictly lose in expectation.
    void probe_strict_properness() const {
        Rng rng(0x9a11e7ULL);
        std::exponential_distribution<double> exp1(1.0);
        const int k = ctx.g.num_events();
        auto sample = [&] {
            std::vector<double> q(k);
            double total = 0.0;
            for (double& x : q) total += (x = exp1(rng) + 1e-6);
            for (double& x : q) x /= total;
            return q;
        };
        for (int it = 0; it < 100; ++it) {
            const auto p = sample(), q = sample();
            if (expected_score(ctx.g, p, p) <= expected_score(ctx.g, q, p) + kProbTol)
                throw InvalidInput("market: scoring rule is not strictly proper (" +
                                   ctx.g.kind() + ")");
        }
    }

    // Each trader must add information beyond the other traders combined.
    void check_nontrivial() const {
        const auto& s = ctx.structure;
        std::vector<int> all;
        for (const auto& subset : traders) all.insert(all.end(), subset.begin(), subset.end());
        const Partition full = subset_signal(s, all);
        for (int i = 0; i < num_traders(); ++i) {
            std::vector<int> others;
            for (int j = 0; j < num_traders(); ++j)
                if (j != i) others.insert(others.end(), traders[j].begin(), traders[j].end());
            const Partition rest = subset_signal(s, others);
            bool adds = false;
            for (int g = 0; g < s.support_size() && !adds; ++g) {
                const auto with = posterior(s, full, full.cell_of(g)).dist;
                const auto without = posterior(s, rest, rest.cell_of(g)).dist;
                for (int e = 0; e < s.num_events(); ++e)
                    if (std::fabs(with[e] - without[e]) > kProbTol) adds = true;
            }
            if (!adds)
                throw InvalidInput("market: trader " + std::to_string(i) +
                                   "'s signals are trivial given the rest");
        }
    }
};

struct ReportRule {
    enum class Kind { kTruthful, kSilent, kCoarsenedTruthful, kGarbledTruthful };
    Kind kind = Kind::kSilent;
    std::optional<Partition> coarsening;  // for kCoarsenedTruthful
    std::optional<Garbling> garbling;     // for kGarbledTruthful

    static ReportRule truthful() { return {Kind::kTruthful, {}, {}}; }
    static ReportRule silent() { return {Kind::kSilent, {}, {}}; }
    static ReportRule coarsened(Partition p) {
        return {Kind::kCoarsenedTruthful, std::move(p), {}};
    }
    static ReportRule garbled(Garbling g) {
        return {Kind::kGarbledTruthful, {}, std::move(g)};
    }

    std::string label() const {
        switch (kind) {
            case Kind::kTruthful: return "truthful";
            case Kind::kSilent: return "silent";
            case Kind::kCoarsenedTruthful: return "coarsened";
            case Kind::kGarbledTruthful: return "garbled";
        }
        return "?";
    }
};

struct StrategyProfile {
    std::vector<ReportRule> slots;  // one rule per trading slot

    static StrategyProfile uniform(int num_slots, const ReportRule& rule) {
        StrategyProfile p;
        p.slots.assign(num_slots, rule);
        return p;
    }
};

// All-rush: everyone truthful at their first opportunity.
inline StrategyProfile all_rush_profile(const MarketGame& game) {
    StrategyProfile p = StrategyProfile::uniform(game.num_slots(), ReportRule::silent());
    std::vector<bool> done(game.traders.size(), false);
    for (int t = 0; t < game.num_slots(); ++t) {
        if (!done[game.order[t]]) {
            p.slots[t] = ReportRule::truthful();
            done[game.order[t]] = true;
        }
    }
    return p;
}

// All-delay: everyone silent until their final opportunity.
inline StrategyProfile all_delay_profile(const MarketGame& game) {
    StrategyProfile p = StrategyProfile::uniform(game.num_slots(), ReportRule::silent());
    std::vector<int> last(game.traders.size(), -1);
    for (int t = 0; t < game.num_slots(); ++t) last[game.order[t]] = t;
    for (int t : last) p.slots[t] = ReportRule::truthful();
    return p;
}

struct MarketRun {
    int event = 0;
    std::vector<std::vector<double>> prices;  // p^(0) .. p^(T)
    std::vector<double> payoffs;              // per trader
};

namespace detail {

inline void validate_profile(const MarketGame& game, const StrategyProfile& profile) {
    if (static_cast<int>(profile.slots.size()) != game.num_slots())
        throw InvalidInput("market: profile needs one rule per slot");
    for (int t = 0; t < game.num_slots(); ++t) {
        const ReportRule& rule = profile.slots[t];
        const Partition own = game.trader_partition(game.order[t]);
        if (rule.kind == ReportRule::Kind::kCoarsenedTruthful) {
            if (!rule.coarsening || !refines(own, *rule.coarsening))
                throw InvalidInput("market: coarsening is not a function of the trader's signal");
        } else if (rule.kind == ReportRule::Kind::kGarbledTruthful) {
            if (!rule.garbling || !refines(own, rule.garbling->source))
                throw InvalidInput("market: garbling is not a function of the trader's signal");
        }
    }
}

// Price implied by per-support likelihood weights of the observed history.
inline std::vector<double> implied_price(const InformationStructure& s,
                                         const std::vector<double>& lambda) {
    std::vector<double> price(s.num_events(), 0.0);
    for (int g = 0; g < s.support_size(); ++g)
        for (int e = 0; e < s.num_events(); ++e) price[e] += lambda[g] * s.mass(g, e);
    double total = 0.0;
    for (double x : price) total += x;
    for (double& x : price) x /= total;
    return price;
}

// Replays the profile for one support point with fixed garbled outcomes;
// returns the price path.
inline std::vector<std::vector<double>> replay(const MarketGame& game,
                                               const StrategyProfile& profile, int gamma,
                                               const std::vector<int>& garble_outcomes) {
    const auto& s = game.ctx.structure;
    std::vector<double> lambda(s.support_size(), 1.0);
    std::vector<std::vector<double>> prices{implied_price(s, lambda)};
    std::size_t garble_slot = 0;
    for (int t = 0; t < game.num_slots(); ++t) {
        const ReportRule& rule = profile.slots[t];
        switch (rule.kind) {
            case ReportRule::Kind::kSilent:
                break;
            case ReportRule::Kind::kTruthful: {
                const Partition own = game.trader_partition(game.order[t]);
                const int cell = own.cell_of(gamma);
                for (int g = 0; g < s.support_size(); ++g)
                    if (own.cell_of(g) != cell) lambda[g] = 0.0;
                break;
            }
            case ReportRule::Kind::kCoarsenedTruthful: {
                const Partition& p = *rule.coarsening;
                const int cell = p.cell_of(gamma);
                for (int g = 0; g < s.support_size(); ++g)
                    if (p.cell_of(g) != cell) lambda[g] = 0.0;
                break;
            }
            case ReportRule::Kind::kGarbledTruthful: {
                const Garbling& garb = *rule.garbling;
                const int o = garble_outcomes[garble_slot++];
                for (int g = 0; g < s.support_size(); ++g)
                    lambda[g] *= garb.matrix[garb.source.cell_of(g)][o];
                break;
            }
        }
        prices.push_back(implied_price(s, lambda));
    }
    return prices;
}

inline std::vector<double> payoffs_from_prices(const MarketGame& game,
                                               const std::vector<std::vector<double>>& prices,
                                               int e) {
    std::vector<double> out(game.traders.size(), 0.0);
    for (int t = 0; t < game.num_slots(); ++t) {
        const double after = game.ctx.g.score(prices[t + 1], e);
        const double before = game.ctx.g.score(prices[t], e);
        if (after == before) continue;  // covers the -inf minus -inf case
        out[game.order[t]] += after - before;
    }
    return out;
}

inline std::vector<int> garbled_slots(const StrategyProfile& profile) {
    std::vector<int> out;
    for (std::size_t t = 0; t < profile.slots.size(); ++t)
        if (profile.slots[t].kind == ReportRule::Kind::kGarbledTruthful)
            out.push_back(static_cast<int>(t));
    return out;
}

}  // namespace detail

// One exact market run; garbled reports draw their outcomes from the seed.
inline MarketRun run_market(const MarketGame& game, const StrategyProfile& profile,
                            const PriorEntry& outcome, std::uint64_t seed = 0) {
    detail::validate_profile(game, profile);
    const auto& s = game.ctx.structure;
    const auto gi = s.support_index(outcome.a);
    if (!gi) throw InvalidInput("run_market: realization not in support");
    Rng rng(seed);
    std::vector<int> draws;
    for (int t : detail::garbled_slots(profile)) {
        const Garbling& garb = *profile.slots[t].garbling;
        const auto& row = garb.matrix[garb.source.cell_of(*gi)];
        std::discrete_distribution<int> dist(row.begin(), row.end());
        draws.push_back(dist(rng));
    }
    MarketRun run;
    run.event = outcome.e;
    run.prices = detail::replay(game, profile, *gi, draws);
    run.payoffs = detail::payoffs_from_prices(game, run.prices, outcome.e);
    return run;
}

struct ExpectedPayoffs {
    std::vector<double> payoffs;
    bool finite = true;
};

// Exact expectation over the prior and all garbled-outcome combinations.
inline ExpectedPayoffs expected_payoffs(const MarketGame& game,
                                        const StrategyProfile& profile) {
    detail::validate_profile(game, profile);
    const auto& s = game.ctx.structure;
    const std::vector<int> gslots = detail::garbled_slots(profile);
    ExpectedPayoffs out;
    out.payoffs.assign(game.traders.size(), 0.0);
    std::vector<std::vector<double>> terms(game.traders.size());

    for (int gamma = 0; gamma < s.support_size(); ++gamma) {
        std::vector<int> draws(gslots.size(), 0);
        std::function<void(std::size_t, double)> rec = [&](std::size_t idx, double weight) {
            if (weight <= 0.0) return;
            if (idx == gslots.size()) {
                const auto prices = detail::replay(game, profile, gamma, draws);
                for (int e = 0; e < s.num_events(); ++e) {
                    const double mass = s.mass(gamma, e);
                    if (mass <= 0.0) continue;
                    const auto pay = detail::payoffs_from_prices(game, prices, e);
                    for (std::size_t i = 0; i < pay.size(); ++i)
                        terms[i].push_back(weighted_term(weight * mass, pay[i]));
                }
                return;
            }
            const Garbling& garb = *profile.slots[gslots[idx]].garbling;
            const auto& row = garb.matrix[garb.source.cell_of(gamma)];
            for (std::size_t o = 0; o < row.size(); ++o) {
                draws[idx] = static_cast<int>(o);
                rec(idx + 1, weight * row[o]);
            }
        };
        rec(0, 1.0);
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out.payoffs[i] = pairwise_sum(terms[i]);
        if (!std::isfinite(out.payoffs[i])) out.finite = false;
    }
    return out;
}

// Syntactic all-rush check: only truthful/silent rules, and each trader is
// truthful at some slot before the next trader's first opportunity.
inline bool is_all_rush(const MarketGame& game, const StrategyProfile& profile) {
    if (static_cast<int>(profile.slots.size()) != game.num_slots()) return false;
    for (const auto& rule : profile.slots)
        if (rule.kind != ReportRule::Kind::kTruthful &&
            rule.kind != ReportRule::Kind::kSilent)
            return false;
    std::vector<int> first(game.traders.size(), -1);
    for (int t = game.num_slots() - 1; t >= 0; --t) first[game.order[t]] = t;
    std::vector<int> by_first(game.traders.size());
    std::iota(by_first.begin(), by_first.end(), 0);
    std::sort(by_first.begin(), by_first.end(),
              [&](int a, int b) { return first[a] < first[b]; });
    for (std::size_t j = 0; j < by_first.size(); ++j) {
        const int i = by_first[j];
        const int deadline =
            j + 1 < by_first.size() ? first[by_first[j + 1]] : game.num_slots();
        bool ok = false;
        for (int t = 0; t < deadline; ++t)
            if (game.order[t] == i && profile.slots[t].kind == ReportRule::Kind::kTruthful)
                ok = true;
        if (!ok) return false;
    }
    return true;
}

// Syntactic all-delay check: traders ordered by final opportunity; each is
// silent through the previous trader's final slot and truthful at their own.
inline bool is_all_delay(const MarketGame& game, const StrategyProfile& profile) {
    if (static_cast<int>(profile.slots.size()) != game.num_slots()) return false;
    for (const auto& rule : profile.slots)
        if (rule.kind != ReportRule::Kind::kTruthful &&
            rule.kind != ReportRule::Kind::kSilent)
            return false;
    std::vector<int> last(game.traders.size(), -1);
    for (int t = 0; t < game.num_slots(); ++t) last[game.order[t]] = t;
    std::vector<int> by_last(game.traders.size());
    std::iota(by_last.begin(), by_last.end(), 0);
    std::sort(by_last.begin(), by_last.end(), [&](int a, int b) { return last[a] < last[b]; });
    for (std::size_t j = 0; j < by_last.size(); ++j) {
        const int i = by_last[j];
        if (profile.slots[last[i]].kind != ReportRule::Kind::kTruthful) return false;
        const int quiet_until = j > 0 ? last[by_last[j - 1]] : -1;
        for (int t = 0; t <= quiet_until; ++t)
            if (game.order[t] == i && profile.slots[t].kind != ReportRule::Kind::kSilent)
                return false;
    }
    return true;
}

struct DeviationReport {
    bool verified = true;
    std::vector<double> margins;                        // per trader
    std::vector<std::vector<std::string>> best_deviation;  // rule labels per own slot
    std::string deviation_class;
};

// Necessary-condition equilibrium check: margins against enumerated
// single-trader deviations (truthful/silent/coarsened per slot, plus seeded
// random garblings). Not a BNE certification.
inline DeviationReport verify_equilibrium(const MarketGame& game,
                                          const StrategyProfile& profile,
                                          int garble_seeds = 20, std::uint64_t seed = 0,
                                          double tol = kValueTol) {
    detail::validate_profile(game, profile);
    const ExpectedPayoffs base = expected_payoffs(game, profile);
    if (!base.finite) throw InvalidInput("verify_equilibrium: profile payoff not finite");

    DeviationReport rep;
    rep.deviation_class = "coarsened+silent+truthful+garbled(" +
                          std::to_string(garble_seeds) + " seeds)";
    Rng rng(seed);
    std::exponential_distribution<double> exp1(1.0);

    for (int i = 0; i < game.num_traders(); ++i) {
        std::vector<int> own_slots;
        for (int t = 0; t < game.num_slots(); ++t)
            if (game.order[t] == i) own_slots.push_back(t);
        const Partition own = game.trader_partition(i);

        // Per-slot deterministic menu.
        std::vector<ReportRule> menu{ReportRule::silent(), ReportRule::truthful()};
        for (const Partition& p : enumerate_coarsenings(own))
            menu.push_back(ReportRule::coarsened(p));

        double best = neg_inf();
        std::vector<std::string> best_labels;
        auto consider = [&](const std::vector<ReportRule>& rules) {
            StrategyProfile dev = profile;
            for (std::size_t j = 0; j < own_slots.size(); ++j)
                dev.slots[own_slots[j]] = rules[j];
            const double pay = expected_payoffs(game, dev).payoffs[i];
            if (pay > best) {
                best = pay;
                best_labels.clear();
                for (const auto& r : rules) best_labels.push_back(r.label());
            }
        };

        std::vector<ReportRule> choice(own_slots.size());
        std::function<void(std::size_t)> enumerate = [&](std::size_t j) {
            if (j == own_slots.size()) {
                consider(choice);
                return;
            }
            for (const ReportRule& r : menu) {
                choice[j] = r;
                enumerate(j + 1);
            }
        };
        enumerate(0);

        for (int trial = 0; trial < garble_seeds; ++trial) {
            for (std::size_t j = 0; j < own_slots.size(); ++j) {
                const int pick = static_cast<int>(rng() % 3);
                if (pick == 0) {
                    choice[j] = ReportRule::silent();
                } else if (pick == 1) {
                    choice[j] = ReportRule::truthful();
                } else {
                    const int rows = own.num_cells();
                    const int cols = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(
                                                              std::max(1, rows)));
                    std::vector<std::vector<double>> mat(rows, std::vector<double>(cols));
                    for (auto& row : mat) {
                        double total = 0.0;
                        for (double& x : row) total += (x = exp1(rng) + 1e-9);
                        for (double& x : row) x /= total;
                    }
                    choice[j] = ReportRule::garbled(Garbling(own, std::move(mat)));
                }
            }
            consider(choice);
        }

        const double margin = base.payoffs[i] - best;
        rep.margins.push_back(margin);
        rep.best_deviation.push_back(best_labels);
        if (margin < -tol) rep.verified = false;
    }
    return rep;
}

struct RefutationWitness {
    std::string status;  // "witness" | "none" | "precondition-failed"
    std::uint64_t a_mask = 0;
    std::uint64_t b_mask = 0;
    std::optional<Partition> a_prime;
    std::optional<Garbling> garbling;
    double lhs = 0.0;         // V(A' v B) - V(A')
    double rhs = 0.0;         // V(A v B) - V(A)
    double alice_gain = 0.0;  // payoff gained by deviating in the A-B-A market
};

namespace detail {

inline RefutationWitness refute_timing(const ValueContext& ctx, Mode mode, double tol,
                                       int garble_budget, std::uint64_t seed) {
    const int n = ctx.structure.num_signals();
    RefutationWitness out;
    out.status = "none";
    double best_margin = neg_inf();
    for (std::uint64_t am = 1; am < (1ull << n); ++am) {
        const Partition a = subset_signal(ctx.structure, am);
        const double va = value_exact(ctx, a);
        for (std::uint64_t bm = 1; bm < (1ull << n); ++bm) {
            if (bm & am) continue;  // B disjoint from A, as in the timing argument
            const Partition b = subset_signal(ctx.structure, bm);
            const double rhs = value_exact(ctx, join(a, b)) - va;
            detail::for_each_signalwise_coarsening(
                ctx.structure, am, 12, [&](const Partition& ap) {
                    const double lhs = value_exact(ctx, join(ap, b)) - value_exact(ctx, ap);
                    const double margin = mode == Mode::kSubstitutes ? rhs - lhs : lhs - rhs;
                    if (margin > tol && margin > best_margin) {
                        best_margin = margin;
                        out.status = "witness";
                        out.a_mask = am;
                        out.b_mask = bm;
                        out.a_prime = ap;
                        out.lhs = lhs;
                        out.rhs = rhs;
                        out.alice_gain = margin;
                    }
                });
        }
    }
    if (out.status == "none" && garble_budget > 0) {
        if (auto w = refute_strong(ctx, mode, garble_budget, seed, tol)) {
            out.status = "witness";
            out.a_mask = w->a_mask;
            out.b_mask = w->b_mask;
            out.garbling = w->garbling;
            out.alice_gain = w->margin;
            const Partition a = subset_signal(ctx.structure, w->a_mask);
            const Partition b = subset_signal(ctx.structure, w->b_mask);
            out.rhs = value_exact(ctx, join(a, b)) - value_exact(ctx, a);
            out.lhs = value_garbled(ctx, w->garbling, b) - value_garbled(ctx, w->garbling);
        }
    }
    return out;
}

}  // namespace detail

// Searches for a coarsening that makes rushing unprofitable: some A' of A with
// V(A' v B) - V(A') < V(A v B) - V(A). Alice gains rhs - lhs by withholding.
inline RefutationWitness rush_refutation(const ValueContext& ctx, double tol = kValueTol,
                                         int garble_budget = 0, std::uint64_t seed = 0) {
    return detail::refute_timing(ctx, Mode::kSubstitutes, tol, garble_budget, seed);
}

// Mirror image: a coarsening with a strictly larger marginal makes delaying
// unprofitable. Requires distinguishability so truthful reports are invertible.
inline RefutationWitness delay_refutation(const ValueContext& ctx, double tol = kValueTol,
                                          int garble_budget = 0, std::uint64_t seed = 0) {
    const auto dist = is_distinguishable(ctx.structure);
    if (!dist.distinguishable) {
        RefutationWitness out;
        out.status = "precondition-failed";
        return out;
    }
    return detail::refute_timing(ctx, Mode::kComplements, tol, garble_budget, seed);
}

}  // namespace infosubs
