#pragma once

// The value function V over signal lattices, computed exactly (direct,
// entropy, and divergence routes agree) and by sampling in the oracle model.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "infosubs/decision.hpp"
#include "infosubs/info_model.hpp"

namespace infosubs {

struct ValueContext {
    InformationStructure structure;
    ExpectedScoreFunction g;

    ValueContext(InformationStructure s, ExpectedScoreFunction score_fn)
        : structure(std::move(s)), g(std::move(score_fn)) {
        if (g.num_events() != structure.num_events())
            throw InvalidInput("value context: event outcome counts disagree");
    }
};

// V(p) = sum over cells of cellprob * G(posterior).
inline double value_exact(const ValueContext& ctx, const Partition& p) {
    std::vector<double> terms;
    terms.reserve(p.num_cells());
    for (int c = 0; c < p.num_cells(); ++c) {
        const auto post = posterior(ctx.structure, p, c);
        terms.push_back(post.cell_prob * ctx.g.value(post.dist));
    }
    return pairwise_sum(terms);
}

inline double value_subset(const ValueContext& ctx, std::uint64_t mask) {
    return value_exact(ctx, subset_signal(ctx.structure, mask));
}

// V(A' v B) for garbled A'; pass the null partition for plain V(A').
inline double value_garbled(const ValueContext& ctx, const Garbling& garb,
                            const std::optional<Partition>& b = std::nullopt) {
    const Partition bot = Partition::bottom(ctx.structure.support_size());
    const GarbledJoint table = garbled_joint(ctx.structure, garb, b ? *b : bot);
    std::vector<double> terms;
    for (int o = 0; o < table.num_outcomes; ++o) {
        for (int c = 0; c < table.num_b_cells; ++c) {
            double cell_mass = 0.0;
            std::vector<double> dist(table.num_events);
            for (int e = 0; e < table.num_events; ++e) cell_mass += (dist[e] = table.at(o, c, e));
            if (cell_mass <= 0.0) continue;
            for (double& x : dist) x /= cell_mass;
            terms.push_back(cell_mass * ctx.g.value(dist));
        }
    }
    return pairwise_sum(terms);
}

inline double marginal(const ValueContext& ctx, const Partition& a, const Partition& b) {
    return value_exact(ctx, join(a, b)) - value_exact(ctx, a);
}

// Same marginal via Lemma route: E over (a-cell, b-cell) of D_G(p_ab, p_a).
inline double marginal_bregman(const ValueContext& ctx, const Partition& a, const Partition& b) {
    const Partition ab = join(a, b);
    std::vector<double> terms;
    for (int c = 0; c < ab.num_cells(); ++c) {
        const auto post_ab = posterior(ctx.structure, ab, c);
        const int a_cell = a.cell_of(ab.cells()[c].front());
        const auto post_a = posterior(ctx.structure, a, a_cell);
        terms.push_back(post_ab.cell_prob * bregman(ctx.g, post_ab.dist, post_a.dist));
    }
    return pairwise_sum(terms);
}

struct SamplingSpec {
    double epsilon = 0.05;
    double delta = 0.05;
    std::uint64_t seed = 0;
    std::optional<double> range;        // Hoeffding K; probed from exact posteriors if absent
    std::optional<double> clamp_floor;  // opt-in posterior clamp for unbounded G
};

namespace detail {

inline std::vector<double> posterior_for_projection(const InformationStructure& s,
                                                    const std::vector<int>& subset,
                                                    const std::vector<int>& tuple,
                                                    std::optional<double> clamp_floor) {
    // p(e | a_S) = p(e, a_S) / p(a_S), via the sparse prior as probability oracle.
    std::vector<double> dist(s.num_events(), 0.0);
    for (int g = 0; g < s.support_size(); ++g) {
        bool agrees = true;
        for (int i : subset)
            if (s.support()[g][i] != tuple[i]) { agrees = false; break; }
        if (!agrees) continue;
        for (int e = 0; e < s.num_events(); ++e) dist[e] += s.mass(g, e);
    }
    double total = 0.0;
    for (double x : dist) total += x;
    for (double& x : dist) x /= total;
    if (clamp_floor) {
        double renorm = 0.0;
        for (double& x : dist) renorm += (x = std::max(x, *clamp_floor));
        for (double& x : dist) x /= renorm;
    }
    return dist;
}

}  // namespace detail

// Monte Carlo estimate per the Hoeffding bound m >= K^2 ln(2/delta) / (2 eps^2).
inline double value_sampled(const ValueContext& ctx, const std::vector<int>& subset,
                            const SamplingSpec& spec) {
    if (subset.empty()) return ctx.g.value(ctx.structure.prior_on_event());
    double range = 0.0;
    if (spec.range) {
        range = *spec.range;
    } else {
        const Partition part = subset_signal(ctx.structure, subset);
        double lo = pos_inf(), hi = neg_inf();
        for (int c = 0; c < part.num_cells(); ++c) {
            auto post = posterior(ctx.structure, part, c);
            if (spec.clamp_floor) {
                double renorm = 0.0;
                for (double& x : post.dist) renorm += (x = std::max(x, *spec.clamp_floor));
                for (double& x : post.dist) x /= renorm;
            }
            const double v = ctx.g.value(post.dist);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        range = hi - lo;
        if (!std::isfinite(range))
            throw InvalidInput(
                "value_sampled: G unbounded on reachable posteriors; configure a clamp floor");
    }
    if (range <= 0.0) range = 0.0;
    const std::size_t m = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(range * range * std::log(2.0 / spec.delta) /
                         (2.0 * spec.epsilon * spec.epsilon))));

    Rng rng(spec.seed);
    std::vector<double> weights(ctx.structure.support_size());
    for (int g = 0; g < ctx.structure.support_size(); ++g)
        weights[g] = ctx.structure.tuple_mass(g);
    std::discrete_distribution<int> draw(weights.begin(), weights.end());
    std::vector<double> samples;
    samples.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const int g = draw(rng);
        const auto dist = detail::posterior_for_projection(ctx.structure, subset,
                                                          ctx.structure.support()[g],
                                                          spec.clamp_floor);
        samples.push_back(ctx.g.value(dist));
    }
    return pairwise_sum(samples) / static_cast<double>(m);
}

// Decision-oracle variant: average u(d*(a_S), e) over prior samples.
inline double value_sampled_decision(const InformationStructure& structure,
                                     const DecisionProblem& dp, const std::vector<int>& subset,
                                     const SamplingSpec& spec) {
    if (structure.num_events() != dp.num_events())
        throw InvalidInput("value_sampled_decision: event outcome counts disagree");
    double lo = pos_inf(), hi = neg_inf();
    for (const auto& row : dp.utility)
        for (double x : row) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    const double range = spec.range.value_or(hi - lo);
    const std::size_t m = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(range * range * std::log(2.0 / spec.delta) /
                         (2.0 * spec.epsilon * spec.epsilon))));

    Rng rng(spec.seed);
    std::vector<double> weights;
    for (const auto& entry : structure.prior()) weights.push_back(entry.p);
    std::discrete_distribution<int> draw(weights.begin(), weights.end());
    std::vector<double> samples;
    samples.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& entry = structure.prior()[draw(rng)];
        const auto dist =
            detail::posterior_for_projection(structure, subset, entry.a, std::nullopt);
        samples.push_back(dp.utility[dp.best_decision(dist)][entry.e]);
    }
    return pairwise_sum(samples) / static_cast<double>(m);
}

}  // namespace infosubs
