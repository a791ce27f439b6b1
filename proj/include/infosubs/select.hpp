#pragma once

// Signal selection under cardinality / knapsack / explicit-family constraints,
// batch and adaptive, plus the set-function reduction and supermodular
// hardness instances.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

#include "infosubs/classify.hpp"
#include "infosubs/value.hpp"

namespace infosubs {

using SetFunction = std::function<double(std::uint64_t)>;

struct Cardinality {
    int k = 0;
};
struct Knapsack {
    std::vector<double> costs;
    double budget = 0.0;
};
struct ExplicitFamily {
    std::vector<std::uint64_t> masks;
};

struct Constraint {
    std::variant<Cardinality, Knapsack, ExplicitFamily> spec;

    void validate(int n) const {
        if (const auto* c = std::get_if<Cardinality>(&spec)) {
            if (c->k < 0 || c->k > n) throw InvalidInput("constraint: k out of range");
        } else if (const auto* kn = std::get_if<Knapsack>(&spec)) {
            if (static_cast<int>(kn->costs.size()) != n)
                throw InvalidInput("constraint: need one cost per signal");
            for (double c : kn->costs)
                if (c < 0.0) throw InvalidInput("constraint: negative cost");
            if (kn->budget < 0.0) throw InvalidInput("constraint: negative budget");
        } else if (const auto* fam = std::get_if<ExplicitFamily>(&spec)) {
            if (fam->masks.empty()) throw InvalidInput("constraint: empty family");
            for (std::uint64_t m : fam->masks)
                if (m >= (1ull << n)) throw InvalidInput("constraint: family mask out of range");
        }
    }

    bool feasible(std::uint64_t mask, int n) const {
        if (const auto* c = std::get_if<Cardinality>(&spec))
            return std::popcount(mask) == c->k;
        if (const auto* kn = std::get_if<Knapsack>(&spec)) {
            double cost = 0.0;
            for (int i = 0; i < n; ++i)
                if (mask & (1ull << i)) cost += kn->costs[i];
            return cost <= kn->budget + kProbTol;
        }
        const auto& fam = std::get<ExplicitFamily>(spec);
        return std::find(fam.masks.begin(), fam.masks.end(), mask) != fam.masks.end();
    }
};

struct SelectResult {
    std::uint64_t mask = 0;
    double value = 0.0;
    std::size_t oracle_calls = 0;
};

inline SetFunction make_value_oracle(const ValueContext& ctx) {
    return [&ctx](std::uint64_t mask) { return value_subset(ctx, mask); };
}

inline SelectResult brute_force_select(const ValueContext& ctx, const Constraint& c,
                                       int signal_cap = 20) {
    const int n = ctx.structure.num_signals();
    if (n > signal_cap) throw CapExceeded("brute_force_select: too many signals");
    c.validate(n);
    SelectResult best{0, value_subset(ctx, 0), 0};
    bool have = c.feasible(0, n);
    for (std::uint64_t mask = have ? 1 : 0; mask < (1ull << n); ++mask) {
        if (!c.feasible(mask, n)) continue;
        const double v = value_subset(ctx, mask);
        if (!have || v > best.value + kProbTol) {
            best = {mask, v, 0};
            have = true;
        }
    }
    if (!have) throw InvalidInput("brute_force_select: no feasible subset");
    return best;
}

// Lazy greedy: a priority queue of possibly stale marginal gains, re-evaluated
// on pop. Output is identical to naive greedy with lowest-index tie-break.
inline SelectResult greedy_select(const SetFunction& f, int n, int k) {
    if (k > n) throw InvalidInput("greedy_select: k > n");
    std::size_t calls = 0;
    auto eval = [&](std::uint64_t m) {
        ++calls;
        return f(m);
    };
    std::uint64_t chosen = 0;
    double current = eval(0);
    // Entries ordered by gain descending, then index ascending.
    struct Entry {
        double gain;
        int index;
        int round;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.gain != b.gain) return a.gain < b.gain;
        return a.index > b.index;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (int i = 0; i < n; ++i)
        heap.push({eval(1ull << i) - current, i, 0});
    for (int round = 1; round <= k; ++round) {
        while (true) {
            Entry top = heap.top();
            heap.pop();
            if (top.round != round - 1) {
                top.gain = eval(chosen | (1ull << top.index)) - current;
                top.round = round - 1;
                heap.push(top);
                continue;
            }
            chosen |= 1ull << top.index;
            current += top.gain;
            break;
        }
    }
    return {chosen, eval(chosen), calls};
}

inline SelectResult naive_greedy_select(const SetFunction& f, int n, int k) {
    if (k > n) throw InvalidInput("greedy_select: k > n");
    std::uint64_t chosen = 0;
    for (int round = 0; round < k; ++round) {
        int best = -1;
        double best_gain = neg_inf();
        const double current = f(chosen);
        for (int i = 0; i < n; ++i) {
            if (chosen & (1ull << i)) continue;
            const double gain = f(chosen | (1ull << i)) - current;
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        chosen |= 1ull << best;
    }
    return {chosen, f(chosen), 0};
}

// Cost-benefit greedy vs. best affordable singleton gives 0.5*(1 - 1/e) on
// substitutes; partial enumeration over seeds of size <= 3 restores (1 - 1/e).
inline SelectResult knapsack_select(const SetFunction& f, int n,
                                    const std::vector<double>& costs, double budget,
                                    bool partial_enumeration = false) {
    if (static_cast<int>(costs.size()) != n)
        throw InvalidInput("knapsack_select: need one cost per signal");
    auto spent = [&](std::uint64_t mask) {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1ull << i)) total += costs[i];
        return total;
    };
    auto ratio_greedy = [&](std::uint64_t seed_mask) {
        std::uint64_t chosen = seed_mask;
        double cost = spent(chosen);
        while (true) {
            const double current = f(chosen);
            int best = -1;
            double best_ratio = neg_inf();
            for (int i = 0; i < n; ++i) {
                if (chosen & (1ull << i)) continue;
                if (cost + costs[i] > budget + kProbTol) continue;
                const double gain = f(chosen | (1ull << i)) - current;
                const double ratio = costs[i] > kProbTol ? gain / costs[i]
                                                         : (gain > 0 ? pos_inf() : gain);
                if (ratio > best_ratio) {
                    best_ratio = ratio;
                    best = i;
                }
            }
            if (best < 0 || best_ratio <= 0.0) break;
            chosen |= 1ull << best;
            cost += costs[best];
        }
        return chosen;
    };

    std::uint64_t best_mask = ratio_greedy(0);
    double best_val = f(best_mask);
    for (int i = 0; i < n; ++i) {
        if (costs[i] > budget + kProbTol) continue;
        const double v = f(1ull << i);
        if (v > best_val + kProbTol) {
            best_val = v;
            best_mask = 1ull << i;
        }
    }
    if (partial_enumeration) {
        for (std::uint64_t seed_mask = 1; seed_mask < (1ull << n); ++seed_mask) {
            if (std::popcount(seed_mask) > 3) continue;
            if (spent(seed_mask) > budget + kProbTol) continue;
            const std::uint64_t m = ratio_greedy(seed_mask);
            const double v = f(m);
            if (v > best_val + kProbTol) {
                best_val = v;
                best_mask = m;
            }
        }
    }
    return {best_mask, best_val, 0};
}

struct AdaptiveRun {
    std::vector<int> sequence;  // signals observed, in order
    int decision = 0;
    double utility = 0.0;
};

namespace detail {

inline int adaptive_greedy_choice(const InformationStructure& cond,
                                  const ExpectedScoreFunction& g, std::uint64_t observed,
                                  int n) {
    const ValueContext ctx(cond, g);
    int best = -1;
    double best_val = neg_inf();
    for (int j = 0; j < n; ++j) {
        if (observed & (1ull << j)) continue;
        const double v = value_subset(ctx, std::uint64_t{1} << j);
        if (v > best_val + kProbTol) {
            best_val = v;
            best = j;
        }
    }
    return best;
}

}  // namespace detail

// Greedy adaptive selection: at each step observe the single signal with the
// highest value under the current posterior, then decide.
inline AdaptiveRun adaptive_greedy(const InformationStructure& structure,
                                   const DecisionProblem& dp, int k,
                                   const PriorEntry& outcome) {
    const int n = structure.num_signals();
    if (k > n) throw InvalidInput("adaptive_greedy: k > n");
    const ExpectedScoreFunction g = revelation(dp);
    AdaptiveRun run;
    InformationStructure cond = structure;
    std::uint64_t observed = 0;
    for (int t = 0; t < k; ++t) {
        const int j = detail::adaptive_greedy_choice(cond, g, observed, n);
        run.sequence.push_back(j);
        observed |= 1ull << j;
        cond = detail::condition_on(cond, {j}, {outcome.a[j]});
    }
    run.decision = dp.best_decision(cond.prior_on_event());
    run.utility = dp.utility[run.decision][outcome.e];
    return run;
}

// Exact expected value of the greedy adaptive policy by tree evaluation.
inline double adaptive_greedy_expected(const InformationStructure& structure,
                                       const DecisionProblem& dp, int k) {
    const int n = structure.num_signals();
    if (k > n) throw InvalidInput("adaptive_greedy_expected: k > n");
    const ExpectedScoreFunction g = revelation(dp);
    std::function<double(const InformationStructure&, std::uint64_t, int)> rec =
        [&](const InformationStructure& cond, std::uint64_t observed, int t) -> double {
        if (t == k) {
            const auto q = cond.prior_on_event();
            const int d = dp.best_decision(q);
            double v = 0.0;
            for (int e = 0; e < dp.num_events(); ++e) v += q[e] * dp.utility[d][e];
            return v;
        }
        const int j = detail::adaptive_greedy_choice(cond, g, observed, n);
        const Partition p = subset_signal(cond, std::vector<int>{j});
        std::vector<double> terms;
        for (int c = 0; c < p.num_cells(); ++c) {
            const auto post = posterior(cond, p, c);
            const int outcome = cond.support()[p.cells()[c].front()][j];
            terms.push_back(post.cell_prob *
                            rec(detail::condition_on(cond, {j}, {outcome}),
                                observed | (1ull << j), t + 1));
        }
        return pairwise_sum(terms);
    };
    return rec(structure, 0, 0);
}

// Exact optimum over all adaptive policies by backward induction.
inline double brute_force_policy(const InformationStructure& structure,
                                 const DecisionProblem& dp, int k, int signal_cap = 6) {
    const int n = structure.num_signals();
    if (n > signal_cap) throw CapExceeded("brute_force_policy: too many signals");
    if (k > n) throw InvalidInput("brute_force_policy: k > n");
    std::function<double(const InformationStructure&, std::uint64_t, int)> rec =
        [&](const InformationStructure& cond, std::uint64_t observed, int t) -> double {
        if (t == k) {
            const auto q = cond.prior_on_event();
            const int d = dp.best_decision(q);
            double v = 0.0;
            for (int e = 0; e < dp.num_events(); ++e) v += q[e] * dp.utility[d][e];
            return v;
        }
        double best = neg_inf();
        for (int j = 0; j < n; ++j) {
            if (observed & (1ull << j)) continue;
            const Partition p = subset_signal(cond, std::vector<int>{j});
            std::vector<double> terms;
            for (int c = 0; c < p.num_cells(); ++c) {
                const auto post = posterior(cond, p, c);
                const int outcome = cond.support()[p.cells()[c].front()][j];
                terms.push_back(post.cell_prob *
                                rec(detail::condition_on(cond, {j}, {outcome}),
                                    observed | (1ull << j), t + 1));
            }
            best = std::max(best, pairwise_sum(terms));
        }
        return best;
    };
    return rec(structure, 0, 0);
}

// Embedding of a monotone set function f into signal selection: n uniform
// independent bits, E is the full bit vector, reports are graded by the face
// they lie on with off-face corners scored -infinity. V(S) = f(S) exactly.
class ReducedInstance {
  public:
    ReducedInstance(SetFunction f, int n) : f_(std::move(f)), n_(n) {
        if (n < 1 || n > 20) throw InvalidInput("reduction: n out of range");
        if (n <= 12) {
            for (std::uint64_t s = 0; s < (1ull << n); ++s)
                for (int i = 0; i < n; ++i)
                    if (!(s & (1ull << i))) check_monotone(s, i);
        }
    }

    int n() const { return n_; }

    double f(std::uint64_t mask) const { return f_(mask); }

    // F(r) = f of the set of coordinates pinned to a corner value.
    double F(const std::vector<double>& r) const {
        std::uint64_t s = 0;
        for (int i = 0; i < n_; ++i)
            if (r[i] == 0.0 || r[i] == 1.0) s |= 1ull << i;
        return f_(s);
    }

    // Posterior mean report after observing the signals in mask with values a.
    std::vector<double> posterior_mean(std::uint64_t mask, std::uint64_t bits) const {
        std::vector<double> mu(n_, 0.5);
        for (int i = 0; i < n_; ++i)
            if (mask & (1ull << i)) mu[i] = (bits >> i) & 1;
        return mu;
    }

    // R(d, e): f of d's face when corner e agrees with d on the pinned
    // coordinates, else -infinity.
    double score(const std::vector<double>& d, std::uint64_t corner) const {
        std::uint64_t face = 0;
        for (int i = 0; i < n_; ++i)
            if (d[i] == 0.0 || d[i] == 1.0) face |= 1ull << i;
        for (int i = 0; i < n_; ++i)
            if ((face & (1ull << i)) &&
                d[i] != static_cast<double>((corner >> i) & 1))
                return neg_inf();
        return f_(face);
    }

    // V(S): expectation over the 2^n uniform corners of the score of the
    // posterior-mean report. Exact: a power-of-two pairwise sum of halves.
    double value(std::uint64_t mask) const {
        const double w = std::ldexp(1.0, -n_);
        std::vector<double> terms;
        terms.reserve(1ull << n_);
        for (std::uint64_t corner = 0; corner < (1ull << n_); ++corner) {
            const auto mu = posterior_mean(mask, corner);
            terms.push_back(weighted_term(w, score(mu, corner)));
        }
        return pairwise_sum(terms);
    }

    SetFunction value_oracle() const {
        return [this](std::uint64_t mask) { return value(mask); };
    }

  private:
    void check_monotone(std::uint64_t s, int i) const {
        if (f_(s) > f_(s | (1ull << i)) + kProbTol)
            throw InvalidInput("reduction: set function is not monotone");
    }

    SetFunction f_;
    int n_;
};

inline ReducedInstance reduce_from_set_function(SetFunction f, int n) {
    return ReducedInstance(std::move(f), n);
}

// Submodularity of a set function directly (diminishing marginal returns),
// matching the weak-substitutes inequality on the subsets lattice.
inline bool is_submodular_setfn(const SetFunction& f, int n, double tol = kValueTol) {
    for (std::uint64_t s = 0; s < (1ull << n); ++s) {
        for (int i = 0; i < n; ++i) {
            if (s & (1ull << i)) continue;
            const double rhs = f(s | (1ull << i)) - f(s);
            for (std::uint64_t sp = (s - 1) & s;; sp = (sp - 1) & s) {
                if (sp == s) break;
                if (f(sp | (1ull << i)) - f(sp) < rhs - tol) return false;
                if (sp == 0) break;
            }
        }
    }
    return true;
}

// Planted supermodular instance: f is 0 on all small sets except a hidden
// size-k set worth 0.5, then grows linearly. Greedy almost never finds it.
class HardnessOracle {
  public:
    HardnessOracle(int n, int k, std::uint64_t seed) : n_(n), k_(k) {
        Rng rng(seed);
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int j = 0; j < k; ++j) s_star_ |= 1ull << idx[j];
    }

    double operator()(std::uint64_t s) const {
        ++queries_;
        const int size = std::popcount(s);
        if (size > k_) return static_cast<double>(size - k_);
        return s == s_star_ ? 0.5 : 0.0;
    }

    SetFunction as_function() const {
        return [this](std::uint64_t s) { return (*this)(s); };
    }

    std::uint64_t planted() const { return s_star_; }
    std::size_t queries() const { return queries_; }

  private:
    int n_;
    int k_;
    std::uint64_t s_star_ = 0;
    mutable std::size_t queries_ = 0;
};

inline HardnessOracle supermodular_hardness_instance(int n, int k, std::uint64_t seed) {
    return HardnessOracle(n, k, seed);
}

}  // namespace infosubs
