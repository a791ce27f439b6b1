#pragma once

// Decision problems represented through their convex expected-score function G
// on distributions over E. Scoring rules, Bregman divergences, and generalized
// entropies all derive from G.

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "infosubs/common.hpp"

namespace infosubs {

struct DecisionProblem {
    std::vector<std::string> decisions;
    std::vector<std::vector<double>> utility;  // rows by decision, cols by E-outcome

    DecisionProblem(std::vector<std::string> d, std::vector<std::vector<double>> u)
        : decisions(std::move(d)), utility(std::move(u)) {
        if (decisions.empty() || utility.size() != decisions.size())
            throw InvalidInput("decision problem: need one utility row per decision");
        for (const auto& row : utility) {
            if (row.size() != utility.front().size() || row.empty())
                throw InvalidInput("decision problem: ragged utility matrix");
            for (double x : row)
                if (!std::isfinite(x)) throw InvalidInput("decision problem: non-finite utility");
        }
    }

    int num_events() const { return static_cast<int>(utility.front().size()); }

    // Argmax decision for belief q, ties broken by lowest index.
    int best_decision(std::span<const double> q) const {
        int best = 0;
        double best_val = neg_inf();
        for (int d = 0; d < static_cast<int>(decisions.size()); ++d) {
            double v = 0.0;
            for (int e = 0; e < num_events(); ++e) v += q[e] * utility[d][e];
            if (v > best_val + kProbTol) {
                best_val = v;
                best = d;
            }
        }
        return best;
    }
};

class ExpectedScoreFunction {
  public:
    struct Impl {
        virtual ~Impl() = default;
        virtual std::string kind() const = 0;
        virtual int num_events() const = 0;
        virtual double value(std::span<const double> q) const = 0;
        virtual std::vector<double> subgradient(std::span<const double> q) const = 0;
        // S(q_hat, e) = G(q_hat) + <G'(q_hat), delta_e - q_hat>.
        virtual double score(std::span<const double> q_hat, int e) const {
            const auto g = subgradient(q_hat);
            double s = value(q_hat);
            for (int x = 0; x < num_events(); ++x) {
                double coeff = (x == e ? 1.0 : 0.0) - q_hat[x];
                s += weighted_term(coeff, g[x]);
            }
            return s;
        }
    };

    explicit ExpectedScoreFunction(std::shared_ptr<const Impl> impl, bool probe = true)
        : impl_(std::move(impl)) {
        if (probe) probe_convexity();
    }

    const std::string kind() const { return impl_->kind(); }
    int num_events() const { return impl_->num_events(); }
    double value(std::span<const double> q) const { return impl_->value(q); }
    std::vector<double> subgradient(std::span<const double> q) const { return impl_->subgradient(q); }
    double score(std::span<const double> q_hat, int e) const { return impl_->score(q_hat, e); }
    const Impl& impl() const { return *impl_; }

  private:
    // Random-chord probe: convexity of G and support of the chosen subgradient.
    void probe_convexity() const {
        Rng rng(0x5eedf00dULL);
        std::exponential_distribution<double> exp1(1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const int k = num_events();
        auto sample = [&] {
            std::vector<double> q(k);
            double total = 0.0;
            for (double& x : q) total += (x = exp1(rng) + 1e-6);
            for (double& x : q) x /= total;
            return q;
        };
        for (int it = 0; it < 1000; ++it) {
            auto p = sample();
            auto q = sample();
            double lam = unif(rng);
            std::vector<double> mid(k);
            for (int x = 0; x < k; ++x) mid[x] = lam * p[x] + (1 - lam) * q[x];
            if (value(mid) > lam * value(p) + (1 - lam) * value(q) + 1e-9)
                throw InvalidInput("expected score function failed convexity probe (" + kind() + ")");
            auto g = subgradient(q);
            double support = value(q);
            for (int x = 0; x < k; ++x) support += weighted_term(p[x] - q[x], g[x]);
            if (support > value(p) + 1e-9)
                throw InvalidInput("expected score function failed subgradient probe (" + kind() + ")");
        }
    }

    std::shared_ptr<const Impl> impl_;
};

namespace detail {

class PiecewiseMaxImpl final : public ExpectedScoreFunction::Impl {
  public:
    PiecewiseMaxImpl(DecisionProblem dp, std::string kind)
        : dp_(std::move(dp)), kind_(std::move(kind)) {}

    std::string kind() const override { return kind_; }
    int num_events() const override { return dp_.num_events(); }

    double value(std::span<const double> q) const override {
        double best = neg_inf();
        for (const auto& row : dp_.utility) {
            double v = 0.0;
            for (int e = 0; e < num_events(); ++e) v += q[e] * row[e];
            best = std::max(best, v);
        }
        return best;
    }

    // Active row of lowest index.
    std::vector<double> subgradient(std::span<const double> q) const override {
        return dp_.utility[dp_.best_decision(q)];
    }

    double score(std::span<const double> q_hat, int e) const override {
        return dp_.utility[dp_.best_decision(q_hat)][e];
    }

    const DecisionProblem& problem() const { return dp_; }

  private:
    DecisionProblem dp_;
    std::string kind_;
};

class LogRuleImpl final : public ExpectedScoreFunction::Impl {
  public:
    explicit LogRuleImpl(int num_events) : k_(num_events) {}

    std::string kind() const override { return "log"; }
    int num_events() const override { return k_; }

    // G(q) = sum_e q(e) log2 q(e), with 0 log 0 := 0.
    double value(std::span<const double> q) const override {
        double v = 0.0;
        for (int e = 0; e < k_; ++e)
            if (q[e] > 0.0) v += q[e] * std::log2(q[e]);
        return v;
    }

    // Coordinates with q(e) = 0 carry -inf; never dotted against positive mass on-path.
    std::vector<double> subgradient(std::span<const double> q) const override {
        std::vector<double> g(k_);
        constexpr double inv_ln2 = 1.4426950408889634;
        for (int e = 0; e < k_; ++e)
            g[e] = (q[e] > 0.0) ? std::log2(q[e]) + inv_ln2 : neg_inf();
        return g;
    }

    double score(std::span<const double> q_hat, int e) const override {
        return log2_safe(q_hat[e]);
    }

  private:
    int k_;
};

class QuadraticRuleImpl final : public ExpectedScoreFunction::Impl {
  public:
    explicit QuadraticRuleImpl(int num_events) : k_(num_events) {}

    std::string kind() const override { return "quadratic"; }
    int num_events() const override { return k_; }

    double value(std::span<const double> q) const override {
        double v = 0.0;
        for (int e = 0; e < k_; ++e) v += q[e] * q[e];
        return v;
    }

    std::vector<double> subgradient(std::span<const double> q) const override {
        std::vector<double> g(k_);
        for (int e = 0; e < k_; ++e) g[e] = 2.0 * q[e];
        return g;
    }

    // S(q_hat, e) = 2 q_hat(e) - ||q_hat||^2.
    double score(std::span<const double> q_hat, int e) const override {
        return 2.0 * q_hat[e] - value(q_hat);
    }

  private:
    int k_;
};

}  // namespace detail

inline ExpectedScoreFunction log_rule(int num_events) {
    return ExpectedScoreFunction(std::make_shared<detail::LogRuleImpl>(num_events));
}

inline ExpectedScoreFunction quadratic_rule(int num_events) {
    return ExpectedScoreFunction(std::make_shared<detail::QuadraticRuleImpl>(num_events));
}

// Revelation principle: G(q) = max_d <q, u_d> with the induced score u(d*_q, e).
inline ExpectedScoreFunction revelation(DecisionProblem dp) {
    return ExpectedScoreFunction(
        std::make_shared<detail::PiecewiseMaxImpl>(std::move(dp), "piecewise-max"));
}

// Convex piecewise-linear in Pr[E=1] given by polyline breakpoints spanning [0,1];
// each segment becomes a utility row, so kink ties resolve to the left segment.
inline ExpectedScoreFunction custom1d(const std::vector<std::pair<double, double>>& breakpoints) {
    if (breakpoints.size() < 2 || breakpoints.front().first != 0.0 ||
        breakpoints.back().first != 1.0)
        throw InvalidInput("custom1d: breakpoints must span x = 0 .. 1");
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        auto [x0, y0] = breakpoints[i];
        auto [x1, y1] = breakpoints[i + 1];
        if (!(x1 > x0)) throw InvalidInput("custom1d: breakpoints must be strictly increasing in x");
        double slope = (y1 - y0) / (x1 - x0);
        if (!rows.empty()) {
            const double prev_slope = rows.back()[1] - rows.back()[0];
            if (slope < prev_slope - kProbTol)
                throw InvalidInput("custom1d: polyline is not convex");
        }
        double intercept = y0 - slope * x0;
        labels.push_back("seg" + std::to_string(i));
        rows.push_back({intercept, intercept + slope});
    }
    return ExpectedScoreFunction(std::make_shared<detail::PiecewiseMaxImpl>(
        DecisionProblem(std::move(labels), std::move(rows)), "custom1d"));
}

inline double expected_score(const ExpectedScoreFunction& g, std::span<const double> q_hat,
                             std::span<const double> belief) {
    double s = 0.0;
    for (int e = 0; e < g.num_events(); ++e)
        s += weighted_term(belief[e], g.score(q_hat, e));
    return s;
}

// D_G(p, q) = G(p) - G(q) - <G'(q), p - q>; may be +inf for the log rule.
inline double bregman(const ExpectedScoreFunction& g, std::span<const double> p,
                      std::span<const double> q) {
    double lin = expected_score(g, q, p);  // S(q; p)
    if (lin == neg_inf()) return pos_inf();
    return g.value(p) - lin;
}

inline double entropy(const ExpectedScoreFunction& g, std::span<const double> q) {
    return -g.value(q);
}

// Guess-the-outcome problem: one decision per outcome, reward 1 for correctness.
inline DecisionProblem guess_event_problem(int num_events) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    for (int d = 0; d < num_events; ++d) {
        labels.push_back("guess" + std::to_string(d));
        std::vector<double> row(num_events, 0.0);
        row[d] = 1.0;
        rows.push_back(std::move(row));
    }
    return DecisionProblem(std::move(labels), std::move(rows));
}

// Predict both components of a paired bit event indexed e = 2*eb + ec;
// one of the components is worth 1 + eps points.
inline DecisionProblem pair_problem(double eps, bool first_weighted) {
    const double wb = first_weighted ? 1.0 + eps : 1.0;
    const double wc = first_weighted ? 1.0 : 1.0 + eps;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    for (int db = 0; db < 2; ++db)
        for (int dc = 0; dc < 2; ++dc) {
            labels.push_back(std::to_string(db) + std::to_string(dc));
            std::vector<double> row(4);
            for (int eb = 0; eb < 2; ++eb)
                for (int ec = 0; ec < 2; ++ec)
                    row[2 * eb + ec] = wb * (db == eb) + wc * (dc == ec);
            rows.push_back(std::move(row));
        }
    return DecisionProblem(std::move(labels), std::move(rows));
}

}  // namespace infosubs
