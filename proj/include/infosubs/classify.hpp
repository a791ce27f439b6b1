#pragma once

// Substitutes / complements classification at the weak, moderate, and strong
// levels, plus the structural tests (triviality, complement geometry, joint
// convexity of the divergence, separating decision problems, log-rule CI).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infosubs/fixtures.hpp"
#include "infosubs/value.hpp"

namespace infosubs {

enum class Mode { kSubstitutes, kComplements };

inline std::string to_string(Mode m) {
    return m == Mode::kSubstitutes ? "substitutes" : "complements";
}

// One compared triple: lhs = V(A' v B) - V(A'), rhs = V(A v B) - V(A).
// Substitutes require lhs >= rhs, complements the reverse.
struct Triple {
    Partition a_prime;
    Partition a;
    Partition b;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ModeResult {
    bool holds = true;
    std::string strictness = "non-strict";  // strict | somewhat-strict | non-strict
    std::vector<Triple> witnesses;          // violations if !holds, strict certifiers if holds
};

struct ClassificationReport {
    std::string level;
    ModeResult substitutes;
    ModeResult complements;
    double tolerance = kValueTol;
    bool bounded_enumeration = false;
};

namespace detail {

constexpr std::size_t kWitnessCap = 16;

class ModeAccumulator {
  public:
    explicit ModeAccumulator(Mode mode, double tol) : mode_(mode), tol_(tol) {}

    void add(const Triple& t, bool count_for_strictness) {
        const double slack =
            mode_ == Mode::kSubstitutes ? t.lhs - t.rhs : t.rhs - t.lhs;
        if (slack < -tol_) {
            result_.holds = false;
            if (violations_.size() < kWitnessCap) violations_.push_back(t);
        } else if (count_for_strictness) {
            if (slack > tol_) {
                any_strict_ = true;
                if (certifiers_.size() < kWitnessCap) certifiers_.push_back(t);
            } else {
                all_strict_ = false;
            }
        }
        if (count_for_strictness) seen_comparison_ = true;
    }

    ModeResult finish() {
        if (!result_.holds) {
            result_.strictness = "non-strict";
            result_.witnesses = violations_;
        } else {
            if (seen_comparison_ && all_strict_ && any_strict_)
                result_.strictness = "strict";
            else if (any_strict_)
                result_.strictness = "somewhat-strict";
            else
                result_.strictness = "non-strict";
            result_.witnesses = certifiers_;
        }
        return result_;
    }

  private:
    Mode mode_;
    double tol_;
    ModeResult result_;
    std::vector<Triple> violations_;
    std::vector<Triple> certifiers_;
    bool any_strict_ = false;
    bool all_strict_ = true;
    bool seen_comparison_ = false;
};

struct PartitionCellsLess {
    bool operator()(const Partition& a, const Partition& b) const {
        return a.cells() < b.cells();
    }
};

class ValueMemo {
  public:
    explicit ValueMemo(const ValueContext& ctx) : ctx_(ctx) {}

    double operator()(const Partition& p) {
        auto it = memo_.find(p);
        if (it != memo_.end()) return it->second;
        const double v = value_exact(ctx_, p);
        memo_.emplace(p, v);
        return v;
    }

  private:
    const ValueContext& ctx_;
    std::map<Partition, double, PartitionCellsLess> memo_;
};

// True iff q refines r (every cell of q lies inside a cell of r), i.e. r <= q
// on the information ordering.
inline bool refines(const Partition& q, const Partition& r) {
    for (const auto& cell : q.cells()) {
        const int target = r.cell_of(cell.front());
        for (int g : cell)
            if (r.cell_of(g) != target) return false;
    }
    return true;
}

}  // namespace detail

// Weak level: for all S' subset of S, i outside S, compare the marginal of
// signal i given S against the marginal given S'.
inline ClassificationReport classify_weak(const ValueContext& ctx, double tol = kValueTol,
                                          int signal_cap = 10) {
    const int n = ctx.structure.num_signals();
    if (n > signal_cap)
        throw CapExceeded("classify_weak: " + std::to_string(n) + " signals exceeds cap " +
                          std::to_string(signal_cap));
    std::vector<double> v(1ull << n);
    std::vector<Partition> parts;
    parts.reserve(1ull << n);
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        parts.push_back(subset_signal(ctx.structure, mask));
        v[mask] = value_exact(ctx, parts.back());
    }
    detail::ModeAccumulator subs(Mode::kSubstitutes, tol);
    detail::ModeAccumulator comps(Mode::kComplements, tol);
    for (std::uint64_t s = 0; s < (1ull << n); ++s) {
        for (int i = 0; i < n; ++i) {
            if (s & (1ull << i)) continue;
            const double rhs = v[s | (1ull << i)] - v[s];
            // Proper submasks of s.
            for (std::uint64_t sp = (s - 1) & s;; sp = (sp - 1) & s) {
                if (sp == s) break;  // unreachable guard for s == 0 handled below
                Triple t{parts[sp], parts[s], parts[1ull << i],
                         v[sp | (1ull << i)] - v[sp], rhs};
                subs.add(t, true);
                comps.add(t, true);
                if (sp == 0) break;
            }
        }
    }
    ClassificationReport rep;
    rep.level = "weak";
    rep.tolerance = tol;
    rep.substitutes = subs.finish();
    rep.complements = comps.finish();
    return rep;
}

namespace detail {

// Moderate-level weakenings of a signal subset: joins of one coarsening per
// member signal (a deterministic function applied to each signal separately).
template <typename Fn>
void for_each_signalwise_coarsening(const InformationStructure& s, std::uint64_t mask,
                                    int cell_cap, Fn&& fn) {
    std::vector<std::vector<Partition>> options;
    for (int i = 0; i < s.num_signals(); ++i) {
        if (!(mask & (1ull << i))) continue;
        options.push_back(enumerate_coarsenings(subset_signal(s, std::uint64_t{1} << i),
                                                cell_cap));
    }
    const Partition bottom = subset_signal(s, std::uint64_t{0});
    std::function<void(std::size_t, const Partition&)> rec =
        [&](std::size_t idx, const Partition& acc) {
            if (idx == options.size()) {
                fn(acc);
                return;
            }
            for (const Partition& choice : options[idx]) rec(idx + 1, join(acc, choice));
        };
    rec(0, bottom);
}

}  // namespace detail

// Moderate level: A' ranges over joins of per-signal coarsenings of A's member
// signals (deterministic functions of each signal). With
// require_meet_lower_bound only weakenings refining A ^ B are compared.
inline ClassificationReport classify_moderate(const ValueContext& ctx, double tol = kValueTol,
                                              int coarsening_cell_cap = 12,
                                              bool require_meet_lower_bound = false) {
    const int n = ctx.structure.num_signals();
    if (n > 10) throw CapExceeded("classify_moderate: too many signals");
    detail::ValueMemo value(ctx);
    detail::ModeAccumulator subs(Mode::kSubstitutes, tol);
    detail::ModeAccumulator comps(Mode::kComplements, tol);
    bool bounded = false;

    std::vector<Partition> parts;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask)
        parts.push_back(subset_signal(ctx.structure, mask));

    for (std::uint64_t am = 0; am < (1ull << n); ++am) {
        const Partition& a = parts[am];
        const double va = value(a);
        try {
            detail::for_each_signalwise_coarsening(
                ctx.structure, am, coarsening_cell_cap, [&](const Partition& ap) {
                    const bool proper = !(ap == a);
                    const double vap = value(ap);
                    for (std::uint64_t bm = 0; bm < (1ull << n); ++bm) {
                        // B nonempty and disjoint from A, as at the weak level.
                        if (bm == 0 || (bm & am)) continue;
                        const Partition& b = parts[bm];
                        if (require_meet_lower_bound && !detail::refines(ap, meet(a, b)))
                            continue;
                        Triple t{ap, a, b, value(join(ap, b)) - vap, value(join(a, b)) - va};
                        subs.add(t, proper);
                        comps.add(t, proper);
                    }
                });
        } catch (const CapExceeded&) {
            bounded = true;
        }
    }
    ClassificationReport rep;
    rep.level = "moderate";
    rep.tolerance = tol;
    rep.substitutes = subs.finish();
    rep.complements = comps.finish();
    rep.bounded_enumeration = bounded;
    return rep;
}

struct StrongWitness {
    Garbling garbling;       // randomized coarsening A' of A
    std::uint64_t a_mask = 0;
    std::uint64_t b_mask = 0;
    double margin = 0.0;     // size of the inequality violation
};

namespace detail {

inline double strong_violation(const ValueContext& ctx, Mode mode, const Garbling& garb,
                               const Partition& a, const Partition& b, double va,
                               double vab) {
    const double lhs = value_garbled(ctx, garb, b) - value_garbled(ctx, garb);
    const double rhs = vab - va;
    return mode == Mode::kSubstitutes ? rhs - lhs : lhs - rhs;
}

}  // namespace detail

// Randomized-coarsening search for a violation of the strong inequality.
// Finding nothing is not a certificate; the continuous lattice is infinite.
inline std::optional<StrongWitness> refute_strong(const ValueContext& ctx, Mode mode,
                                                  int budget, std::uint64_t seed,
                                                  double tol = kValueTol) {
    const int n = ctx.structure.num_signals();
    std::vector<Partition> parts;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask)
        parts.push_back(subset_signal(ctx.structure, mask));
    std::vector<double> v(parts.size());
    for (std::size_t m = 0; m < parts.size(); ++m) v[m] = value_exact(ctx, parts[m]);

    std::optional<StrongWitness> best;
    auto consider = [&](const Garbling& garb, std::uint64_t am, std::uint64_t bm) {
        const double margin = detail::strong_violation(
            ctx, mode, garb, parts[am], parts[bm], v[am], v[am | bm]);
        if (margin > tol && (!best || margin > best->margin))
            best = StrongWitness{garb, am, bm, margin};
        return margin;
    };

    // Deterministic coarsenings first: any weak or moderate violation witness
    // is already a degenerate garbling.
    for (std::uint64_t am = 1; am < parts.size(); ++am) {
        if (parts[am].num_cells() < 2 || parts[am].num_cells() > 10) continue;
        for (const Partition& ap : enumerate_coarsenings(parts[am])) {
            const int k = parts[am].num_cells();
            std::vector<std::vector<double>> mat(k, std::vector<double>(ap.num_cells(), 0.0));
            for (int c = 0; c < k; ++c)
                mat[c][ap.cell_of(parts[am].cells()[c].front())] = 1.0;
            Garbling garb(parts[am], std::move(mat));
            for (std::uint64_t bm = 1; bm < parts.size(); ++bm) consider(garb, am, bm);
        }
    }

    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> exp1(1.0);
    for (int restart = 0; restart < budget; ++restart) {
        std::uint64_t am = 1 + rng() % (parts.size() - 1);
        if (parts[am].num_cells() < 2) continue;
        std::uint64_t bm = 1 + rng() % (parts.size() - 1);
        const int rows = parts[am].num_cells();
        const int cols = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(rows));
        std::vector<std::vector<double>> mat(rows, std::vector<double>(cols));
        for (auto& row : mat) {
            double total = 0.0;
            for (double& x : row) total += (x = exp1(rng) + 1e-9);
            for (double& x : row) x /= total;
        }
        double cur = consider(Garbling(parts[am], mat), am, bm);
        double step = 0.25;
        for (int iter = 0; iter < 120; ++iter) {
            const int r = static_cast<int>(rng() % static_cast<std::uint64_t>(rows));
            const int cf = static_cast<int>(rng() % static_cast<std::uint64_t>(cols));
            const int ct = static_cast<int>(rng() % static_cast<std::uint64_t>(cols));
            if (cf == ct || mat[r][cf] <= 0.0) continue;
            const double t = std::min(mat[r][cf], step * unif(rng));
            mat[r][cf] -= t;
            mat[r][ct] += t;
            const double cand = consider(Garbling(parts[am], mat), am, bm);
            if (cand > cur) {
                cur = cand;
            } else {
                mat[r][cf] += t;
                mat[r][ct] -= t;
                step = std::max(0.01, step * 0.97);
            }
        }
    }
    return best;
}

struct PointwiseWitness {
    std::vector<int> s_prime;       // signal indices of the coarser subset
    std::vector<int> s;             // signal indices of the finer subset
    std::vector<int> realization;   // observed outcome per signal in s
    std::uint64_t b_mask = 0;
    double lhs = 0.0;               // marginal of B after observing s'
    double rhs = 0.0;               // marginal of B after observing s
};

struct PointwiseReport {
    bool holds = true;
    std::vector<PointwiseWitness> witnesses;
    double tolerance = kValueTol;
};

namespace detail {

inline InformationStructure condition_on(const InformationStructure& s,
                                         const std::vector<int>& subset,
                                         const std::vector<int>& outcomes) {
    std::vector<PriorEntry> prior;
    double total = 0.0;
    for (const auto& entry : s.prior()) {
        bool agrees = true;
        for (std::size_t j = 0; j < subset.size(); ++j)
            if (entry.a[subset[j]] != outcomes[j]) { agrees = false; break; }
        if (!agrees) continue;
        prior.push_back(entry);
        total += entry.p;
    }
    for (auto& entry : prior) entry.p /= total;
    return InformationStructure(s.event_outcomes(), s.signals(), prior);
}

}  // namespace detail

// Pointwise weak substitutes: conditioning on more information never raises
// the unconditional marginal of any subset B.
inline PointwiseReport check_pointwise_substitutes(const ValueContext& ctx,
                                                   double tol = kValueTol) {
    const int n = ctx.structure.num_signals();
    PointwiseReport rep;
    rep.tolerance = tol;
    for (std::uint64_t sm = 0; sm < (1ull << n); ++sm) {
        std::vector<int> s_idx;
        for (int i = 0; i < n; ++i)
            if (sm & (1ull << i)) s_idx.push_back(i);
        // Realizations of S present in the support.
        std::vector<std::vector<int>> seen;
        for (const auto& tuple : ctx.structure.support()) {
            std::vector<int> key;
            for (int i : s_idx) key.push_back(tuple[i]);
            if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
        }
        for (const auto& realization : seen) {
            const InformationStructure cond =
                detail::condition_on(ctx.structure, s_idx, realization);
            const ValueContext cond_ctx(cond, ctx.g);
            for (std::uint64_t spm = (sm - 1) & sm;; spm = (spm - 1) & sm) {
                if (sm == 0 && spm != 0) break;
                std::vector<int> sp_idx;
                std::vector<int> sp_real;
                for (std::size_t j = 0; j < s_idx.size(); ++j)
                    if (spm & (1ull << s_idx[j])) {
                        sp_idx.push_back(s_idx[j]);
                        sp_real.push_back(realization[j]);
                    }
                const InformationStructure cond_p =
                    detail::condition_on(ctx.structure, sp_idx, sp_real);
                const ValueContext cond_p_ctx(cond_p, ctx.g);
                for (std::uint64_t bm = 1; bm < (1ull << n); ++bm) {
                    const double rhs = value_subset(cond_ctx, bm) - value_subset(cond_ctx, 0);
                    const double lhs =
                        value_subset(cond_p_ctx, bm) - value_subset(cond_p_ctx, 0);
                    if (lhs < rhs - tol) {
                        rep.holds = false;
                        if (rep.witnesses.size() < detail::kWitnessCap)
                            rep.witnesses.push_back(
                                {sp_idx, s_idx, realization, bm, lhs, rhs});
                    }
                }
                if (spm == 0) break;
            }
        }
    }
    return rep;
}

// Triviality: substitutes when each single signal already induces the full
// posterior; complements when dropping any one signal reveals nothing.
inline std::string check_trivial(const InformationStructure& s, double tol = kValueTol) {
    const int n = s.num_signals();
    const Partition top = subset_signal(s, (1ull << n) - 1);
    auto posterior_of = [&](const Partition& p, int element) {
        return posterior(s, p, p.cell_of(element)).dist;
    };
    auto close = [&](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t e = 0; e < x.size(); ++e)
            if (std::fabs(x[e] - y[e]) > tol) return false;
        return true;
    };

    bool subs = true;
    for (int i = 0; i < n && subs; ++i) {
        const Partition single = subset_signal(s, std::vector<int>{i});
        for (int g = 0; g < s.support_size() && subs; ++g)
            subs = close(posterior_of(single, g), posterior_of(top, g));
    }
    if (subs) return "trivial-substitutes";

    const std::vector<double> prior = s.prior_on_event();
    bool comps = true;
    for (int i = 0; i < n && comps; ++i) {
        std::vector<int> rest;
        for (int j = 0; j < n; ++j)
            if (j != i) rest.push_back(j);
        const Partition others = subset_signal(s, rest);
        for (int g = 0; g < s.support_size() && comps; ++g)
            comps = close(posterior_of(others, g), prior);
    }
    return comps ? "trivial-complements" : "neither";
}

struct GeometricReport {
    bool universal_complements = false;
    double r = 0.0;          // max single-signal posterior distance from the prior
    double min_joint = 0.0;  // min two-signal posterior distance from the prior
};

// Two binary-relevant signals are universal moderate complements when every
// single-signal posterior stays within r of the prior while every joint
// posterior moves at least 2r away.
inline GeometricReport universal_complements_geometric(const InformationStructure& s,
                                                       double tol = kValueTol) {
    if (s.num_events() != 2 || s.num_signals() != 2)
        throw InvalidInput("universal_complements_geometric: needs binary E and two signals");
    const std::vector<double> prior = s.prior_on_event();
    auto dist = [&](const std::vector<double>& q) {
        double d = 0.0;
        for (int e = 0; e < 2; ++e) d = std::max(d, std::fabs(q[e] - prior[e]));
        return d;
    };
    GeometricReport rep;
    for (int i = 0; i < 2; ++i) {
        const Partition p = subset_signal(s, std::vector<int>{i});
        for (int c = 0; c < p.num_cells(); ++c)
            rep.r = std::max(rep.r, dist(posterior(s, p, c).dist));
    }
    const Partition joint = subset_signal(s, std::vector<int>{0, 1});
    rep.min_joint = pos_inf();
    for (int c = 0; c < joint.num_cells(); ++c)
        rep.min_joint = std::min(rep.min_joint, dist(posterior(s, joint, c).dist));
    rep.universal_complements = rep.min_joint >= 2.0 * rep.r - tol;
    return rep;
}

struct JointConvexityReport {
    bool jointly_convex = true;
    double worst_violation = 0.0;
    std::vector<double> p1, q1, p2, q2;
    double lambda = 0.0;
};

// Samples chords in (p, q) pairs space and checks convexity of D_G jointly in
// both arguments.
inline JointConvexityReport probe_joint_convexity(const ExpectedScoreFunction& g,
                                                  int sample_count, std::uint64_t seed,
                                                  double tol = kValueTol) {
    Rng rng(seed);
    std::exponential_distribution<double> exp1(1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int k = g.num_events();
    auto sample = [&] {
        std::vector<double> q(k);
        double total = 0.0;
        for (double& x : q) total += (x = exp1(rng) + 1e-6);
        for (double& x : q) x /= total;
        return q;
    };
    JointConvexityReport rep;
    for (int it = 0; it < sample_count; ++it) {
        auto p1 = sample(), q1 = sample(), p2 = sample(), q2 = sample();
        const double lam = unif(rng);
        std::vector<double> pm(k), qm(k);
        for (int e = 0; e < k; ++e) {
            pm[e] = lam * p1[e] + (1 - lam) * p2[e];
            qm[e] = lam * q1[e] + (1 - lam) * q2[e];
        }
        const double d1 = bregman(g, p1, q1), d2 = bregman(g, p2, q2);
        const double dm = bregman(g, pm, qm);
        if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(dm)) continue;
        const double violation = dm - (lam * d1 + (1 - lam) * d2);
        if (violation > tol && violation > rep.worst_violation) {
            rep.jointly_convex = false;
            rep.worst_violation = violation;
            rep.p1 = p1;
            rep.q1 = q1;
            rep.p2 = p2;
            rep.q2 = q2;
            rep.lambda = lam;
        }
    }
    return rep;
}

namespace detail {

// Exact Euclidean distance to the convex hull of a small point set by
// enumerating candidate supporting faces and projecting onto each affine hull.
class HullDistance {
  public:
    HullDistance(std::vector<std::vector<double>> points, int dim)
        : points_(std::move(points)), dim_(dim) {
        if (points_.empty()) throw InvalidInput("hull distance: no points");
        if (points_.size() > 20) throw InvalidInput("hull distance: too many points");
    }

    double operator()(std::span<const double> q, std::vector<double>* proj_out = nullptr) const {
        const int m = static_cast<int>(points_.size());
        const int max_face = std::min(m, dim_ + 1);
        double best = pos_inf();
        std::vector<double> best_proj;
        std::vector<int> face;
        std::function<void(int)> rec = [&](int start) {
            if (!face.empty() && static_cast<int>(face.size()) <= max_face) {
                std::vector<double> lambda;
                if (project(face, q, lambda)) {
                    std::vector<double> proj(dim_, 0.0);
                    for (std::size_t j = 0; j < face.size(); ++j)
                        for (int e = 0; e < dim_; ++e)
                            proj[e] += lambda[j] * points_[face[j]][e];
                    double d2 = 0.0;
                    for (int e = 0; e < dim_; ++e) d2 += (q[e] - proj[e]) * (q[e] - proj[e]);
                    if (d2 < best) {
                        best = d2;
                        best_proj = proj;
                    }
                }
            }
            if (static_cast<int>(face.size()) == max_face) return;
            for (int i = start; i < m; ++i) {
                face.push_back(i);
                rec(i + 1);
                face.pop_back();
            }
        };
        rec(0);
        if (proj_out) *proj_out = best_proj;
        return std::sqrt(std::max(0.0, best));
    }

  private:
    // Minimize ||q - X lambda|| subject to sum lambda = 1, then require
    // lambda >= 0 for the projection to land inside the face.
    bool project(const std::vector<int>& face, std::span<const double> q,
                 std::vector<double>& lambda) const {
        const int f = static_cast<int>(face.size());
        const int n = f + 1;
        std::vector<std::vector<double>> mat(n, std::vector<double>(n + 1, 0.0));
        for (int i = 0; i < f; ++i) {
            for (int j = 0; j < f; ++j) {
                double dot = 0.0;
                for (int e = 0; e < dim_; ++e)
                    dot += points_[face[i]][e] * points_[face[j]][e];
                mat[i][j] = 2.0 * dot;
            }
            mat[i][f] = 1.0;
            double rhs = 0.0;
            for (int e = 0; e < dim_; ++e) rhs += points_[face[i]][e] * q[e];
            mat[i][n] = 2.0 * rhs;
        }
        for (int j = 0; j < f; ++j) mat[f][j] = 1.0;
        mat[f][n] = 1.0;
        // Gaussian elimination with partial pivoting.
        for (int col = 0; col < n; ++col) {
            int pivot = col;
            for (int row = col + 1; row < n; ++row)
                if (std::fabs(mat[row][col]) > std::fabs(mat[pivot][col])) pivot = row;
            if (std::fabs(mat[pivot][col]) < 1e-12) return false;
            std::swap(mat[col], mat[pivot]);
            for (int row = 0; row < n; ++row) {
                if (row == col) continue;
                const double factor = mat[row][col] / mat[col][col];
                for (int c = col; c <= n; ++c) mat[row][c] -= factor * mat[col][c];
            }
        }
        lambda.assign(f, 0.0);
        for (int i = 0; i < f; ++i) {
            lambda[i] = mat[i][n] / mat[i][i];
            if (lambda[i] < -1e-9) return false;
        }
        return true;
    }

    std::vector<std::vector<double>> points_;
    int dim_;
};

class HullDistanceImpl final : public ExpectedScoreFunction::Impl {
  public:
    HullDistanceImpl(std::vector<std::vector<double>> points, int dim)
        : hull_(std::move(points), dim), dim_(dim) {}

    std::string kind() const override { return "hull-distance"; }
    int num_events() const override { return dim_; }

    double value(std::span<const double> q) const override { return hull_(q); }

    std::vector<double> subgradient(std::span<const double> q) const override {
        std::vector<double> proj;
        const double d = hull_(q, &proj);
        std::vector<double> g(dim_, 0.0);
        if (d > 1e-12)
            for (int e = 0; e < dim_; ++e) g[e] = (q[e] - proj[e]) / d;
        return g;
    }

  private:
    HullDistance hull_;
    int dim_;
};

}  // namespace detail

struct SeparatingResult {
    std::optional<ExpectedScoreFunction> g;
    std::string refusal;  // non-empty iff no separating problem exists
    Triple witness;       // a strictly increasing marginal under the returned g
};

// G(q) = distance from q to the convex hull of single-signal posteriors. Under
// this G single signals are worthless while some joint realization is not, so
// some marginal strictly increases. Refuses when every multi-signal posterior
// stays inside the hull.
inline SeparatingResult separating_decision_problem(const InformationStructure& s,
                                                    double tol = kValueTol) {
    const int n = s.num_signals();
    const int k = s.num_events();
    std::vector<std::vector<double>> points;
    for (int i = 0; i < n; ++i) {
        const Partition p = subset_signal(s, std::vector<int>{i});
        for (int c = 0; c < p.num_cells(); ++c) points.push_back(posterior(s, p, c).dist);
    }
    detail::HullDistance hull(points, k);

    bool escapes = false;
    for (std::uint64_t mask = 1; mask < (1ull << n) && !escapes; ++mask) {
        if (std::popcount(mask) < 2) continue;
        const Partition p = subset_signal(s, mask);
        for (int c = 0; c < p.num_cells() && !escapes; ++c)
            escapes = hull(posterior(s, p, c).dist) > tol;
    }
    SeparatingResult out;
    if (!escapes) {
        out.refusal =
            "all multi-signal posteriors lie in the hull of single-signal posteriors "
            "(somewhat-trivial substitutes)";
        return out;
    }

    ExpectedScoreFunction g(std::make_shared<detail::HullDistanceImpl>(points, k));
    const ValueContext ctx(s, g);
    const ClassificationReport weak = classify_weak(ctx, tol);
    if (weak.substitutes.holds || weak.substitutes.witnesses.empty()) {
        out.refusal = "no strictly increasing marginal found under the hull-distance problem";
        return out;
    }
    out.g = g;
    out.witness = weak.substitutes.witnesses.front();
    return out;
}

// Conditionally independent signals under the log rule are substitutes; a
// failure here is an internal error, not a verdict.
inline ClassificationReport verify_log_ci_substitutes(double r,
                                                      const std::vector<double>& accuracies,
                                                      double tol = kValueTol) {
    const ValueContext ctx(fixtures::ci(r, accuracies), log_rule(2));
    const ClassificationReport weak = classify_weak(ctx, tol);
    if (!weak.substitutes.holds)
        throw InvalidInput("conditionally independent signals failed weak substitutes under log");
    ClassificationReport moderate = classify_moderate(ctx, tol);
    if (!moderate.substitutes.holds)
        throw InvalidInput(
            "conditionally independent signals failed moderate substitutes under log");
    return moderate;
}

}  // namespace infosubs
