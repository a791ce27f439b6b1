#pragma once

// Finite Bayesian information structures: a joint prior over an event E and n
// base signals, with signals-as-partitions of the support and stochastic
// garblings as the finite stand-in for randomized post-processing.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infosubs/common.hpp"

namespace infosubs {

struct SignalSpec {
    std::string name;
    std::vector<std::string> outcomes;
};

struct PriorEntry {
    int e = 0;                  // index into event_outcomes
    std::vector<int> a;         // one outcome index per signal
    double p = 0.0;
};

class InformationStructure {
  public:
    InformationStructure(std::vector<std::string> event_outcomes,
                         std::vector<SignalSpec> signals,
                         std::vector<PriorEntry> prior)
        : event_outcomes_(std::move(event_outcomes)),
          signals_(std::move(signals)),
          prior_(std::move(prior)) {
        validate();
        build_support();
    }

    const std::vector<std::string>& event_outcomes() const { return event_outcomes_; }
    const std::vector<SignalSpec>& signals() const { return signals_; }
    const std::vector<PriorEntry>& prior() const { return prior_; }

    int num_events() const { return static_cast<int>(event_outcomes_.size()); }
    int num_signals() const { return static_cast<int>(signals_.size()); }

    // Support tuples in lexicographic order by signal outcome indices.
    const std::vector<std::vector<int>>& support() const { return support_; }
    int support_size() const { return static_cast<int>(support_.size()); }

    // Joint mass P(E = e, realization = support()[g]).
    double mass(int g, int e) const { return mass_[static_cast<std::size_t>(g) * event_outcomes_.size() + e]; }

    double tuple_mass(int g) const {
        double s = 0.0;
        for (int e = 0; e < num_events(); ++e) s += mass(g, e);
        return s;
    }

    // Prior marginal on E.
    std::vector<double> prior_on_event() const {
        std::vector<double> q(event_outcomes_.size(), 0.0);
        for (const auto& entry : prior_) q[entry.e] += entry.p;
        return q;
    }

    std::optional<int> support_index(const std::vector<int>& tuple) const {
        auto it = support_index_.find(tuple);
        if (it == support_index_.end()) return std::nullopt;
        return it->second;
    }

  private:
    void validate() {
        if (event_outcomes_.empty()) throw InvalidInput("structure: no event outcomes");
        if (signals_.empty()) throw InvalidInput("structure: no signals");
        for (const auto& s : signals_)
            if (s.outcomes.empty()) throw InvalidInput("structure: signal with no outcomes");
        if (prior_.empty()) throw InvalidInput("structure: empty prior");
        double total = 0.0;
        std::map<std::pair<int, std::vector<int>>, bool> seen;
        for (const auto& entry : prior_) {
            if (entry.e < 0 || entry.e >= num_events())
                throw InvalidInput("structure: event index out of range");
            if (entry.a.size() != signals_.size())
                throw InvalidInput("structure: realization arity mismatch");
            for (int i = 0; i < num_signals(); ++i)
                if (entry.a[i] < 0 || entry.a[i] >= static_cast<int>(signals_[i].outcomes.size()))
                    throw InvalidInput("structure: signal outcome index out of range");
            if (!(entry.p > 0.0))
                throw InvalidInput("structure: prior probabilities must be strictly positive");
            if (seen.count({entry.e, entry.a}))
                throw InvalidInput("structure: duplicate (e, realization) entry");
            seen[{entry.e, entry.a}] = true;
            total += entry.p;
        }
        if (std::fabs(total - 1.0) > kProbTol)
            throw InvalidInput("structure: prior probabilities sum to " + std::to_string(total));
    }

    void build_support() {
        std::map<std::vector<int>, int> idx;
        for (const auto& entry : prior_) idx.emplace(entry.a, 0);
        int k = 0;
        for (auto& [tuple, i] : idx) {
            i = k++;
            support_.push_back(tuple);
        }
        support_index_ = idx;
        mass_.assign(support_.size() * event_outcomes_.size(), 0.0);
        for (const auto& entry : prior_)
            mass_[static_cast<std::size_t>(idx[entry.a]) * event_outcomes_.size() + entry.e] += entry.p;
    }

    std::vector<std::string> event_outcomes_;
    std::vector<SignalSpec> signals_;
    std::vector<PriorEntry> prior_;
    std::vector<std::vector<int>> support_;
    std::map<std::vector<int>, int> support_index_;
    std::vector<double> mass_;
};

// A partition of the support into disjoint covering nonempty cells.
// Canonical form: each cell sorted ascending, cells ordered by first element.
class Partition {
  public:
    // Placeholder state for report fields filled in later.
    Partition() : ground_size_(0) {}

    Partition(int ground_size, std::vector<std::vector<int>> cells)
        : ground_size_(ground_size), cells_(std::move(cells)) {
        canonicalize();
        validate();
    }

    static Partition bottom(int ground_size) {
        std::vector<int> all(ground_size);
        std::iota(all.begin(), all.end(), 0);
        return Partition(ground_size, {all});
    }

    static Partition top(int ground_size) {
        std::vector<std::vector<int>> cells;
        for (int i = 0; i < ground_size; ++i) cells.push_back({i});
        return Partition(ground_size, std::move(cells));
    }

    int ground_size() const { return ground_size_; }
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    int num_cells() const { return static_cast<int>(cells_.size()); }

    int cell_of(int element) const { return cell_of_[element]; }

    bool operator==(const Partition& other) const {
        return ground_size_ == other.ground_size_ && cells_ == other.cells_;
    }

  private:
    void canonicalize() {
        for (auto& c : cells_) std::sort(c.begin(), c.end());
        std::sort(cells_.begin(), cells_.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
    }

    void validate() {
        if (ground_size_ <= 0) throw InvalidInput("partition: empty ground set");
        cell_of_.assign(ground_size_, -1);
        for (int c = 0; c < num_cells(); ++c) {
            if (cells_[c].empty()) throw InvalidInput("partition: empty cell");
            for (int g : cells_[c]) {
                if (g < 0 || g >= ground_size_) throw InvalidInput("partition: element out of range");
                if (cell_of_[g] != -1) throw InvalidInput("partition: overlapping cells");
                cell_of_[g] = c;
            }
        }
        for (int g = 0; g < ground_size_; ++g)
            if (cell_of_[g] == -1) throw InvalidInput("partition: cells do not cover the support");
    }

    int ground_size_;
    std::vector<std::vector<int>> cells_;
    std::vector<int> cell_of_;
};

// Stochastic map from a partition's cells to garbled outcomes.
struct Garbling {
    Partition source;
    std::vector<std::vector<double>> matrix;  // rows by source cell, cols by garbled outcome

    Garbling(Partition src, std::vector<std::vector<double>> m)
        : source(std::move(src)), matrix(std::move(m)) {
        if (static_cast<int>(matrix.size()) != source.num_cells())
            throw InvalidInput("garbling: one row per source cell required");
        std::size_t cols = matrix.empty() ? 0 : matrix.front().size();
        for (const auto& row : matrix) {
            if (row.size() != cols || cols == 0) throw InvalidInput("garbling: ragged matrix");
            double s = 0.0;
            for (double x : row) {
                if (x < 0.0) throw InvalidInput("garbling: negative entry");
                s += x;
            }
            if (std::fabs(s - 1.0) > kProbTol) throw InvalidInput("garbling: row does not sum to 1");
        }
    }

    int num_outcomes() const { return static_cast<int>(matrix.front().size()); }

    static Garbling identity(Partition src) {
        int k = src.num_cells();
        std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
        for (int i = 0; i < k; ++i) m[i][i] = 1.0;
        return Garbling(std::move(src), std::move(m));
    }
};

inline std::vector<std::vector<int>> compute_support(const InformationStructure& s) {
    return s.support();
}

// Partition induced by revealing the signals in S (empty S gives the null signal).
inline Partition subset_signal(const InformationStructure& s, const std::vector<int>& subset) {
    for (int i : subset)
        if (i < 0 || i >= s.num_signals()) throw InvalidInput("subset_signal: signal index out of range");
    std::map<std::vector<int>, std::vector<int>> groups;
    for (int g = 0; g < s.support_size(); ++g) {
        std::vector<int> key;
        for (int i : subset) key.push_back(s.support()[g][i]);
        groups[key].push_back(g);
    }
    std::vector<std::vector<int>> cells;
    for (auto& [key, cell] : groups) cells.push_back(std::move(cell));
    return Partition(s.support_size(), std::move(cells));
}

inline Partition subset_signal(const InformationStructure& s, std::uint64_t mask) {
    std::vector<int> subset;
    for (int i = 0; i < s.num_signals(); ++i)
        if (mask & (1ull << i)) subset.push_back(i);
    return subset_signal(s, subset);
}

// Coarsest common refinement: cellwise intersection.
inline Partition join(const Partition& a, const Partition& b) {
    if (a.ground_size() != b.ground_size()) throw InvalidInput("join: mismatched support");
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (int g = 0; g < a.ground_size(); ++g)
        groups[{a.cell_of(g), b.cell_of(g)}].push_back(g);
    std::vector<std::vector<int>> cells;
    for (auto& [key, cell] : groups) cells.push_back(std::move(cell));
    return Partition(a.ground_size(), std::move(cells));
}

// Finest common coarsening: connected components of the cell-overlap graph.
inline Partition meet(const Partition& a, const Partition& b) {
    if (a.ground_size() != b.ground_size()) throw InvalidInput("meet: mismatched support");
    const int n = a.ground_size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int x, int y) { parent[find(x)] = find(y); };
    for (const auto& cell : a.cells())
        for (std::size_t i = 1; i < cell.size(); ++i) unite(cell[0], cell[i]);
    for (const auto& cell : b.cells())
        for (std::size_t i = 1; i < cell.size(); ++i) unite(cell[0], cell[i]);
    std::map<int, std::vector<int>> groups;
    for (int g = 0; g < n; ++g) groups[find(g)].push_back(g);
    std::vector<std::vector<int>> cells;
    for (auto& [root, cell] : groups) cells.push_back(std::move(cell));
    return Partition(n, std::move(cells));
}

inline std::uint64_t bell_number(int n) {
    std::vector<std::vector<std::uint64_t>> tri{{1}};
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> row{tri.back().back()};
        for (std::uint64_t x : tri.back()) row.push_back(row.back() + x);
        tri.push_back(std::move(row));
    }
    return tri[n][0];
}

// Visits every coarsening of p (every set partition of p's cells merged back
// to cells of the support), including p itself and the null signal.
inline void for_each_coarsening(const Partition& p,
                                const std::function<void(const Partition&)>& fn,
                                int cell_cap = 12) {
    const int k = p.num_cells();
    if (k > cell_cap)
        throw CapExceeded("enumerate_coarsenings: " + std::to_string(k) +
                          " cells exceeds cap " + std::to_string(cell_cap) +
                          " (Bell(" + std::to_string(k) + ") = " +
                          std::to_string(bell_number(k)) + " coarsenings)");
    // Restricted growth strings over the cells.
    std::vector<int> assign(k, 0);
    std::function<void(int, int)> rec = [&](int i, int max_used) {
        if (i == k) {
            int groups = max_used + 1;
            std::vector<std::vector<int>> cells(groups);
            for (int c = 0; c < k; ++c)
                for (int g : p.cells()[c]) cells[assign[c]].push_back(g);
            fn(Partition(p.ground_size(), std::move(cells)));
            return;
        }
        for (int v = 0; v <= max_used + 1; ++v) {
            assign[i] = v;
            rec(i + 1, std::max(max_used, v));
        }
    };
    rec(1, 0);  // cell 0 always maps to group 0
}

inline std::vector<Partition> enumerate_coarsenings(const Partition& p, int cell_cap = 12) {
    std::vector<Partition> out;
    for_each_coarsening(p, [&](const Partition& q) { out.push_back(q); }, cell_cap);
    return out;
}

struct Posterior {
    std::vector<double> dist;  // over E
    double cell_prob = 0.0;
};

inline Posterior posterior(const InformationStructure& s, const Partition& p, int cell) {
    if (p.ground_size() != s.support_size()) throw InvalidInput("posterior: mismatched support");
    if (cell < 0 || cell >= p.num_cells()) throw InvalidInput("posterior: bad cell index");
    Posterior out;
    out.dist.assign(s.num_events(), 0.0);
    for (int g : p.cells()[cell])
        for (int e = 0; e < s.num_events(); ++e) out.dist[e] += s.mass(g, e);
    for (double x : out.dist) out.cell_prob += x;
    for (double& x : out.dist) x /= out.cell_prob;
    return out;
}

// Joint table over (garbled outcome, b-cell, e).
struct GarbledJoint {
    int num_outcomes = 0;
    int num_b_cells = 0;
    int num_events = 0;
    std::vector<double> probs;  // [outcome][b_cell][e]

    double& at(int o, int c, int e) {
        return probs[(static_cast<std::size_t>(o) * num_b_cells + c) * num_events + e];
    }
    double at(int o, int c, int e) const {
        return probs[(static_cast<std::size_t>(o) * num_b_cells + c) * num_events + e];
    }
};

inline GarbledJoint garbled_joint(const InformationStructure& s, const Garbling& g,
                                  const Partition& b) {
    if (g.source.ground_size() != s.support_size() || b.ground_size() != s.support_size())
        throw InvalidInput("garbled_joint: mismatched support");
    GarbledJoint out;
    out.num_outcomes = g.num_outcomes();
    out.num_b_cells = b.num_cells();
    out.num_events = s.num_events();
    out.probs.assign(static_cast<std::size_t>(out.num_outcomes) * out.num_b_cells * out.num_events,
                     0.0);
    for (int idx = 0; idx < s.support_size(); ++idx) {
        const int src = g.source.cell_of(idx);
        const int bc = b.cell_of(idx);
        for (int e = 0; e < s.num_events(); ++e) {
            const double m = s.mass(idx, e);
            if (m == 0.0) continue;
            for (int o = 0; o < out.num_outcomes; ++o) out.at(o, bc, e) += m * g.matrix[src][o];
        }
    }
    return out;
}

struct DistinguishabilityResult {
    bool distinguishable = true;
    std::vector<int> subset;            // witness subset S
    std::vector<int> realization_lhs;   // outcome indices of S
    std::vector<int> realization_rhs;
};

// True iff, for each signal, every pair of distinct realizations induces
// distinct posteriors on E.
inline DistinguishabilityResult is_distinguishable(const InformationStructure& s,
                                                   double tol = kProbTol) {
    const int n = s.num_signals();
    for (int i = 0; i < n; ++i) {
        const std::vector<int> subset{i};
        std::map<std::vector<int>, std::vector<double>> post;
        for (int g = 0; g < s.support_size(); ++g) {
            std::vector<int> key;
            for (int i : subset) key.push_back(s.support()[g][i]);
            auto& acc = post[key];
            if (acc.empty()) acc.assign(s.num_events(), 0.0);
            for (int e = 0; e < s.num_events(); ++e) acc[e] += s.mass(g, e);
        }
        for (auto& [key, acc] : post) {
            double total = 0.0;
            for (double x : acc) total += x;
            for (double& x : acc) x /= total;
        }
        for (auto it = post.begin(); it != post.end(); ++it) {
            for (auto jt = std::next(it); jt != post.end(); ++jt) {
                double dist = 0.0;
                for (int e = 0; e < s.num_events(); ++e)
                    dist = std::max(dist, std::fabs(it->second[e] - jt->second[e]));
                if (dist <= tol)
                    return {false, subset, it->first, jt->first};
            }
        }
    }
    return {};
}

}  // namespace infosubs
