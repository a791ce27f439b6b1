#pragma once

// Canonical information structures used throughout the tests and CLI,
// addressable by name ("xor2?q=0.6", "ci?r=0.9,s=0.8", ...).

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "infosubs/info_model.hpp"

namespace infosubs::fixtures {

// E a uniform bit, A1 = A2 = E.
inline InformationStructure dup2() {
    std::vector<PriorEntry> prior{
        {0, {0, 0}, 0.5},
        {1, {1, 1}, 0.5},
    };
    return InformationStructure({"0", "1"},
                                {{"A1", {"0", "1"}}, {"A2", {"0", "1"}}}, prior);
}

// A1, A2 independent Bernoulli(q), E = A1 xor A2.
inline InformationStructure xor2(double q) {
    std::vector<PriorEntry> prior;
    for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2) {
            double p = (a1 ? q : 1 - q) * (a2 ? q : 1 - q);
            if (p > 0.0) prior.push_back({a1 ^ a2, {a1, a2}, p});
        }
    return InformationStructure({"0", "1"},
                                {{"A1", {"0", "1"}}, {"A2", {"0", "1"}}}, prior);
}

// Pr[E=1] = r; signals conditionally i.i.d. given E, signal i equal to E with
// probability accuracies[i].
inline InformationStructure ci(double r, const std::vector<double>& accuracies) {
    const int n = static_cast<int>(accuracies.size());
    std::vector<SignalSpec> signals;
    for (int i = 0; i < n; ++i)
        signals.push_back({"A" + std::to_string(i + 1), {"0", "1"}});
    std::vector<PriorEntry> prior;
    for (int e = 0; e < 2; ++e) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            double p = e ? r : 1 - r;
            std::vector<int> a(n);
            for (int i = 0; i < n; ++i) {
                a[i] = (mask >> i) & 1;
                p *= (a[i] == e) ? accuracies[i] : 1 - accuracies[i];
            }
            if (p > 0.0) prior.push_back({e, a, p});
        }
    }
    return InformationStructure({"0", "1"}, signals, prior);
}

inline InformationStructure ci2(double r, double s) { return ci(r, {s, s}); }

// Independent uniform bits, E = A or B.
inline InformationStructure or2() {
    std::vector<PriorEntry> prior;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) prior.push_back({a | b, {a, b}, 0.25});
    return InformationStructure({"0", "1"},
                                {{"A", {"0", "1"}}, {"B", {"0", "1"}}}, prior);
}

// E = (Eb, Ec) independent uniform bits; B1 = B2 = Eb; Ec = C1 xor C2 with
// C1, C2 uniform; signals A1 = (B1, C1), A2 = (B2, C2).
// Event outcome index is 2*eb + ec; signal outcome index is 2*b + c.
inline InformationStructure pair_structure() {
    std::vector<std::string> pair_labels{"00", "01", "10", "11"};
    std::vector<PriorEntry> prior;
    for (int eb = 0; eb < 2; ++eb)
        for (int c1 = 0; c1 < 2; ++c1)
            for (int c2 = 0; c2 < 2; ++c2)
                prior.push_back({2 * eb + (c1 ^ c2), {2 * eb + c1, 2 * eb + c2}, 0.125});
    return InformationStructure(pair_labels,
                                {{"A1", pair_labels}, {"A2", pair_labels}}, prior);
}

// Single signal uniform on {1..6}.
inline InformationStructure dice() {
    std::vector<PriorEntry> prior;
    for (int v = 0; v < 6; ++v) prior.push_back({0, {v}, 1.0 / 6.0});
    return InformationStructure({"*"}, {{"roll", {"1", "2", "3", "4", "5", "6"}}}, prior);
}

// Parses e.g. "dup2", "xor2?q=0.6", "ci?r=0.9,s=0.8", "ci?r=0.5,s=0.9,s=0.6",
// "or2", "pair", "dice".
inline InformationStructure by_name(const std::string& spec) {
    std::string name = spec;
    std::map<std::string, std::vector<double>> params;
    if (auto pos = spec.find('?'); pos != std::string::npos) {
        name = spec.substr(0, pos);
        std::stringstream ss(spec.substr(pos + 1));
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw InvalidInput("fixture: bad parameter '" + kv + "'");
            params[kv.substr(0, eq)].push_back(std::stod(kv.substr(eq + 1)));
        }
    }
    auto scalar = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        if (it == params.end()) return fallback;
        return it->second.front();
    };
    if (name == "dup2") return dup2();
    if (name == "xor2") return xor2(scalar("q", 0.5));
    if (name == "or2") return or2();
    if (name == "pair") return pair_structure();
    if (name == "dice") return dice();
    if (name == "ci" || name == "ci3") {
        const std::size_t default_n = name == "ci3" ? 3 : 2;
        double r = scalar("r", 0.5);
        auto it = params.find("s");
        std::vector<double> acc = (it != params.end()) ? it->second : std::vector<double>{};
        // A single accuracy is shared by all signals.
        while (acc.size() < default_n) acc.push_back(acc.empty() ? 0.8 : acc.front());
        return ci(r, acc);
    }
    throw InvalidInput("fixture: unknown name '" + name + "'");
}

}  // namespace infosubs::fixtures
