#pragma once

// JSON readers and writers for the file formats: information structures,
// decision rules, constraints, market games, and report serialization.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infosubs/classify.hpp"
#include "infosubs/decision.hpp"
#include "infosubs/fixtures.hpp"
#include "infosubs/info_model.hpp"
#include "infosubs/market.hpp"
#include "infosubs/select.hpp"

namespace infosubs {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw InvalidInput(path + ": " + err.what());
    }
    return j;
}

inline InformationStructure structure_from_json(const json& j) {
    if (!j.contains("event_outcomes") || !j.contains("signals") || !j.contains("prior"))
        throw InvalidInput("structure: need event_outcomes, signals, prior");
    std::vector<std::string> events = j.at("event_outcomes").get<std::vector<std::string>>();
    std::vector<SignalSpec> signals;
    for (const auto& sj : j.at("signals"))
        signals.push_back({sj.at("name").get<std::string>(),
                           sj.at("outcomes").get<std::vector<std::string>>()});
    auto index_of = [](const std::vector<std::string>& names, const json& v,
                       const char* what) {
        if (v.is_number_integer()) {
            const int i = v.get<int>();
            if (i < 0 || i >= static_cast<int>(names.size()))
                throw InvalidInput(std::string(what) + ": index out of range");
            return i;
        }
        const auto it = std::find(names.begin(), names.end(), v.get<std::string>());
        if (it == names.end())
            throw InvalidInput(std::string(what) + ": unknown label " + v.dump());
        return static_cast<int>(it - names.begin());
    };
    std::vector<PriorEntry> prior;
    for (const auto& ej : j.at("prior")) {
        PriorEntry entry;
        entry.e = index_of(events, ej.at("e"), "prior.e");
        const auto& aj = ej.at("a");
        if (aj.size() != signals.size())
            throw InvalidInput("prior.a: need one outcome per signal");
        for (std::size_t i = 0; i < signals.size(); ++i)
            entry.a.push_back(index_of(signals[i].outcomes, aj.at(i), "prior.a"));
        entry.p = ej.at("p").get<double>();
        prior.push_back(std::move(entry));
    }
    return InformationStructure(std::move(events), std::move(signals), std::move(prior));
}

inline json structure_to_json(const InformationStructure& s) {
    json j;
    j["event_outcomes"] = s.event_outcomes();
    j["signals"] = json::array();
    for (const auto& sig : s.signals())
        j["signals"].push_back({{"name", sig.name}, {"outcomes", sig.outcomes}});
    j["prior"] = json::array();
    for (const auto& entry : s.prior())
        j["prior"].push_back({{"e", entry.e}, {"a", entry.a}, {"p", entry.p}});
    return j;
}

// {"rule":"log"} | {"rule":"quadratic"} | {"decisions":[...],"utility":[[...]]}
// | {"custom1d":{"breakpoints":[[x,y],...]}}
inline ExpectedScoreFunction rule_from_json(const json& j, int num_events) {
    if (j.contains("rule")) {
        const std::string name = j.at("rule").get<std::string>();
        if (name == "log") return log_rule(num_events);
        if (name == "quadratic") return quadratic_rule(num_events);
        throw InvalidInput("rule: unknown name " + name);
    }
    if (j.contains("custom1d")) {
        std::vector<std::pair<double, double>> bps;
        for (const auto& bp : j.at("custom1d").at("breakpoints"))
            bps.emplace_back(bp.at(0).get<double>(), bp.at(1).get<double>());
        if (num_events != 2) throw InvalidInput("custom1d: needs binary E");
        return custom1d(bps);
    }
    if (j.contains("utility")) {
        std::vector<std::vector<double>> utility =
            j.at("utility").get<std::vector<std::vector<double>>>();
        std::vector<std::string> decisions;
        if (j.contains("decisions"))
            decisions = j.at("decisions").get<std::vector<std::string>>();
        else
            for (std::size_t d = 0; d < utility.size(); ++d)
                decisions.push_back("d" + std::to_string(d));
        return revelation(DecisionProblem(std::move(decisions), std::move(utility)));
    }
    throw InvalidInput("rule: need rule, custom1d, or utility");
}

// Rule specs used on the command line: "log", "quadratic", "custom1d:kink075",
// "custom1d:x0,y0;x1,y1;...", or a path to a JSON file.
inline ExpectedScoreFunction rule_from_spec(const std::string& spec, int num_events) {
    if (spec == "log") return log_rule(num_events);
    if (spec == "quadratic") return quadratic_rule(num_events);
    if (spec.rfind("custom1d:", 0) == 0) {
        if (num_events != 2) throw InvalidInput("custom1d: needs binary E");
        const std::string body = spec.substr(9);
        if (body == "kink075") return custom1d({{0.0, 0.0}, {0.75, 0.0}, {1.0, 0.25}});
        std::vector<std::pair<double, double>> bps;
        std::stringstream ss(body);
        std::string pt;
        while (std::getline(ss, pt, ';')) {
            const auto comma = pt.find(',');
            if (comma == std::string::npos)
                throw InvalidInput("custom1d: breakpoint needs x,y");
            bps.emplace_back(std::stod(pt.substr(0, comma)), std::stod(pt.substr(comma + 1)));
        }
        return custom1d(bps);
    }
    return rule_from_json(load_json_file(spec), num_events);
}

// Fixture name or a path to a structure JSON file.
inline InformationStructure structure_from_spec(const std::string& spec) {
    if (spec.find(".json") != std::string::npos)
        return structure_from_json(load_json_file(spec));
    return fixtures::by_name(spec);
}

inline Constraint constraint_from_json(const json& j) {
    Constraint c;
    if (j.contains("cardinality")) {
        c.spec = Cardinality{j.at("cardinality").get<int>()};
    } else if (j.contains("knapsack")) {
        c.spec = Knapsack{j.at("knapsack").at("costs").get<std::vector<double>>(),
                          j.at("knapsack").at("budget").get<double>()};
    } else if (j.contains("family")) {
        ExplicitFamily fam;
        for (const auto& subset : j.at("family")) {
            std::uint64_t mask = 0;
            for (const auto& i : subset) mask |= 1ull << i.get<int>();
            fam.masks.push_back(mask);
        }
        c.spec = std::move(fam);
    } else {
        throw InvalidInput("constraint: need cardinality, knapsack, or family");
    }
    return c;
}

inline json partition_to_json(const Partition& p) {
    return json{{"ground_size", p.ground_size()}, {"cells", p.cells()}};
}

inline json garbling_to_json(const Garbling& g) {
    return json{{"source", partition_to_json(g.source)}, {"matrix", g.matrix}};
}

inline json triple_to_json(const Triple& t) {
    return json{{"a_prime", partition_to_json(t.a_prime)},
                {"a", partition_to_json(t.a)},
                {"b", partition_to_json(t.b)},
                {"lhs", t.lhs},
                {"rhs", t.rhs}};
}

inline json mode_result_to_json(const ModeResult& r) {
    json witnesses = json::array();
    for (const auto& w : r.witnesses) witnesses.push_back(triple_to_json(w));
    return json{{"holds", r.holds}, {"strictness", r.strictness}, {"witnesses", witnesses}};
}

inline json report_to_json(const ClassificationReport& rep) {
    return json{{"level", rep.level},
                {"substitutes", mode_result_to_json(rep.substitutes)},
                {"complements", mode_result_to_json(rep.complements)},
                {"tolerance", rep.tolerance},
                {"bounded_enumeration", rep.bounded_enumeration}};
}

inline json refutation_to_json(const RefutationWitness& w) {
    json j{{"status", w.status}};
    if (w.status == "witness") {
        j["a_mask"] = w.a_mask;
        j["b_mask"] = w.b_mask;
        if (w.a_prime) j["a_prime"] = partition_to_json(*w.a_prime);
        if (w.garbling) j["garbling"] = garbling_to_json(*w.garbling);
        j["lhs"] = w.lhs;
        j["rhs"] = w.rhs;
        j["alice_gain"] = w.alice_gain;
    }
    return j;
}

// {"structure":..., "rule":..., "traders":[[...]], "order":[...]}
inline MarketGame game_from_json(const json& j) {
    InformationStructure s = j.at("structure").is_string()
                                 ? structure_from_spec(j.at("structure").get<std::string>())
                                 : structure_from_json(j.at("structure"));
    ExpectedScoreFunction g = rule_from_json(j.at("rule"), s.num_events());
    std::vector<std::vector<int>> traders =
        j.at("traders").get<std::vector<std::vector<int>>>();
    std::vector<int> order = j.at("order").get<std::vector<int>>();
    return MarketGame(ValueContext(std::move(s), std::move(g)), std::move(traders),
                      std::move(order));
}

}  // namespace infosubs
