// Command-line front end: value, classify, select, adaptive, reduce, market,
// fixtures. Human-readable lines by default, machine-readable with --json.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infosubs/json_io.hpp"

namespace {

using namespace infosubs;

int g_exit = 0;

void fail_verdict() { g_exit = 1; }

std::vector<int> parse_indices(const std::string& csv, int base) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok) - base);
    return out;
}

std::uint64_t mask_of(const std::vector<int>& idx) {
    std::uint64_t m = 0;
    for (int i : idx) m |= 1ull << i;
    return m;
}

std::string subset_name(std::uint64_t mask, int n) {
    if (mask == 0) return "{}";
    std::string out = "{";
    for (int i = 0; i < n; ++i)
        if (mask & (1ull << i)) out += std::to_string(i + 1) + ",";
    out.back() = '}';
    return out;
}

int max_threads() {
    if (const char* env = std::getenv("INFOSUBS_THREADS")) return std::max(1, std::atoi(env));
    return 1;
}

struct Common {
    std::string fixture;
    std::string rule = "log";
    bool json_out = false;
    double tol = kValueTol;
};

void add_common(CLI::App* app, Common& c, bool with_rule = true) {
    app->add_option("--fixture,--structure", c.fixture,
                    "fixture spec (e.g. xor2?q=0.6) or structure JSON path")
        ->required();
    if (with_rule)
        app->add_option("--rule", c.rule, "log | quadratic | custom1d:... | rule JSON path");
    app->add_flag("--json", c.json_out, "emit JSON instead of text");
    app->add_option("--tol", c.tol, "comparison tolerance");
}

ValueContext make_ctx(const Common& c) {
    InformationStructure s = structure_from_spec(c.fixture);
    return ValueContext(s, rule_from_spec(c.rule, s.num_events()));
}

void emit(const Common& c, const json& j, const std::string& text) {
    if (c.json_out)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"value-of-information toolkit"};
    app.require_subcommand(1);
    (void)max_threads();  // parallelism cap honored trivially: all paths are sequential

    // value
    Common vc;
    std::string v_subset;
    bool v_all = false, v_sample = false, v_clamp = false;
    double v_eps = 0.05, v_delta = 0.05;
    std::uint64_t v_seed = 0;
    bool v_have_seed = false;
    auto* value_cmd = app.add_subcommand("value", "compute V on the subsets lattice");
    add_common(value_cmd, vc);
    value_cmd->add_option("--subset", v_subset, "1-based signal indices, empty for the null signal");
    value_cmd->add_flag("--all", v_all, "all subsets");
    value_cmd->add_flag("--sample", v_sample, "Monte Carlo estimate");
    value_cmd->add_option("--epsilon", v_eps);
    value_cmd->add_option("--delta", v_delta);
    auto* v_seed_opt = value_cmd->add_option("--seed", v_seed);
    value_cmd->add_flag("--clamp", v_clamp, "clamp posteriors at 1e-9 for unbounded rules");
    value_cmd->callback([&] {
        v_have_seed = v_seed_opt->count() > 0;
        const ValueContext ctx = make_ctx(vc);
        const int n = ctx.structure.num_signals();
        json out = json::array();
        std::string text;
        auto one = [&](std::uint64_t mask) {
            double v;
            if (v_sample) {
                if (!v_have_seed) throw InvalidInput("value --sample: --seed is required");
                SamplingSpec spec;
                spec.epsilon = v_eps;
                spec.delta = v_delta;
                spec.seed = v_seed;
                if (v_clamp) spec.clamp_floor = 1e-9;
                std::vector<int> subset;
                for (int i = 0; i < n; ++i)
                    if (mask & (1ull << i)) subset.push_back(i);
                v = value_sampled(ctx, subset, spec);
            } else {
                v = value_subset(ctx, mask);
            }
            out.push_back({{"subset", subset_name(mask, n)}, {"value", v}});
            text += "V(" + subset_name(mask, n) + ") = " + std::to_string(v) + "\n";
        };
        if (v_all)
            for (std::uint64_t m = 0; m < (1ull << n); ++m) one(m);
        else
            one(mask_of(parse_indices(v_subset, 1)));
        emit(vc, out, text);
    });

    // classify
    Common cc;
    std::string c_level = "weak";
    int c_budget = 50, c_cap = 12, c_samples = 20000;
    std::uint64_t c_seed = 0;
    auto* classify_cmd = app.add_subcommand("classify", "substitutes / complements tests");
    add_common(classify_cmd, cc);
    classify_cmd
        ->add_option("--level", c_level,
                     "weak | moderate | strong | pointwise | trivial | geometric | "
                     "convexity | separating")
        ->check(CLI::IsMember({"weak", "moderate", "strong", "pointwise", "trivial",
                               "geometric", "convexity", "separating"}));
    classify_cmd->add_option("--budget", c_budget, "restarts for the strong-level search");
    classify_cmd->add_option("--cap", c_cap, "coarsening cell cap");
    classify_cmd->add_option("--samples", c_samples, "chords for convexity probing");
    auto* c_seed_opt = classify_cmd->add_option("--seed", c_seed);
    classify_cmd->callback([&] {
        const InformationStructure s = structure_from_spec(cc.fixture);
        if (c_level == "trivial") {
            const std::string verdict = check_trivial(s, cc.tol);
            emit(cc, json{{"verdict", verdict}}, verdict + "\n");
            return;
        }
        if (c_level == "geometric") {
            const GeometricReport rep = universal_complements_geometric(s, cc.tol);
            emit(cc,
                 json{{"universal_complements", rep.universal_complements},
                      {"r", rep.r},
                      {"min_joint", rep.min_joint}},
                 std::string(rep.universal_complements ? "universal complements"
                                                       : "not universal complements") +
                     " (r=" + std::to_string(rep.r) +
                     ", min joint distance=" + std::to_string(rep.min_joint) + ")\n");
            return;
        }
        if (c_level == "separating") {
            const SeparatingResult res = separating_decision_problem(s, cc.tol);
            if (!res.g) {
                emit(cc, json{{"status", "refused"}, {"reason", res.refusal}},
                     "refused: " + res.refusal + "\n");
                fail_verdict();
            } else {
                emit(cc, json{{"status", "ok"}, {"witness", triple_to_json(res.witness)}},
                     "separating problem found; increasing marginal witness lhs=" +
                         std::to_string(res.witness.lhs) +
                         " rhs=" + std::to_string(res.witness.rhs) + "\n");
            }
            return;
        }
        const ValueContext ctx(s, rule_from_spec(cc.rule, s.num_events()));
        if (c_level == "convexity") {
            const JointConvexityReport rep =
                probe_joint_convexity(ctx.g, c_samples, c_seed, cc.tol);
            emit(cc,
                 json{{"jointly_convex", rep.jointly_convex},
                      {"worst_violation", rep.worst_violation}},
                 std::string(rep.jointly_convex ? "jointly convex (no violation found)"
                                                : "violation found") +
                     "\n");
            return;
        }
        if (c_level == "strong") {
            if (c_seed_opt->count() == 0)
                throw InvalidInput("classify --level strong: --seed is required");
            for (Mode mode : {Mode::kSubstitutes, Mode::kComplements}) {
                const auto w = refute_strong(ctx, mode, c_budget, c_seed, cc.tol);
                const std::string name = to_string(mode);
                if (w) {
                    emit(cc,
                         json{{"mode", name},
                              {"status", "violation"},
                              {"margin", w->margin},
                              {"garbling", garbling_to_json(w->garbling)}},
                         name + ": violation found, margin " + std::to_string(w->margin) +
                             "\n");
                } else {
                    emit(cc, json{{"mode", name}, {"status", "no violation found"}},
                         name + ": no violation found at budget " +
                             std::to_string(c_budget) + "\n");
                }
            }
            return;
        }
        if (c_level == "pointwise") {
            const PointwiseReport rep = check_pointwise_substitutes(ctx, cc.tol);
            emit(cc, json{{"holds", rep.holds}},
                 std::string(rep.holds ? "pointwise substitutes"
                                       : "not pointwise substitutes") +
                     "\n");
            return;
        }
        const ClassificationReport rep = c_level == "weak"
                                             ? classify_weak(ctx, cc.tol)
                                             : classify_moderate(ctx, cc.tol, c_cap);
        std::string text = rep.level + ": ";
        if (rep.substitutes.holds)
            text += "substitutes (" + rep.substitutes.strictness + ")";
        else if (rep.complements.holds)
            text += "complements (" + rep.complements.strictness + ")";
        else
            text += "neither";
        if (!rep.substitutes.holds)
            text += "; not substitutes, " + std::to_string(rep.substitutes.witnesses.size()) +
                    " witness(es)";
        if (!rep.complements.holds)
            text += "; not complements, " + std::to_string(rep.complements.witnesses.size()) +
                    " witness(es)";
        emit(cc, report_to_json(rep), text + "\n");
    });

    // select
    Common sc;
    int s_cardinality = -1;
    std::string s_constraint_file, s_knapsack_costs;
    double s_budget = -1.0;
    bool s_check_ratio = false, s_partial = false;
    auto* select_cmd = app.add_subcommand("select", "constrained signal selection");
    add_common(select_cmd, sc);
    select_cmd->add_option("--cardinality", s_cardinality);
    select_cmd->add_option("--constraint", s_constraint_file, "constraint JSON path");
    select_cmd->add_option("--knapsack-costs", s_knapsack_costs, "comma-separated costs");
    select_cmd->add_option("--budget", s_budget);
    select_cmd->add_flag("--check-ratio", s_check_ratio, "compare greedy against brute force");
    select_cmd->add_flag("--partial-enum", s_partial, "knapsack partial enumeration");
    select_cmd->callback([&] {
        const ValueContext ctx = make_ctx(sc);
        const int n = ctx.structure.num_signals();
        const SetFunction oracle = make_value_oracle(ctx);
        Constraint constraint;
        if (!s_constraint_file.empty()) {
            constraint = constraint_from_json(load_json_file(s_constraint_file));
        } else if (!s_knapsack_costs.empty()) {
            std::vector<double> costs;
            std::stringstream ss(s_knapsack_costs);
            std::string tok;
            while (std::getline(ss, tok, ',')) costs.push_back(std::stod(tok));
            constraint.spec = Knapsack{costs, s_budget};
        } else if (s_cardinality >= 0) {
            constraint.spec = Cardinality{s_cardinality};
        } else {
            throw InvalidInput("select: need --cardinality, --knapsack-costs, or --constraint");
        }
        constraint.validate(n);

        SelectResult approx;
        if (const auto* card = std::get_if<Cardinality>(&constraint.spec))
            approx = greedy_select(oracle, n, card->k);
        else if (const auto* kn = std::get_if<Knapsack>(&constraint.spec))
            approx = knapsack_select(oracle, n, kn->costs, kn->budget, s_partial);
        else
            approx = brute_force_select(ctx, constraint);

        json out{{"subset", subset_name(approx.mask, n)}, {"value", approx.value}};
        std::string text = "selected " + subset_name(approx.mask, n) + " value " +
                           std::to_string(approx.value) + "\n";
        if (s_check_ratio) {
            const SelectResult opt = brute_force_select(ctx, constraint);
            const double base = value_subset(ctx, 0);
            const double denom = opt.value - base;
            const double ratio = denom > kProbTol ? (approx.value - base) / denom : 1.0;
            out["optimum"] = opt.value;
            out["ratio"] = ratio;
            text += "optimum " + subset_name(opt.mask, n) + " value " +
                    std::to_string(opt.value) + "; ratio " + std::to_string(ratio) + "\n";
        }
        emit(sc, out, text);
    });

    // adaptive
    Common ac;
    int a_k = 1;
    bool a_compare = false;
    auto* adaptive_cmd = app.add_subcommand("adaptive", "adaptive greedy selection");
    add_common(adaptive_cmd, ac);
    adaptive_cmd->add_option("-k,--k", a_k, "number of observations");
    adaptive_cmd->add_flag("--compare", a_compare, "compare against the optimal policy");
    adaptive_cmd->callback([&] {
        const InformationStructure s = structure_from_spec(ac.fixture);
        DecisionProblem dp = guess_event_problem(s.num_events());
        const double greedy = adaptive_greedy_expected(s, dp, a_k);
        json out{{"greedy_expected", greedy}};
        std::string text = "adaptive greedy expected utility " + std::to_string(greedy) + "\n";
        if (a_compare) {
            const double opt = brute_force_policy(s, dp, a_k);
            out["optimal_policy"] = opt;
            text += "optimal policy value " + std::to_string(opt) + "\n";
        }
        emit(ac, out, text);
    });

    // reduce
    std::string r_setfn = "modular:1,1";
    int r_n = -1;
    bool r_verify = false, r_json = false;
    auto* reduce_cmd = app.add_subcommand("reduce", "set-function embedding");
    reduce_cmd->add_option("--setfn", r_setfn,
                           "modular:w1,w2,... | or | coverage:seed (random monotone)");
    reduce_cmd->add_option("-n,--n", r_n, "ground set size (defaults from the set function)");
    reduce_cmd->add_flag("--verify", r_verify, "check V(S) = f(S) on every subset");
    reduce_cmd->add_flag("--json", r_json);
    reduce_cmd->callback([&] {
        SetFunction f;
        int n = r_n;
        if (r_setfn.rfind("modular:", 0) == 0) {
            std::vector<double> w;
            std::stringstream ss(r_setfn.substr(8));
            std::string tok;
            while (std::getline(ss, tok, ',')) w.push_back(std::stod(tok));
            n = n < 0 ? static_cast<int>(w.size()) : n;
            f = [w](std::uint64_t mask) {
                double total = 0.0;
                for (std::size_t i = 0; i < w.size(); ++i)
                    if (mask & (1ull << i)) total += w[i];
                return total;
            };
        } else if (r_setfn == "or") {
            n = n < 0 ? 2 : n;
            f = [](std::uint64_t mask) { return mask ? 1.0 : 0.0; };
        } else if (r_setfn.rfind("coverage:", 0) == 0) {
            const std::uint64_t seed = std::stoull(r_setfn.substr(9));
            n = n < 0 ? 4 : n;
            Rng rng(seed);
            std::vector<std::uint64_t> covers(n);
            for (auto& c : covers) c = rng() % 256;
            f = [covers](std::uint64_t mask) {
                std::uint64_t covered = 0;
                for (std::size_t i = 0; i < covers.size(); ++i)
                    if (mask & (1ull << i)) covered |= covers[i];
                return static_cast<double>(std::popcount(covered));
            };
        } else {
            throw InvalidInput("reduce: unknown set function " + r_setfn);
        }
        const ReducedInstance inst = reduce_from_set_function(f, n);
        json out{{"n", n}};
        std::string text;
        if (r_verify) {
            int mismatches = 0;
            for (std::uint64_t mask = 0; mask < (1ull << n); ++mask)
                if (inst.value(mask) != inst.f(mask)) ++mismatches;
            out["subsets"] = 1ull << n;
            out["mismatches"] = mismatches;
            if (mismatches == 0) {
                text = "V(S)=f(S) for all " + std::to_string(1ull << n) + " subsets\n";
            } else {
                text = std::to_string(mismatches) + " mismatches\n";
                fail_verdict();
            }
        } else {
            for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
                out["values"].push_back(inst.value(mask));
                text += "V(" + subset_name(mask, n) + ") = " +
                        std::to_string(inst.value(mask)) + "\n";
            }
        }
        if (r_json)
            std::cout << out.dump(2) << "\n";
        else
            std::cout << text;
    });

    // market
    Common mc;
    std::string m_order = "1,2,1", m_profile = "all-rush", m_traders, m_refute, m_game_file;
    bool m_verify = false;
    int m_garble_seeds = 20;
    std::uint64_t m_seed = 0;
    auto* market_cmd = app.add_subcommand("market", "scoring-rule market games");
    add_common(market_cmd, mc);
    market_cmd->add_option("--game", m_game_file, "game JSON path (overrides other options)");
    market_cmd->add_option("--order", m_order, "1-based trader ids per slot");
    market_cmd->add_option("--traders", m_traders,
                           "semicolon-separated 1-based signal groups (default: one per signal)");
    market_cmd->add_option("--profile", m_profile, "all-rush | all-delay")
        ->check(CLI::IsMember({"all-rush", "all-delay"}));
    market_cmd->add_flag("--verify", m_verify, "check deviation-proofness");
    market_cmd->add_option("--refute", m_refute, "rush | delay refutation search")
        ->check(CLI::IsMember({"rush", "delay"}));
    market_cmd->add_option("--garble-seeds", m_garble_seeds);
    auto* m_seed_opt = market_cmd->add_option("--seed", m_seed);
    market_cmd->callback([&] {
        const ValueContext ctx = make_ctx(mc);
        if (!m_refute.empty()) {
            const RefutationWitness w = m_refute == "rush" ? rush_refutation(ctx, mc.tol)
                                                           : delay_refutation(ctx, mc.tol);
            std::string text = m_refute + " refutation: " + w.status;
            if (w.status == "witness")
                text += " (gain " + std::to_string(w.alice_gain) + ")";
            emit(mc, refutation_to_json(w), text + "\n");
            return;
        }
        std::vector<std::vector<int>> traders;
        if (m_traders.empty()) {
            for (int i = 0; i < ctx.structure.num_signals(); ++i) traders.push_back({i});
        } else {
            std::stringstream ss(m_traders);
            std::string group;
            while (std::getline(ss, group, ';')) traders.push_back(parse_indices(group, 1));
        }
        const MarketGame game = !m_game_file.empty()
                                    ? game_from_json(load_json_file(m_game_file))
                                    : MarketGame(ctx, traders, parse_indices(m_order, 1));
        const StrategyProfile profile =
            m_profile == "all-rush" ? all_rush_profile(game) : all_delay_profile(game);
        const ExpectedPayoffs pay = expected_payoffs(game, profile);
        json out{{"profile", m_profile}, {"expected_payoffs", pay.payoffs}};
        std::string text = m_profile + " expected payoffs:";
        for (double p : pay.payoffs) text += " " + std::to_string(p);
        text += "\n";
        if (m_verify) {
            // Deterministic given (inputs, seed); the seed defaults to 0.
            const DeviationReport rep =
                verify_equilibrium(game, profile, m_garble_seeds, m_seed, mc.tol);
            out["verified"] = rep.verified;
            out["margins"] = rep.margins;
            out["deviation_class"] = rep.deviation_class;
            text += rep.verified ? "deviation-proof within class " + rep.deviation_class + "\n"
                                 : "rejected: profitable deviation found\n";
            if (!rep.verified) fail_verdict();
        }
        emit(mc, out, text);
    });

    // fixtures
    std::string f_name;
    bool f_json = false;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "list or dump canonical structures");
    fixtures_cmd->add_option("--name", f_name, "dump one fixture as structure JSON");
    fixtures_cmd->add_flag("--json", f_json);
    fixtures_cmd->callback([&] {
        if (f_name.empty()) {
            std::cout << "dup2\nxor2?q=0.5\nci?r=0.5,s=0.8\nor2\npair\ndice\n";
            return;
        }
        std::cout << structure_to_json(fixtures::by_name(f_name)).dump(2) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 2;
    }
    return g_exit;
}
