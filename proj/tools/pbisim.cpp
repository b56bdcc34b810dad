// Command-line front end: equivalence checks, metric queries, model
// checking, and characteristic formulas on pLTS files.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbisim/bisim.hpp"
#include "pbisim/lifting.hpp"
#include "pbisim/logic.hpp"
#include "pbisim/metric.hpp"
#include "pbisim/mucalc.hpp"

using json = nlohmann::ordered_json;
using namespace pbisim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

struct Options {
    std::string format = "text";
    bool witness = false;
    long seed = 0;  // reserved: no randomised tie-breaking exists today
};

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    long long elapsed_ms() const {
        auto d = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

unsigned long long node_budget() {
    if (const char* env = std::getenv("PLTS_NODE_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
        throw ModelError("PLTS_NODE_BUDGET must be a positive integer");
    }
    return 1000000;
}

json relation_json(const Plts& p, const StateRelation& r) {
    json out = json::array();
    for (const auto& [s, t] : r.pairs()) out.push_back({p.state_name(s), p.state_name(t)});
    return out;
}

std::string relation_text(const Plts& p, const StateRelation& r) {
    std::string out = "{";
    bool first = true;
    for (const auto& [s, t] : r.pairs()) {
        if (!first) out += " ";
        first = false;
        out += "(" + p.state_name(s) + "," + p.state_name(t) + ")";
    }
    return out + "}";
}

json partition_json(const Plts& p, const Partition& part) {
    json out = json::array();
    for (const auto& block : part.blocks()) {
        json b = json::array();
        for (StateId s : block) b.push_back(p.state_name(s));
        out.push_back(b);
    }
    return out;
}

std::string partition_text(const Plts& p, const Partition& part) {
    std::string out;
    for (const auto& block : part.blocks()) {
        out += "{";
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (i) out += ",";
            out += p.state_name(block[i]);
        }
        out += "} ";
    }
    if (!out.empty()) out.pop_back();
    return out;
}

json set_json(const Plts& p, const StateSet& set) {
    json out = json::array();
    for (StateId s : set.elements()) out.push_back(p.state_name(s));
    return out;
}

std::string set_text(const Plts& p, const StateSet& set) {
    std::string out = "{";
    auto elems = set.elements();
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i) out += ",";
        out += p.state_name(elems[i]);
    }
    return out + "}";
}

json metric_json(const Plts& p, const PseudoMetric& m) {
    json out = json::object();
    for (StateId s = 0; s < p.num_states(); ++s) {
        json row = json::object();
        for (StateId t = 0; t < p.num_states(); ++t)
            row[p.state_name(t)] = rat_to_string(m.at(s, t));
        out[p.state_name(s)] = row;
    }
    return out;
}

void emit(const Options& opts, const json& verdict, const std::string& text) {
    if (opts.format == "json")
        std::cout << verdict.dump(2) << "\n";
    else
        std::cout << text;
}

// Parses "1/2 u, 1/2 v" against an existing model's state table.
Dist parse_inline_dist(const Plts& p, const std::string& text) {
    std::vector<Dist::Entry> entries;
    std::istringstream in(text);
    std::string chunk;
    while (std::getline(in, chunk, ',')) {
        std::istringstream pair(chunk);
        std::string prob, state;
        if (!(pair >> prob >> state)) throw ModelError("malformed distribution '" + text + "'");
        std::string extra;
        if (pair >> extra) throw ModelError("malformed distribution '" + text + "'");
        entries.emplace_back(p.state(state), rat_from_string(prob));
    }
    return Dist::from_entries(std::move(entries));
}

StateRelation parse_inline_relation(const Plts& p, const std::string& text) {
    if (text == "identity") return StateRelation::identity(p.num_states());
    if (text == "full") return StateRelation::full(p.num_states());
    StateRelation r(p.num_states());
    std::istringstream in(text);
    std::string chunk;
    while (std::getline(in, chunk, ',')) {
        auto colon = chunk.find(':');
        if (colon == std::string::npos)
            throw ModelError("relation pairs look like 's:t', got '" + chunk + "'");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        r.add(p.state(trim(chunk.substr(0, colon))), p.state(trim(chunk.substr(colon + 1))));
    }
    return r;
}

void warn_unknown_actions(const Plts& p, const FormulaPtr& f) {
    for (const auto& name : collect_actions(f))
        if (!p.find_action(name))
            std::cerr << "warning: action '" << name << "' does not occur in the model\n";
}

// --- subcommand bodies -------------------------------------------------------

int run_check(const Options& opts, const std::string& file, const std::string& s_name,
              const std::string& t_name, bool sim_mode) {
    Stopwatch watch;
    Plts p = parse_plts(read_file(file));
    StateId s = p.state(s_name), t = p.state(t_name);

    BisimChecker checker(p, sim_mode ? BisimChecker::Mode::Simulation
                                     : BisimChecker::Mode::Bisimulation);
    bool verdict = checker.check(s, t);

    json out;
    out["query"] = "check";
    out["args"] = {{"model", file}, {"s", s_name}, {"t", t_name},
                   {"mode", sim_mode ? "sim" : "bisim"}};
    out["result"] = verdict;
    std::string text = std::string(sim_mode ? "similar" : "bisimilar") + ": " +
                       (verdict ? "true" : "false") + "\n";
    // check always carries its witness; the --witness flag matters for
    // commands where the witness is optional extra work (lift).
    if (!sim_mode) {
        if (verdict) {
            auto witness = checker.last_witness();
            out["witness"] = {{"relation", relation_json(p, *witness)}};
            text += "witness relation: " + relation_text(p, *witness) + "\n";
        } else {
            auto phi = distinguish(p, s, t);
            out["witness"] = {{"formula", to_string(*phi)}};
            text += "distinguishing formula: " + to_string(*phi) + "\n";
        }
    }
    out["stats"] = {{"elapsed_ms", watch.elapsed_ms()}, {"restarts", checker.last_restarts()}};
    emit(opts, out, text);
    return kExitOk;
}

int run_distance(const Options& opts, const std::string& file, const std::string& s_name,
                 const std::string& t_name, long iters, bool stabilise, bool table) {
    Stopwatch watch;
    Plts p = parse_plts(read_file(file));
    StateId s = p.state(s_name), t = p.state(t_name);

    PseudoMetric m;
    json stats;
    std::string text;
    if (stabilise) {
        StabilisedMetric result = stabilise_metric(p);
        m = std::move(result.metric);
        stats["stabilisation_index"] = result.index;
        text += "distance: " + rat_to_string(m.at(s, t)) + "\n";
        text += "kernel stabilised at iteration " + std::to_string(result.index) + "\n";
    } else {
        m = iterate_metric(p, static_cast<std::size_t>(iters));
        stats["iterations"] = iters;
        text += "distance: " + rat_to_string(m.at(s, t)) + "\n";
    }

    json out;
    out["query"] = "distance";
    out["args"] = {{"model", file}, {"s", s_name}, {"t", t_name}};
    out["result"] = rat_to_string(m.at(s, t));
    if (table) {
        out["table"] = metric_json(p, m);
        text += metric_to_csv(p, m);
    }
    stats["elapsed_ms"] = watch.elapsed_ms();
    out["stats"] = stats;
    emit(opts, out, text);
    return kExitOk;
}

int run_mc(const Options& opts, const std::string& file, const std::string& formula_text,
           const std::string& state_name, bool mu_mode) {
    Stopwatch watch;
    Plts p = parse_plts(read_file(file));
    FormulaPtr f = parse_formula(formula_text, mu_mode ? LogicMode::Mu : LogicMode::Hml);
    warn_unknown_actions(p, f);

    json out;
    out["query"] = "mc";
    out["args"] = {{"model", file}, {"formula", formula_text},
                   {"mode", mu_mode ? "mu" : "hml"}};
    std::string text;
    if (mu_mode) {
        StateSet sat = mu_eval(p, f, {});
        if (!state_name.empty()) {
            bool verdict = sat.test(p.state(state_name));
            out["args"]["state"] = state_name;
            out["result"] = verdict;
            out["satisfying_set"] = set_json(p, sat);
            text = std::string(verdict ? "true" : "false") + "\n" + "satisfying set: " +
                   set_text(p, sat) + "\n";
        } else {
            out["result"] = set_json(p, sat);
            text = set_text(p, sat) + "\n";
        }
    } else {
        if (state_name.empty()) throw ModelError("a state is required outside --mu mode");
        bool verdict = sat_state(p, p.state(state_name), f);
        out["args"]["state"] = state_name;
        out["result"] = verdict;
        text = std::string(verdict ? "true" : "false") + "\n";
    }
    out["stats"] = {{"elapsed_ms", watch.elapsed_ms()}};
    emit(opts, out, text);
    return kExitOk;
}

int run_charform(const Options& opts, const std::string& file, const std::string& s_name,
                 bool verify) {
    Stopwatch watch;
    Plts p = parse_plts(read_file(file));
    StateId s = p.state(s_name);

    FormulaPtr phi = char_formula(characteristic_system(p), char_var(p, s), node_budget());
    json out;
    out["query"] = "charform";
    out["args"] = {{"model", file}, {"s", s_name}};
    out["result"] = to_string(phi);
    std::string text = to_string(phi) + "\n";
    if (verify) {
        StateSet sat = mu_eval(p, phi, {});
        Partition part = bisimilarity(p);
        StateSet block(p.num_states());
        for (StateId t : part.blocks()[part.block_of(s)]) block.set(t);
        bool ok = sat == block;
        out["verified"] = ok;
        out["satisfying_set"] = set_json(p, sat);
        text += std::string("verified: ") + (ok ? "satisfying set = " : "MISMATCH, got ") +
                set_text(p, sat) + "\n";
    }
    out["stats"] = {{"elapsed_ms", watch.elapsed_ms()}};
    emit(opts, out, text);
    return kExitOk;
}

int run_distinguish(const Options& opts, const std::string& file, const std::string& s_name,
                    const std::string& t_name) {
    Stopwatch watch;
    Plts p = parse_plts(read_file(file));
    auto phi = distinguish(p, p.state(s_name), p.state(t_name));

    json out;
    out["query"] = "distinguish";
    out["args"] = {{"model", file}, {"s", s_name}, {"t", t_name}};
    std::string text;
    if (phi) {
        out["result"] = to_string(*phi);
        text = to_string(*phi) + "\n";
    } else {
        out["result"] = nullptr;
        text = "states are bisimilar; no distinguishing formula exists\n";
    }
    out["stats"] = {{"elapsed_ms", watch.elapsed_ms()}};
    emit(opts, out, text);
    return kExitOk;
}

int run_partition(const Options& opts, const std::string& file) {
    Stopwatch watch;
    Plts p = parse_plts(read_file(file));
    std::size_t rounds = 0;
    Partition part = bisimilarity(p, rounds);

    json out;
    out["query"] = "partition";
    out["args"] = {{"model", file}};
    out["result"] = partition_json(p, part);
    out["stats"] = {{"elapsed_ms", watch.elapsed_ms()}, {"rounds", rounds}};
    emit(opts, out, partition_text(p, part) + "\n");
    return kExitOk;
}

int run_approx(const Options& opts, const std::string& file, long n) {
    Stopwatch watch;
    Plts p = parse_plts(read_file(file));
    Partition part = approximant_partition(p, static_cast<std::size_t>(n));

    json out;
    out["query"] = "approx";
    out["args"] = {{"model", file}, {"n", n}};
    out["result"] = partition_json(p, part);
    out["stats"] = {{"elapsed_ms", watch.elapsed_ms()}};
    emit(opts, out, partition_text(p, part) + "\n");
    return kExitOk;
}

int run_lift(const Options& opts, const std::string& file, const std::string& delta_text,
             const std::string& theta_text, const std::string& rel_text,
             const std::string& dot_path) {
    Stopwatch watch;
    Plts p = parse_plts(read_file(file));
    Dist delta = parse_inline_dist(p, delta_text);
    Dist theta = parse_inline_dist(p, theta_text);
    StateRelation r = parse_inline_relation(p, rel_text);

    if (!dot_path.empty()) {
        std::ofstream dot(dot_path);
        if (!dot) throw ModelError("cannot write '" + dot_path + "'");
        dot << to_dot(build_network(delta, theta, r), p);
    }

    auto w = lifting::weight_function(delta, theta, r);
    json out;
    out["query"] = "lift";
    out["args"] = {{"model", file}, {"delta", delta_text}, {"theta", theta_text},
                   {"rel", rel_text}};
    out["result"] = w.has_value();
    std::string text = std::string(w ? "true" : "false") + "\n";
    if (opts.witness && w) {
        LiftWitness witness = lifting::decompose(*w);
        json triples = json::array();
        for (const auto& tr : witness.decomposition) {
            triples.push_back({{"p", rat_to_string(tr.p)},
                               {"s", p.state_name(tr.s)},
                               {"t", p.state_name(tr.t)}});
            text += rat_to_string(tr.p) + " * (" + p.state_name(tr.s) + "," +
                    p.state_name(tr.t) + ")\n";
        }
        out["witness"] = {{"decomposition", triples}};
    }
    out["stats"] = {{"elapsed_ms", watch.elapsed_ms()}};
    emit(opts, out, text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact probabilistic bisimilarity, metrics, and modal logics on pLTS files"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Options opts;
    app.add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_flag("--witness", opts.witness, "Include witnesses in the output");
    app.add_option("--seed", opts.seed,
                   "Reserved for randomised tie-breaking (none exists; accepted for script "
                   "compatibility)");

    std::string file, s_name, t_name, formula_text, state_name;
    std::string delta_text, theta_text, rel_text, dot_path;
    bool sim_mode = false, stabilise = false, table = false, mu_mode = false, verify = false;
    long iters = -1, approx_n = 0;

    auto* check = app.add_subcommand("check", "Decide bisimilarity (or similarity) of two states");
    check->add_option("file", file)->required();
    check->add_option("s", s_name)->required();
    check->add_option("t", t_name)->required();
    check->add_flag("--sim", sim_mode, "Check similarity instead of bisimilarity");

    auto* distance = app.add_subcommand("distance", "Iterated bisimilarity pseudometric");
    distance->add_option("file", file)->required();
    distance->add_option("s", s_name)->required();
    distance->add_option("t", t_name)->required();
    auto* iters_opt = distance->add_option("--iters", iters, "Number of metric iterations");
    auto* stab_opt =
        distance->add_flag("--stabilise", stabilise, "Iterate until the kernel stabilises");
    distance->add_flag("--table", table, "Print the full distance table");
    iters_opt->excludes(stab_opt);

    auto* mc = app.add_subcommand("mc", "Model-check a formula");
    mc->add_option("file", file)->required();
    mc->add_option("formula", formula_text)->required();
    mc->add_option("state", state_name);
    mc->add_flag("--mu", mu_mode, "Mu-calculus mode (prints the satisfying set)");

    auto* charform = app.add_subcommand("charform", "Characteristic formula of a state");
    charform->add_option("file", file)->required();
    charform->add_option("s", s_name)->required();
    charform->add_flag("--verify", verify, "Evaluate the formula and compare with bisimilarity");

    auto* disting = app.add_subcommand("distinguish", "Distinguishing formula for two states");
    disting->add_option("file", file)->required();
    disting->add_option("s", s_name)->required();
    disting->add_option("t", t_name)->required();

    auto* partition = app.add_subcommand("partition", "Bisimilarity quotient of all states");
    partition->add_option("file", file)->required();

    auto* approx = app.add_subcommand("approx", "Approximant partition at level n");
    approx->add_option("file", file)->required();
    approx->add_option("n", approx_n)->required();

    auto* lift = app.add_subcommand("lift", "Direct lifted-relation query on two distributions");
    lift->add_option("file", file)->required();
    lift->add_option("delta", delta_text, "e.g. \"1/2 u, 1/2 v\"")->required();
    lift->add_option("theta", theta_text)->required();
    lift->add_option("--rel", rel_text, "pairs \"s:t,u:v\", or identity/full")->required();
    lift->add_option("--dot", dot_path, "Write the lifting network in DOT format");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(opts, file, s_name, t_name, sim_mode);
        if (distance->parsed()) {
            if (!stabilise && iters < 0)
                throw ModelError("distance needs --iters N or --stabilise");
            return run_distance(opts, file, s_name, t_name, iters, stabilise, table);
        }
        if (mc->parsed()) return run_mc(opts, file, formula_text, state_name, mu_mode);
        if (charform->parsed()) return run_charform(opts, file, s_name, verify);
        if (disting->parsed()) return run_distinguish(opts, file, s_name, t_name);
        if (partition->parsed()) return run_partition(opts, file);
        if (approx->parsed()) return run_approx(opts, file, approx_n);
        if (lift->parsed())
            return run_lift(opts, file, delta_text, theta_text, rel_text, dot_path);
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
