#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

std::string binary() {
    const char* bin = std::getenv("PBISIM_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "PBISIM_BIN must point at the pbisim executable");
    return bin;
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd = (env_prefix.empty() ? "" : "env " + env_prefix + " ") + binary() + " " +
                      args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buffer[4096];
    while (std::size_t got = fread(buffer, 1, sizeof buffer, pipe)) output.append(buffer, got);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

std::string model_path() {
    static std::string path = [] {
        std::string p = "cli_e1.plts";
        std::ofstream out(p);
        out << "states: s t t2 u v\n"
               "s a -> 1/2 u, 1/2 v\n"
               "t a -> 1/2 u, 1/2 v\n"
               "t2 a -> 2/3 u, 1/3 v\n"
               "u b -> 1 u\n";
        return p;
    }();
    return path;
}

// Minimal structural validator for the subset of JSON Schema the published
// schema uses: type / enum / oneOf / required / properties /
// additionalProperties / items / pattern.
bool validates(const json& schema, const json& value) {
    if (schema.contains("enum")) {
        bool any = false;
        for (const auto& alt : schema["enum"]) any = any || alt == value;
        if (!any) return false;
    }
    if (schema.contains("oneOf")) {
        int hits = 0;
        for (const auto& alt : schema["oneOf"]) hits += validates(alt, value) ? 1 : 0;
        if (hits != 1) return false;
    }
    if (schema.contains("type")) {
        const std::string t = schema["type"];
        if (t == "object" && !value.is_object()) return false;
        if (t == "array" && !value.is_array()) return false;
        if (t == "string" && !value.is_string()) return false;
        if (t == "boolean" && !value.is_boolean()) return false;
        if (t == "null" && !value.is_null()) return false;
        if (t == "number" && !value.is_number()) return false;
    }
    if (schema.contains("pattern") && value.is_string()) {
        if (!std::regex_search(value.get<std::string>(),
                               std::regex(schema["pattern"].get<std::string>())))
            return false;
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>())) return false;
        const json props = schema.value("properties", json::object());
        for (const auto& [key, sub] : value.items()) {
            if (props.contains(key)) {
                if (!validates(props[key], sub)) return false;
            } else if (schema.value("additionalProperties", json(true)) == json(false)) {
                return false;
            }
        }
    }
    if (value.is_array() && schema.contains("items"))
        for (const auto& item : value)
            if (!validates(schema["items"], item)) return false;
    return true;
}

json check_schema(const std::string& output) {
    static json schema = [] {
        const char* path = std::getenv("PBISIM_SCHEMA");
        REQUIRE_MESSAGE(path != nullptr, "PBISIM_SCHEMA must point at verdict.schema.json");
        std::ifstream in(path);
        REQUIRE(in.good());
        return json::parse(in);
    }();
    json verdict = json::parse(output);
    CHECK_MESSAGE(validates(schema, verdict), ("schema violation in: " + output));
    return verdict;
}

}  // namespace

TEST_CASE("check: verdicts, witnesses, exit codes") {
    auto yes = run("check " + model_path() + " s t");
    CHECK(yes.exit_code == 0);
    CHECK(yes.output.find("bisimilar: true") != std::string::npos);

    auto no = run("check " + model_path() + " u v");
    CHECK(no.exit_code == 0);  // a negative verdict is still an answered query
    CHECK(no.output.find("bisimilar: false") != std::string::npos);
    CHECK(no.output.find("<b>(1*tt)") != std::string::npos);

    auto with_witness = run("check " + model_path() + " s t");
    CHECK(with_witness.output.find("witness relation:") != std::string::npos);
    CHECK(with_witness.output.find("(s,t)") != std::string::npos);

    auto missing = run("check " + model_path() + " s missing");
    CHECK(missing.exit_code == 2);
    CHECK(missing.output.find("error:") != std::string::npos);

    auto sim = run("check --sim " + model_path() + " v u");
    CHECK(sim.output.find("similar: true") != std::string::npos);
}

TEST_CASE("check: json facts match text facts and the schema") {
    auto text = run("check " + model_path() + " s t");
    auto js = run("--format json check " + model_path() + " s t");
    CHECK(js.exit_code == 0);
    json verdict = check_schema(js.output);
    CHECK(verdict["query"] == "check");
    CHECK(verdict["result"] == true);
    CHECK(text.output.find("bisimilar: true") != std::string::npos);
    bool found_pair = false;
    for (const auto& pair : verdict["witness"]["relation"])
        if (pair[0] == "s" && pair[1] == "t") found_pair = true;
    CHECK(found_pair);

    json negative = check_schema(run("--format json check " + model_path() + " u v").output);
    CHECK(negative["result"] == false);
    CHECK(negative["witness"]["formula"] == "<b>(1*tt)");
}

TEST_CASE("distance: iterations and stabilisation") {
    auto one = run("distance " + model_path() + " u v --iters 1");
    CHECK(one.exit_code == 0);
    CHECK(one.output.find("distance: 1\n") != std::string::npos);

    auto sixth = run("distance " + model_path() + " s t2 --iters 2");
    CHECK(sixth.output.find("distance: 1/6") != std::string::npos);

    auto stable = run("distance " + model_path() + " s t --stabilise");
    CHECK(stable.output.find("distance: 0") != std::string::npos);
    CHECK(stable.output.find("stabilised at iteration 2") != std::string::npos);

    json verdict = check_schema(
        run("--format json distance " + model_path() + " s t2 --iters 2").output);
    CHECK(verdict["result"] == "1/6");
    CHECK(verdict["stats"]["iterations"] == 2);

    auto table = run("--format json distance " + model_path() + " s t --iters 1 --table");
    json with_table = check_schema(table.output);
    CHECK(with_table["table"]["u"]["v"] == "1");

    auto no_mode = run("distance " + model_path() + " s t");
    CHECK(no_mode.exit_code == 2);
}

TEST_CASE("mc: both logics and grammar-mode rejection") {
    auto hml = run("mc " + model_path() + " \"<b>(1*tt)\" u");
    CHECK(hml.exit_code == 0);
    CHECK(hml.output.find("true") == 0);

    auto mumode = run("--format json mc " + model_path() + " --mu \"nu X. <b>(1*X)\"");
    json verdict = check_schema(mumode.output);
    CHECK(verdict["result"] == json::array({"u"}));

    auto rejected = run("mc " + model_path() + " \"mu X.X\" u");
    CHECK(rejected.exit_code == 2);
    CHECK(rejected.output.find("mu") != std::string::npos);

    auto no_state = run("mc " + model_path() + " \"tt\"");
    CHECK(no_state.exit_code == 2);

    auto mu_with_state = run("--format json mc " + model_path() + " --mu \"nu X. <b>(1*X)\" u");
    json both = check_schema(mu_with_state.output);
    CHECK(both["result"] == true);
    CHECK(both["satisfying_set"] == json::array({"u"}));
}

TEST_CASE("charform: output, verification, budget") {
    auto v = run("charform " + model_path() + " v");
    CHECK(v.exit_code == 0);
    CHECK(v.output.find("[a](1*ff) & [b](1*ff)") != std::string::npos);

    auto verified = run("charform " + model_path() + " s --verify");
    CHECK(verified.exit_code == 0);
    CHECK(verified.output.find("verified: satisfying set = {s,t}") != std::string::npos);

    auto budget = run("charform " + model_path() + " s", "PLTS_NODE_BUDGET=10");
    CHECK(budget.exit_code == 3);
    CHECK(budget.output.find("node budget") != std::string::npos);
}

TEST_CASE("distinguish") {
    auto uv = run("distinguish " + model_path() + " u v");
    CHECK(uv.exit_code == 0);
    CHECK(uv.output.find("<b>(1*tt)") != std::string::npos);

    json bisimilar = check_schema(
        run("--format json distinguish " + model_path() + " s t").output);
    CHECK(bisimilar["result"].is_null());
}

TEST_CASE("partition and approx") {
    auto part = run("partition " + model_path());
    CHECK(part.output == "{s,t} {t2} {u} {v}\n");

    auto a0 = run("approx " + model_path() + " 0");
    CHECK(a0.output == "{s,t,t2,u,v}\n");

    auto a1 = run("approx " + model_path() + " 1");
    CHECK(a1.output == "{s,t,t2} {u} {v}\n");

    json verdict = check_schema(run("--format json partition " + model_path()).output);
    CHECK(verdict["result"][0] == json::array({"s", "t"}));
}

TEST_CASE("lift with witness and dot dump") {
    auto yes = run("--witness lift " + model_path() + " \"1/2 u, 1/2 v\" \"1/2 u, 1/2 v\" --rel identity");
    CHECK(yes.exit_code == 0);
    CHECK(yes.output.find("true") == 0);
    CHECK(yes.output.find("1/2 * (u,u)") != std::string::npos);

    auto no = run("lift " + model_path() + " \"1/2 u, 1/2 v\" \"2/3 u, 1/3 v\" --rel identity");
    CHECK(no.output.find("false") == 0);

    auto cross = run("lift " + model_path() + " \"1/2 u, 1/2 v\" \"2/3 u, 1/3 v\" --rel \"u:u,v:v,v:u\"");
    CHECK(cross.output.find("true") == 0);

    auto dotted = run("lift " + model_path() +
                      " \"1 u\" \"1 v\" --rel full --dot cli_net.dot");
    CHECK(dotted.exit_code == 0);
    std::ifstream dot("cli_net.dot");
    std::string contents((std::istreambuf_iterator<char>(dot)), std::istreambuf_iterator<char>());
    CHECK(contents.find("digraph") != std::string::npos);

    json verdict = check_schema(
        run("--format json --witness lift " + model_path() +
            " \"1/2 u, 1/2 v\" \"1/2 u, 1/2 v\" --rel identity")
            .output);
    CHECK(verdict["result"] == true);
    CHECK(verdict["witness"]["decomposition"][0]["p"] == "1/2");
}

TEST_CASE("seed flag is accepted") {
    auto r = run("--seed 7 partition " + model_path());
    CHECK(r.exit_code == 0);
}
