#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "hyperver/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using hyperver::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

// Minimal RFC 4180 reader for the tests.
std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows(1);
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            rows.back().push_back(field);
            field.clear();
        } else if (c == '\n') {
            rows.back().push_back(field);
            field.clear();
            rows.emplace_back();
        } else {
            field += c;
        }
    }
    if (rows.back().empty()) rows.pop_back();
    return rows;
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / ("hyperver_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

Workspace& ws() {
    static Workspace w;
    return w;
}

// 4x4 model with psi_ca (K=3, theta=0.5) written to the workspace.
void make_grid(unsigned n, const std::string& formula = "ca", const std::string& layout = "default") {
    const std::string tag = std::to_string(n) + formula + layout;
    if (fs::exists(ws().file("g" + tag + ".txt"))) return;
    std::vector<std::string> args{"gridworld", "--n", std::to_string(n), "--layout", layout, "--out",
                                  ws().file("g" + tag + ".txt"), "--formula", formula, "--K",
                                  formula == "ca" ? "3" : "8", "--formula-out", ws().file("f" + tag + ".txt")};
    REQUIRE(run(args).code == 0);
}

}  // namespace

TEST_CASE("gridworld writes the 2x2 model and its assignment") {
    const Result r = run({"gridworld", "--n", "2", "--layout", "default"});
    CHECK(r.code == 0);
    CHECK(r.out == slurp(fs::path(HYPERVER_TEST_DATA) / "grid2_default.txt"));
    int states = 0;
    for (const auto& l : lines(r.out)) states += l.rfind("state ", 0) == 0;
    CHECK(states == 8);
}

TEST_CASE("gridworld layouts move robot one's goal") {
    const Result a = run({"gridworld", "--n", "4", "--layout", "goal11"});
    CHECK(a.out.find("state q_1_1_1 labels: a_1_1,g_1\n") != std::string::npos);
    const Result b = run({"gridworld", "--n", "4", "--layout", "goal01"});
    CHECK(b.out.find("state q_0_1_1 labels: a_0_1,g_1\n") != std::string::npos);
    CHECK(run({"gridworld", "--n", "3", "--robots", "0,0>0,5"}).code == 64);
    CHECK(run({"gridworld", "--n", "3", "--layout", "sideways"}).code == 64);
}

TEST_CASE("check on the 4x4 collision formula") {
    make_grid(4);
    const Result r = run({"check", "--model", ws().file("g4cadefault.txt"), "--formula", ws().file("f4cadefault.txt"),
                          "--assign", "p1=q_0_0_1,p2=q_3_3_2", "--alpha", "0.01", "--beta", "0.01", "--seed", "7"});
    CHECK(r.code == 0);
    const auto rows = read_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == hyperver::cli::run_record_columns());
    CHECK(rows[1][13] == "TRUE");
    CHECK(rows[1][12] == "7");
}

TEST_CASE("usage and input errors") {
    make_grid(4);
    const std::string model = ws().file("g4cadefault.txt"), formula = ws().file("f4cadefault.txt");
    CHECK(run({"check", "--model", model, "--formula", formula, "--assign", "p1=q_0_0_1,p2=q_3_3_2", "--alpha",
               "1.5"})
              .code == 64);
    CHECK(run({"check", "--model", model, "--formula", formula, "--assign", "p1=q_0_0_1,p2=nowhere"}).code == 64);
    CHECK(run({"check", "--model", model, "--formula", formula}).code == 64);
    CHECK(run({"check", "--model", ws().file("missing.txt"), "--formula", formula}).code == 66);
    const Result bad = run({"check", "--model", model, "--formula", "P{[0,0.5]}(Pr[p1](a_0_0@p1)", "--assign",
                            "p1=q_0_0_1"});
    CHECK(bad.code == 64);
    CHECK(bad.err.find("expected") != std::string::npos);
    CHECK(run({"frobnicate"}).code == 64);
    CHECK(run({}).code == 64);
}

TEST_CASE("false and undecided exit codes") {
    make_grid(4);
    make_grid(6);
    const Result f = run({"check", "--model", ws().file("g4cadefault.txt"), "--formula",
                          "P{[0.5,1]}(Pr[p1,p2](F<=3 (a_1_1@p1 & a_1_1@p2)))", "--assign", "p1=q_0_0_1,p2=q_3_3_2"});
    CHECK(f.code == 1);
    const Result u = run({"check", "--model", ws().file("g6cadefault.txt"), "--formula", ws().file("f6cadefault.txt"),
                          "--assign", "p1=q_0_0_1,p2=q_5_5_2", "--method", "sprt", "--max-samples", "2048"});
    CHECK(u.code == 2);
    const auto rows = read_csv(u.out);
    CHECK(rows[1][13] == "UNDECIDED");
    CHECK(rows[1][14] == "sample-cap");
}

TEST_CASE("repeat produces derived seeds and a summary row") {
    make_grid(4);
    const Result r = run({"check", "--model", ws().file("g4cadefault.txt"), "--formula", ws().file("f4cadefault.txt"),
                          "--assign", "p1=q_0_0_1,p2=q_3_3_2", "--seed", "7", "--repeat", "50", "--timing", "none"});
    CHECK(r.code == 0);
    const auto rows = read_csv(r.out);
    REQUIRE(rows.size() == 52);
    std::set<std::string> seeds;
    double sum = 0;
    for (std::size_t i = 1; i <= 50; ++i) {
        CHECK(rows[i][0] == std::to_string(i - 1));
        seeds.insert(rows[i][12]);
        sum += std::stod(rows[i][15]);
        CHECK(rows[i][17] == "NA");
    }
    CHECK(seeds.size() == 50);
    CHECK(rows[51][0] == "mean");
    CHECK(std::stod(rows[51][15]) == doctest::Approx(sum / 50));
}

TEST_CASE("csv report matches the golden file") {
    make_grid(4);
    const std::string model = ws().file("g4cadefault.txt");
    const Result r = run({"check", "--model", model, "--formula", "P{[0,0.5]}(Pr[p1,p2](F<=2 (a_0_0@p1 | b@p2)))",
                          "--assign-path", "p1=q_0_0_1;p2=q_3_3_2", "--seed", "11", "--repeat", "2", "--timing",
                          "none"});
    std::string text = r.out;
    // the model path is machine dependent
    for (std::size_t at; (at = text.find(model)) != std::string::npos;) text.replace(at, model.size(), "MODEL");
    CHECK(r.code == 1);
    CHECK(text == slurp(fs::path(HYPERVER_TEST_DATA) / "check_golden.csv"));
}

TEST_CASE("json mirrors the csv fields") {
    make_grid(4);
    const Result r = run({"check", "--model", ws().file("g4cadefault.txt"), "--formula", ws().file("f4cadefault.txt"),
                          "--assign", "p1=q_0_0_1,p2=q_3_3_2", "--format", "json", "--out", ws().file("r.json")});
    CHECK(r.code == 0);
    const auto j = nlohmann::ordered_json::parse(slurp(ws().file("r.json")));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    std::vector<std::string> keys;
    for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
    CHECK(keys == hyperver::cli::run_record_columns());
    CHECK(j[0]["verdict"] == "TRUE");
    CHECK(j[0]["samples"].is_number_integer());
}

TEST_CASE("oracle subcommand") {
    make_grid(6);
    const Result r = run({"oracle", "--model", ws().file("g6cadefault.txt"), "--formula", ws().file("f6cadefault.txt"),
                          "--assign", "p1=q_0_0_1,p2=q_5_5_2", "--format", "json"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"] == "TRUE");
    CHECK(j["probabilities"][0] == 0.0);
}

TEST_CASE("experiment output is reproducible and shaped like the table") {
    const std::vector<std::string> args{"experiment", "--table", "2", "--runs", "1", "--seed", "42", "--timing",
                                        "none", "--sizes", "4,6", "--max-samples", "2048"};
    const Result a = run(args);
    const Result b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto rows = read_csv(a.out);
    REQUIRE(rows.size() == 1 + 2 * 2 * 2 * 3);
    CHECK(lines(a.out)[0] == "n,K,alpha,beta,method,prior,mean_samples,mean_time_s,status,undecided_rate");
    std::set<std::string> methods;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        methods.insert(rows[i][4]);
        CHECK(rows[i][7] == "NA");
    }
    CHECK(methods.size() == 3);
}

TEST_CASE("table one lists the four priors") {
    const Result r = run({"experiment", "--table", "1", "--runs", "1", "--seed", "3", "--timing", "none", "--sizes",
                          "4"});
    CHECK(r.code == 0);
    const auto rows = read_csv(r.out);
    REQUIRE(rows.size() == 5);
    std::vector<std::string> priors;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        priors.push_back(rows[i][5]);
        CHECK(rows[i][1] == "8");
        CHECK(rows[i][8] == "TRUE");
    }
    CHECK(priors == std::vector<std::string>{"(1,1)", "(5,2)", "(2,5)", "(2,2)"});
}

TEST_CASE("csv helpers") {
    using hyperver::cli::csv_escape;
    using hyperver::cli::format_number;
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(19.68) == "19.68");
    CHECK(std::stod(format_number(1.0 / 3)) == 1.0 / 3);
}
