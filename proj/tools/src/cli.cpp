#include "hyperver/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperver/gridworld.hpp"
#include "hyperver/oracle.hpp"

namespace hyperver::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot write '" + path + "'");
    file << text;
}

// --formula takes a file name or the formula itself.
std::string formula_text(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) {
        std::string text = read_file(arg);
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        return text;
    }
    return arg;
}

Dtmc load_model_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse_model(text);
    } catch (const ModelError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

Formula load_formula(const std::string& arg) {
    const std::string text = formula_text(arg);
    try {
        return parse_formula(text);
    } catch (const FormulaError& e) {
        throw UsageError("formula " + std::string(e.what()));
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

// Builds V from --assign (start states, paths sampled from `seed`) and
// --assign-path (explicit traces).
PathAssignment build_assignment(const Dtmc& model, const Formula& f, const std::string& assign,
                                const std::vector<std::string>& assign_paths, std::uint64_t seed) {
    PathAssignment explicit_paths;
    try {
        for (const auto& spec : assign_paths) {
            PathAssignment part = parse_assignment(model, spec);
            for (const auto& var : part.variables()) {
                if (explicit_paths.contains(var)) throw UsageError("path variable '" + var + "' assigned twice");
                explicit_paths.bind(var, part.path(var));
            }
        }
    } catch (const EvaluationError& e) {
        throw UsageError(e.what());
    }

    std::map<std::string, StateIndex> starts;
    if (!assign.empty()) {
        for (const auto& entry : split(assign, ',')) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos) throw UsageError("--assign entry '" + entry + "' must look like var=state");
            const std::string var = entry.substr(0, eq);
            const std::string state = entry.substr(eq + 1);
            auto s = model.find(state);
            if (!s) throw UsageError("--assign: unknown state '" + state + "'");
            if (explicit_paths.contains(var) || !starts.emplace(var, *s).second)
                throw UsageError("path variable '" + var + "' assigned twice");
        }
    }

    std::map<std::string, std::size_t> horizon;
    for (const auto& [var, reach] : variable_horizon(f)) {
        if (explicit_paths.contains(var)) {
            if (explicit_paths.remaining(var) < reach + 1)
                throw UsageError("explicit path for '" + var + "' needs at least " + std::to_string(reach + 1) + " states");
            continue;
        }
        if (!starts.count(var)) throw UsageError("path variable '" + var + "' needs --assign or --assign-path");
        horizon.emplace(var, reach);
    }
    PathAssignment v = materialize_assignment(model, horizon, starts, seed);
    for (const auto& var : explicit_paths.variables()) v.bind(var, explicit_paths.path(var));
    return v;
}

std::pair<double, double> parse_prior(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("--prior expects A,B");
    try {
        std::size_t used = 0;
        const double a = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("a");
        const double b = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("b");
        return {a, b};
    } catch (const std::exception&) {
        throw UsageError("--prior expects two positive numbers A,B");
    }
}

void require_open_unit(double x, const char* flag) {
    if (!(x > 0.0 && x < 1.0)) throw UsageError(std::string(flag) + " must lie in (0, 1)");
}

struct CheckArgs {
    std::string model;
    std::string formula;
    std::string assign;
    std::vector<std::string> assign_paths;
    double alpha = 0.01;
    double beta = 0.01;
    std::string prior = "1,1";
    std::string method = "bayes";
    double eps = 0.01;
    std::uint64_t seed = 0;
    std::uint64_t max_samples = 1'000'000;
    double timeout_s = 1800.0;
    unsigned repeat = 1;
    std::string out;
    std::string format = "csv";
    std::string timing = "wall";
    unsigned threads = 0;
    bool no_cache = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
    require_open_unit(a.alpha, "--alpha");
    require_open_unit(a.beta, "--beta");
    if (a.repeat == 0) throw UsageError("--repeat must be at least 1");
    if (a.max_samples == 0) throw UsageError("--max-samples must be at least 1");
    if (!(a.timeout_s > 0.0)) throw UsageError("--timeout-s must be positive");
    const auto [pa, pb] = parse_prior(a.prior);

    SmcConfig cfg;
    try {
        cfg.prior = BetaPrior(pa, pb);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    cfg.alpha = a.alpha;
    cfg.beta = a.beta;
    cfg.method = a.method == "sprt" ? Method::Sprt : Method::Bayes;
    cfg.sprt_eps = a.eps;
    cfg.max_samples = a.max_samples;
    cfg.timeout_s = a.timeout_s;
    cfg.threads = a.threads;
    cfg.cache = !a.no_cache;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const Dtmc model = load_model_file(a.model);
    const Formula psi = load_formula(a.formula);
    const auto closed = check_closed(psi);
    if (!closed.ok())
        throw UsageError("formula is not closed: variable '" + closed.violations.front().variable + "' in " +
                         closed.violations.front().argument);
    const PathAssignment v = build_assignment(model, psi, a.assign, a.assign_paths, a.seed);

    RunRecord base;
    base.model = a.model;
    base.formula = to_string(psi);
    base.assignment = assignment_to_string(model, v);
    base.method = to_string(cfg.method);
    base.prior_a = pa;
    base.prior_b = pb;
    base.alpha = a.alpha;
    base.beta = a.beta;
    base.eps = cfg.method == Method::Sprt ? a.eps : 0.0;
    base.max_samples = a.max_samples;
    base.timeout_s = a.timeout_s;
    const bool timing = a.timing != "none";

    std::vector<RunRecord> records;
    std::set<Verdict> verdicts;
    double samples = 0.0;
    double total = 0.0;
    double seconds = 0.0;
    for (unsigned r = 0; r < a.repeat; ++r) {
        cfg.seed = a.repeat == 1 ? a.seed : derive_seed(a.seed, r);
        SmcVerdict result;
        try {
            result = check(model, psi, v, cfg);
        } catch (const UnsupportedError& e) {
            throw UsageError(e.what());
        } catch (const DegeneratePriorMass& e) {
            throw UsageError(e.what());
        } catch (const BudgetError& e) {
            throw UsageError(e.what());
        } catch (const SprtRangeError& e) {
            throw UsageError(e.what());
        }
        RunRecord rec = base;
        rec.run = std::to_string(r);
        rec.seed = cfg.seed;
        rec.verdict = to_string(result.outcome);
        rec.reason = to_string(result.reason);
        rec.samples = static_cast<double>(result.samples);
        rec.total_samples = static_cast<double>(result.total_samples);
        if (timing) rec.seconds = result.seconds;
        records.push_back(rec);
        verdicts.insert(result.outcome);
        samples += rec.samples;
        total += rec.total_samples;
        seconds += result.seconds;
    }
    if (a.repeat > 1) {
        RunRecord mean = base;
        mean.run = "mean";
        mean.seed = a.seed;
        mean.verdict = verdicts.size() == 1 ? to_string(*verdicts.begin()) : "MIXED";
        mean.samples = samples / a.repeat;
        mean.total_samples = total / a.repeat;
        if (timing) mean.seconds = seconds / a.repeat;
        records.push_back(mean);
    }

    std::string text;
    if (a.format == "json") {
        text = to_json(records) + "\n";
    } else {
        text = csv_header() + "\n";
        for (const auto& r : records) text += to_csv_row(r) + "\n";
    }
    write_output(a.out, text, out);

    if (verdicts.size() != 1) return kExitUndecided;
    switch (*verdicts.begin()) {
        case Verdict::True:
            return kExitTrue;
        case Verdict::False:
            return kExitFalse;
        case Verdict::Undecided:
            return kExitUndecided;
    }
    return kExitInternal;
}

struct GridArgs {
    unsigned n = 0;
    std::string layout = "default";
    std::string robots;
    std::string out;
    std::string formula;
    unsigned k = 3;
    double theta = 0.5;
    double theta1 = 0.5;
    double theta2 = 0.5;
    unsigned robot = 1;
    std::string formula_out;
};

Cell parse_cell(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("cell '" + text + "' must look like row,col");
    try {
        std::size_t used = 0;
        const unsigned long r = std::stoul(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("row");
        const unsigned long c = std::stoul(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("col");
        return {static_cast<unsigned>(r), static_cast<unsigned>(c)};
    } catch (const std::exception&) {
        throw UsageError("cell '" + text + "' must look like row,col");
    }
}

int cmd_gridworld(const GridArgs& a, std::ostream& out) {
    if (a.n == 0) throw UsageError("--n must be at least 1");
    GridSpec spec;
    try {
        if (a.robots.empty()) {
            spec = make_layout(a.n, parse_layout(a.layout));
        } else {
            spec.n = a.n;
            for (const auto& r : split(a.robots, ';')) {
                const auto arrow = r.find('>');
                if (arrow == std::string::npos) throw UsageError("robot '" + r + "' must look like row,col>row,col");
                spec.robots.push_back({parse_cell(r.substr(0, arrow)), parse_cell(r.substr(arrow + 1))});
            }
            spec.validate();
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const Dtmc model = build_grid_dtmc(spec);

    std::string assign;
    for (unsigned k = 1; k <= spec.robots.size(); ++k) {
        if (k > 1) assign += ',';
        assign += "p" + std::to_string(k) + "=" + model.name(grid_state_index(spec, spec.robots[k - 1].start, k));
    }

    const std::string text = model_to_text(model);
    if (a.out.empty() || a.out == "-") {
        out << text << "# assign: " << assign << "\n";
    } else {
        write_output(a.out, text, out);
        out << assign << "\n";
    }

    if (!a.formula.empty()) {
        Formula f = Formula::truth();
        try {
            if (a.formula == "ca")
                f = build_psi_ca(a.n, a.k, a.theta);
            else if (a.formula == "goal")
                f = build_psi_goal(a.n, a.k, a.theta1, a.theta2, a.robot);
            else
                throw UsageError("--formula must be ca or goal");
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        const std::string ftext = to_string(f) + "\n";
        if (a.formula_out.empty())
            out << ftext;
        else
            write_output(a.formula_out, ftext, out);
    }
    return 0;
}

struct ExperimentArgs {
    int table = 2;
    unsigned runs = 50;
    std::uint64_t seed = 0;
    double timeout_s = 1800.0;
    std::uint64_t max_samples = 1'000'000;
    std::string sizes = "4,6,8,10";
    std::string timing = "wall";
    std::string out;
    unsigned threads = 0;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
    ExperimentOptions o;
    o.table = a.table;
    o.runs = a.runs;
    o.seed = a.seed;
    o.timeout_s = a.timeout_s;
    o.max_samples = a.max_samples;
    o.timing = a.timing != "none";
    o.threads = a.threads;
    o.sizes.clear();
    for (const auto& s : split(a.sizes, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long n = std::stoul(s, &used);
            if (used != s.size() || n < 2) throw std::invalid_argument(s);
            o.sizes.push_back(static_cast<unsigned>(n));
        } catch (const std::exception&) {
            throw UsageError("--sizes expects grid sides of at least 2, e.g. 4,6");
        }
    }
    if (o.runs == 0) throw UsageError("--runs must be at least 1");
    if (o.max_samples == 0) throw UsageError("--max-samples must be at least 1");
    if (!(o.timeout_s > 0.0)) throw UsageError("--timeout-s must be positive");

    std::string text = experiment_header() + "\n";
    for (const auto& row : run_experiment(o)) text += to_csv_row(row) + "\n";
    write_output(a.out, text, out);
    return 0;
}

struct OracleArgs {
    std::string model;
    std::string formula;
    std::string assign;
    std::vector<std::string> assign_paths;
    std::uint64_t seed = 0;
    std::string format = "text";
    std::size_t max_states = OracleLimits{}.max_states;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
    const Dtmc model = load_model_file(a.model);
    const Formula psi = load_formula(a.formula);
    const PathAssignment v = build_assignment(model, psi, a.assign, a.assign_paths, a.seed);
    OracleLimits limits;
    limits.max_states = a.max_states;

    ExactResult r;
    if (psi.is_probabilistic()) {
        r = exact_verdict(model, psi, v, limits);
    } else {
        r.verdict = exact_evaluate(model, psi, v, limits);
    }
    if (a.format == "json") {
        nlohmann::ordered_json o;
        o["formula"] = to_string(psi);
        o["assignment"] = assignment_to_string(model, v);
        o["probabilities"] = r.probabilities;
        o["verdict"] = r.verdict ? "TRUE" : "FALSE";
        o["on_boundary"] = r.on_boundary;
        out << o.dump(2) << "\n";
    } else {
        out << "verdict: " << (r.verdict ? "TRUE" : "FALSE") << "\n";
        if (psi.is_probabilistic()) {
            out << "probabilities:";
            for (double p : r.probabilities) out << ' ' << format_number(p);
            out << "\non_boundary: " << (r.on_boundary ? "true" : "false") << "\n";
        }
        out << "assignment: " << assignment_to_string(model, v) << "\n";
    }
    return r.verdict ? kExitTrue : kExitFalse;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Statistical model checking of HyperPCTL* formulae on discrete-time Markov chains", "hyperver"};
    app.require_subcommand(1);

    CheckArgs ca;
    auto* check_cmd = app.add_subcommand("check", "Verify a formula on a model by sampling");
    check_cmd->add_option("--model", ca.model, "Model file")->required();
    check_cmd->add_option("--formula", ca.formula, "Formula file or formula text")->required();
    check_cmd->add_option("--assign", ca.assign, "Start states: var=state[,var=state...]");
    check_cmd->add_option("--assign-path", ca.assign_paths, "Explicit traces: var=s0,s1,...[;var=...]");
    check_cmd->add_option("--alpha", ca.alpha, "Type-I error bound");
    check_cmd->add_option("--beta", ca.beta, "Type-II error bound");
    check_cmd->add_option("--prior", ca.prior, "Beta prior shapes A,B");
    check_cmd->add_option("--method", ca.method, "bayes or sprt")->check(CLI::IsMember({"bayes", "sprt"}));
    check_cmd->add_option("--eps", ca.eps, "SPRT indifference half-width");
    check_cmd->add_option("--seed", ca.seed, "Master seed");
    check_cmd->add_option("--max-samples", ca.max_samples, "Largest batch size before giving up");
    check_cmd->add_option("--timeout-s", ca.timeout_s, "Wall-clock limit in seconds");
    check_cmd->add_option("--repeat", ca.repeat, "Number of runs with derived seeds");
    check_cmd->add_option("--out", ca.out, "Report file (default stdout)");
    check_cmd->add_option("--format", ca.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    check_cmd->add_option("--timing", ca.timing, "wall or none")->check(CLI::IsMember({"wall", "none"}));
    check_cmd->add_option("--threads", ca.threads, "Worker threads (0 = HYPERVER_THREADS or all cores)");
    check_cmd->add_flag("--no-cache", ca.no_cache, "Recompute nested verdicts instead of memoising them");

    GridArgs ga;
    auto* grid_cmd = app.add_subcommand("gridworld", "Generate the multi-robot grid-world model");
    grid_cmd->add_option("--n", ga.n, "Grid side")->required();
    grid_cmd->add_option("--layout", ga.layout, "default, goal11 or goal01")
        ->check(CLI::IsMember({"default", "goal11", "goal01"}));
    grid_cmd->add_option("--robots", ga.robots, "Explicit robots: row,col>row,col[;...] (start>goal)");
    grid_cmd->add_option("--out", ga.out, "Model file (default stdout)");
    grid_cmd->add_option("--formula", ga.formula, "Also print psi_ca (ca) or psi_goal (goal)")
        ->check(CLI::IsMember({"ca", "goal"}));
    grid_cmd->add_option("--K", ga.k, "Time bound for the formula");
    grid_cmd->add_option("--theta", ga.theta, "Threshold of psi_ca");
    grid_cmd->add_option("--theta1", ga.theta1, "Outer threshold of psi_goal");
    grid_cmd->add_option("--theta2", ga.theta2, "Inner threshold of psi_goal");
    grid_cmd->add_option("--robot", ga.robot, "Robot of psi_goal (1 or 2)");
    grid_cmd->add_option("--formula-out", ga.formula_out, "Formula file (default stdout)");

    ExperimentArgs ea;
    auto* exp_cmd = app.add_subcommand("experiment", "Regenerate one of the benchmark tables");
    exp_cmd->add_option("--table", ea.table, "1, 2 or 3")->check(CLI::IsMember({1, 2, 3}));
    exp_cmd->add_option("--runs", ea.runs, "Runs per cell");
    exp_cmd->add_option("--seed", ea.seed, "Master seed");
    exp_cmd->add_option("--timeout-s", ea.timeout_s, "Wall-clock limit per run");
    exp_cmd->add_option("--max-samples", ea.max_samples, "Largest batch size per run");
    exp_cmd->add_option("--sizes", ea.sizes, "Grid sides, e.g. 4,6,8,10");
    exp_cmd->add_option("--timing", ea.timing, "wall or none")->check(CLI::IsMember({"wall", "none"}));
    exp_cmd->add_option("--out", ea.out, "CSV file (default stdout)");
    exp_cmd->add_option("--threads", ea.threads, "Worker threads (0 = HYPERVER_THREADS or all cores)");

    OracleArgs oa;
    auto* oracle_cmd = app.add_subcommand("oracle", "Compute exact probabilities and verdicts on small models");
    oracle_cmd->add_option("--model", oa.model, "Model file")->required();
    oracle_cmd->add_option("--formula", oa.formula, "Formula file or formula text")->required();
    oracle_cmd->add_option("--assign", oa.assign, "Start states: var=state[,var=state...]");
    oracle_cmd->add_option("--assign-path", oa.assign_paths, "Explicit traces: var=s0,s1,...[;var=...]");
    oracle_cmd->add_option("--seed", oa.seed, "Seed for sampled assignment paths");
    oracle_cmd->add_option("--format", oa.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    oracle_cmd->add_option("--max-states", oa.max_states, "State budget of the exact computation");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("hyperver");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "hyperver: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (check_cmd->parsed()) return cmd_check(ca, out);
        if (grid_cmd->parsed()) return cmd_gridworld(ga, out);
        if (exp_cmd->parsed()) return cmd_experiment(ea, out);
        if (oracle_cmd->parsed()) return cmd_oracle(oa, out);
    } catch (const UsageError& e) {
        err << "hyperver: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InputError& e) {
        err << "hyperver: " << e.what() << "\n";
        return kExitNoInput;
    } catch (const EvaluationError& e) {
        err << "hyperver: " << e.what() << "\n";
        return kExitUsage;
    } catch (const OracleBudgetError& e) {
        err << "hyperver: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        err << "hyperver: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace hyperver::cli
