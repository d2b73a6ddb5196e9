#include <map>
#include <set>

#include "hyperver/cli.hpp"
#include "hyperver/gridworld.hpp"

namespace hyperver::cli {

namespace {

struct Cell {
    unsigned n;
    unsigned k;
    double alpha;
    Layout layout;
    Formula psi;
    Method method;
    double eps;
    BetaPrior prior;
};

std::string prior_label(const BetaPrior& p) { return "(" + format_number(p.a()) + "," + format_number(p.b()) + ")"; }

std::string method_label(Method m, double eps) { return m == Method::Bayes ? "bayes" : "sprt(" + format_number(eps) + ")"; }

std::vector<Cell> table_cells(const ExperimentOptions& o) {
    std::vector<Cell> cells;
    const std::vector<std::pair<Method, double>> methods = {
        {Method::Bayes, 0.0}, {Method::Sprt, 0.01}, {Method::Sprt, 0.001}};
    for (unsigned n : o.sizes) {
        switch (o.table) {
            case 1: {
                const Layout layout = (n == 4 || n == 8) ? Layout::Goal11 : Layout::Default;
                const Formula psi = build_psi_goal(n, 8, 0.5, 0.5, 1);
                for (const auto& prior : {BetaPrior(1, 1), BetaPrior(5, 2), BetaPrior(2, 5), BetaPrior(2, 2)})
                    cells.push_back({n, 8, 0.01, layout, psi, Method::Bayes, 0.0, prior});
                break;
            }
            case 2:
                for (double alpha : {0.01, 0.001})
                    for (unsigned k : {3u, 8u}) {
                        const Formula psi = build_psi_ca(n, k, 0.5);
                        for (const auto& [m, eps] : methods)
                            cells.push_back({n, k, alpha, Layout::Default, psi, m, eps, BetaPrior::uniform()});
                    }
                break;
            case 3: {
                const Layout layout = (n == 4 || n == 8) ? Layout::Goal01 : Layout::Default;
                for (double alpha : {0.01, 0.001})
                    for (unsigned k : {3u, 8u}) {
                        const Formula psi = build_psi_goal(n, k, 0.3, 0.5, 1);
                        for (const auto& [m, eps] : methods)
                            cells.push_back({n, k, alpha, layout, psi, m, eps, BetaPrior::uniform()});
                    }
                break;
            }
            default:
                throw std::invalid_argument("unknown table " + std::to_string(o.table) + " (expected 1, 2 or 3)");
        }
    }
    return cells;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentOptions& o) {
    if (o.runs == 0) throw std::invalid_argument("experiment needs at least one run per cell");
    std::vector<ExperimentRow> rows;
    std::map<std::pair<unsigned, Layout>, std::pair<GridSpec, Dtmc>> models;
    for (const Cell& cell : table_cells(o)) {
        auto it = models.find({cell.n, cell.layout});
        if (it == models.end()) {
            GridSpec spec = make_layout(cell.n, cell.layout);
            Dtmc model = build_grid_dtmc(spec);
            it = models.emplace(std::make_pair(cell.n, cell.layout), std::make_pair(std::move(spec), std::move(model))).first;
        }
        const GridSpec& spec = it->second.first;
        const Dtmc& model = it->second.second;
        const std::map<std::string, StateIndex> starts = {{"p1", grid_state_index(spec, spec.robots[0].start, 1)},
                                                          {"p2", grid_state_index(spec, spec.robots[1].start, 2)}};
        const PathAssignment v = materialize_assignment(model, variable_horizon(cell.psi), starts, o.seed);

        ExperimentRow row;
        row.n = cell.n;
        row.k = cell.k;
        row.alpha = cell.alpha;
        row.beta = cell.alpha;
        row.method = method_label(cell.method, cell.eps);
        row.prior = prior_label(cell.prior);

        SmcConfig cfg;
        cfg.prior = cell.prior;
        cfg.alpha = cell.alpha;
        cfg.beta = cell.alpha;
        cfg.method = cell.method;
        if (cell.method == Method::Sprt) cfg.sprt_eps = cell.eps;
        cfg.max_samples = o.max_samples;
        cfg.timeout_s = o.timeout_s;
        cfg.threads = o.threads;

        double samples = 0.0;
        double seconds = 0.0;
        unsigned undecided = 0;
        std::set<std::string> statuses;
        bool unsupported = false;
        for (unsigned r = 0; r < o.runs && !unsupported; ++r) {
            cfg.seed = o.runs == 1 ? o.seed : derive_seed(o.seed, r);
            try {
                const SmcVerdict result = check(model, cell.psi, v, cfg);
                samples += static_cast<double>(result.samples);
                seconds += result.seconds;
                std::string status = to_string(result.outcome);
                if (result.outcome == Verdict::Undecided) {
                    ++undecided;
                    status += "(" + to_string(result.reason) + ")";
                }
                statuses.insert(status);
            } catch (const UnsupportedError&) {
                unsupported = true;
            }
        }
        if (unsupported) {
            row.status = "UNSUPPORTED";
        } else {
            row.mean_samples = samples / o.runs;
            if (o.timing) row.mean_time_s = seconds / o.runs;
            row.status = statuses.size() == 1 ? *statuses.begin() : "MIXED";
            row.undecided_rate = static_cast<double>(undecided) / o.runs;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace hyperver::cli
