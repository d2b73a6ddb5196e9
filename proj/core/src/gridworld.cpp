#include "hyperver/gridworld.hpp"

#include <stdexcept>

namespace hyperver {

void GridSpec::validate() const {
    if (n == 0) throw std::invalid_argument("grid side must be at least 1");
    if (robots.empty()) throw std::invalid_argument("grid needs at least one robot");
    for (std::size_t k = 0; k < robots.size(); ++k) {
        for (const Cell& c : {robots[k].start, robots[k].goal})
            if (c.row >= n || c.col >= n)
                throw std::invalid_argument("robot " + std::to_string(k + 1) + " uses cell (" + std::to_string(c.row) +
                                            "," + std::to_string(c.col) + ") outside the " + std::to_string(n) + "x" +
                                            std::to_string(n) + " grid");
    }
}

GridSpec make_layout(unsigned n, Layout layout) {
    if (n == 0) throw std::invalid_argument("grid side must be at least 1");
    GridSpec spec;
    spec.n = n;
    spec.robots = {{{0, 0}, {0, n - 1}}, {{n - 1, n - 1}, {n - 1, 0}}};
    if (layout == Layout::Goal11) spec.robots[0].goal = {1, 1};
    if (layout == Layout::Goal01) spec.robots[0].goal = {0, 1};
    spec.validate();
    return spec;
}

Layout parse_layout(const std::string& name) {
    if (name == "default") return Layout::Default;
    if (name == "goal11") return Layout::Goal11;
    if (name == "goal01") return Layout::Goal01;
    throw std::invalid_argument("unknown layout '" + name + "' (expected default, goal11 or goal01)");
}

std::string to_string(Layout layout) {
    switch (layout) {
        case Layout::Default:
            return "default";
        case Layout::Goal11:
            return "goal11";
        case Layout::Goal01:
            return "goal01";
    }
    return "?";
}

std::string grid_state_name(unsigned row, unsigned col, unsigned robot) {
    return "q_" + std::to_string(row) + "_" + std::to_string(col) + "_" + std::to_string(robot);
}

StateIndex grid_state_index(const GridSpec& spec, Cell cell, unsigned robot) {
    if (robot == 0 || robot > spec.robots.size()) throw std::invalid_argument("robot index out of range");
    return static_cast<StateIndex>((robot - 1) * spec.n * spec.n + cell.row * spec.n + cell.col);
}

Dtmc build_grid_dtmc(const GridSpec& spec) {
    spec.validate();
    const unsigned n = spec.n;
    std::vector<StateDecl> states;
    std::vector<std::vector<Transition>> rows;
    states.reserve(spec.robots.size() * n * n);
    rows.reserve(spec.robots.size() * n * n);
    for (unsigned k = 1; k <= spec.robots.size(); ++k) {
        const Cell goal = spec.robots[k - 1].goal;
        for (unsigned i = 0; i < n; ++i) {
            for (unsigned j = 0; j < n; ++j) {
                StateDecl decl{grid_state_name(i, j, k), {"a_" + std::to_string(i) + "_" + std::to_string(j)}};
                if (goal == Cell{i, j}) decl.labels.push_back("g_" + std::to_string(k));
                states.push_back(std::move(decl));

                std::vector<Cell> next;
                if (i > 0) next.push_back({i - 1, j});
                if (j > 0) next.push_back({i, j - 1});
                if (j + 1 < n) next.push_back({i, j + 1});
                if (i + 1 < n) next.push_back({i + 1, j});
                if (next.empty()) next.push_back({i, j});
                std::vector<Transition> row;
                for (const Cell& c : next)
                    row.push_back({grid_state_index(spec, c, k), 1.0 / static_cast<double>(next.size())});
                rows.push_back(std::move(row));
            }
        }
    }
    return Dtmc(std::move(states), std::move(rows));
}

Formula build_collision(unsigned n, const std::string& x, const std::string& y) {
    std::vector<Formula> cells;
    cells.reserve(static_cast<std::size_t>(n) * n);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            const std::string a = "a_" + std::to_string(i) + "_" + std::to_string(j);
            cells.push_back(Formula::conjunction(Formula::atom(a, x), Formula::atom(a, y)));
        }
    return Formula::any_of(std::move(cells));
}

Formula build_psi_ca(unsigned n, unsigned k, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
    Formula body = Formula::eventually(k, build_collision(n, "p1", "p2"));
    return Formula::prob(BoxRegion({{0.0, theta}}), {ProbArgument{{"p1", "p2"}, std::move(body)}});
}

Formula build_psi_goal(unsigned n, unsigned k, double theta1, double theta2, unsigned robot) {
    if (!(theta1 >= 0.0 && theta1 <= 1.0) || !(theta2 >= 0.0 && theta2 <= 1.0))
        throw std::invalid_argument("thresholds must lie in [0, 1]");
    if (robot != 1 && robot != 2) throw std::invalid_argument("psi_goal is defined for robot 1 or 2");
    const std::string self = robot == 1 ? "p1" : "p2";
    const std::string other = robot == 1 ? "p2" : "p1";
    Formula nocol = Formula::prob(BoxRegion({{theta2, 1.0}}),
                                  {ProbArgument{{other}, Formula::negation(build_collision(n, "p1", "p2"))}});
    Formula reach = Formula::until(std::move(nocol), k, Formula::atom("g_" + std::to_string(robot), self));
    return Formula::prob(BoxRegion({{theta1, 1.0}}), {ProbArgument{{self}, std::move(reach)}});
}

}  // namespace hyperver
