#pragma once

#include <string>
#include <vector>

#include "hyperver/formula.hpp"
#include "hyperver/model.hpp"

namespace hyperver {

struct Cell {
    unsigned row = 0;
    unsigned col = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

struct RobotSpec {
    Cell start;
    Cell goal;
};

enum class MovePolicy { UniformOverFeasible };

enum class Layout { Default, Goal11, Goal01 };

/// n x n grid with independent random-walking robots.
struct GridSpec {
    unsigned n = 1;
    std::vector<RobotSpec> robots;
    MovePolicy policy = MovePolicy::UniformOverFeasible;

    /// Throws std::invalid_argument for an empty robot list or cells
    /// outside the grid.
    void validate() const;
};

/// Two robots: robot 1 from (0,0) to (0,n-1), robot 2 from (n-1,n-1) to
/// (n-1,0). Goal11 and Goal01 move robot 1's goal to (1,1) and (0,1).
GridSpec make_layout(unsigned n, Layout layout);
Layout parse_layout(const std::string& name);
std::string to_string(Layout layout);

/// "q_<row>_<col>_<robot>" with robot numbered from 1.
std::string grid_state_name(unsigned row, unsigned col, unsigned robot);
StateIndex grid_state_index(const GridSpec& spec, Cell cell, unsigned robot);

/// States are ordered by robot, then row, then column. Each state carries
/// a_<row>_<col>, and g_<robot> on its robot's goal cell. A robot moves
/// to one of its orthogonal neighbours uniformly (a 1 x 1 grid loops).
Dtmc build_grid_dtmc(const GridSpec& spec);

/// Disjunction over all cells of (a_ij@x & a_ij@y).
Formula build_collision(unsigned n, const std::string& x, const std::string& y);

/// P{[0,theta]}(Pr[p1,p2](F<=K collision(p1,p2)))
Formula build_psi_ca(unsigned n, unsigned k, double theta);

/// P{[theta1,1]}(Pr[p1]((nocol U<=K g_1@p1))) with
/// nocol = P{[theta2,1]}(Pr[p2](!collision(p1,p2))). For robot 2 the roles
/// of p1 and p2 swap and the goal atom is g_2@p2.
Formula build_psi_goal(unsigned n, unsigned k, double theta1, double theta2, unsigned robot = 1);

}  // namespace hyperver
