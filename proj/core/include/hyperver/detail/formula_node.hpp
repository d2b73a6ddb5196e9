#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperver/formula.hpp"

namespace hyperver::detail {

struct FormulaNode {
    NodeKind kind = NodeKind::True;
    std::uint64_t id = 0;
    std::uint64_t hash = 0;
    bool has_prob = false;

    std::string proposition;  // Atom
    std::string variable;     // Atom
    std::vector<Formula> children;
    unsigned bound = 0;                // Until
    std::optional<BoxRegion> region;   // Prob
    std::vector<ProbArgument> args;    // Prob
};

}  // namespace hyperver::detail
