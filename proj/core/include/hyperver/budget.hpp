#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>

#include "hyperver/evaluate.hpp"
#include "hyperver/formula.hpp"
#include "hyperver/region.hpp"

namespace hyperver {

/// Budgets of the maximal probabilistic subformulae, keyed by node id.
using LeafBudgets = std::map<std::uint64_t, ErrorBudget>;

class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Error bounds of a path formula from those of its probabilistic leaves:
/// atoms are exact, negation swaps, next passes through, conjunction sums
/// Type-I and maximises Type-II, and phi1 U<=k phi2 gives
/// (k E1(phi1) + E1(phi2), (k+1) max(E2(phi1), E2(phi2))).
/// Throws BudgetError when a leaf is missing from `leaves`.
ErrorBudget propagate_errors(const Formula& phi, const LeafBudgets& leaves);

/// Leaf budgets whose propagation through `phi` stays within `target`
/// componentwise. A node reached along several routes keeps the smallest
/// quota it was offered.
LeafBudgets allocate_budgets(const Formula& phi, ErrorBudget target);
LeafBudgets allocate_budgets(const Formula& phi, double delta_target);

/// Indifference width for a nested test on region d: min(cap, kappa * s)
/// with s the smallest width / (2 * interior faces) over intervals that
/// have interior faces, so that reducing d by 2 delta leaves a box.
/// Throws BudgetError for an interval narrower than 1e-6 with interior
/// faces.
double choose_delta(const BoxRegion& d, double kappa, double cap);

}  // namespace hyperver
