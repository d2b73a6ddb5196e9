#include "hyperver/budget.hpp"

#include <algorithm>
#include <limits>

namespace hyperver {

ErrorBudget propagate_errors(const Formula& phi, const LeafBudgets& leaves) {
    switch (phi.kind()) {
        case NodeKind::True:
        case NodeKind::Atom:
            return {0.0, 0.0};
        case NodeKind::Not: {
            const ErrorBudget c = propagate_errors(phi.child(), leaves);
            return {c.type2, c.type1};
        }
        case NodeKind::Next:
            return propagate_errors(phi.child(), leaves);
        case NodeKind::And: {
            const ErrorBudget l = propagate_errors(phi.lhs(), leaves);
            const ErrorBudget r = propagate_errors(phi.rhs(), leaves);
            return {l.type1 + r.type1, std::max(l.type2, r.type2)};
        }
        case NodeKind::Until: {
            const ErrorBudget l = propagate_errors(phi.lhs(), leaves);
            const ErrorBudget r = propagate_errors(phi.rhs(), leaves);
            const double k = phi.bound();
            return {k * l.type1 + r.type1, (k + 1.0) * std::max(l.type2, r.type2)};
        }
        case NodeKind::Prob: {
            auto it = leaves.find(phi.id());
            if (it == leaves.end()) throw BudgetError("no error budget for probabilistic subformula " + to_string(phi));
            return it->second;
        }
    }
    return {0.0, 0.0};
}

namespace {

void allocate(const Formula& phi, double q1, double q2, LeafBudgets& out) {
    switch (phi.kind()) {
        case NodeKind::True:
        case NodeKind::Atom:
            return;
        case NodeKind::Not:
            allocate(phi.child(), q2, q1, out);
            return;
        case NodeKind::Next:
            allocate(phi.child(), q1, q2, out);
            return;
        case NodeKind::And:
            allocate(phi.lhs(), q1 / 2.0, q2, out);
            allocate(phi.rhs(), q1 / 2.0, q2, out);
            return;
        case NodeKind::Until: {
            const double k = phi.bound();
            if (phi.bound() == 0) {
                allocate(phi.lhs(), q1 / 2.0, q2, out);
                allocate(phi.rhs(), q1 / 2.0, q2, out);
            } else {
                allocate(phi.lhs(), q1 / (2.0 * k), q2 / (k + 1.0), out);
                allocate(phi.rhs(), q1 / 2.0, q2 / (k + 1.0), out);
            }
            return;
        }
        case NodeKind::Prob: {
            auto [it, inserted] = out.emplace(phi.id(), ErrorBudget{q1, q2});
            if (!inserted) {
                it->second.type1 = std::min(it->second.type1, q1);
                it->second.type2 = std::min(it->second.type2, q2);
            }
            return;
        }
    }
}

}  // namespace

LeafBudgets allocate_budgets(const Formula& phi, ErrorBudget target) {
    if (!(target.type1 > 0.0 && target.type1 < 1.0 && target.type2 > 0.0 && target.type2 < 1.0))
        throw BudgetError("error budget targets must lie in (0, 1)");
    LeafBudgets out;
    allocate(phi, target.type1, target.type2, out);
    return out;
}

LeafBudgets allocate_budgets(const Formula& phi, double delta_target) {
    return allocate_budgets(phi, ErrorBudget{delta_target, delta_target});
}

double choose_delta(const BoxRegion& d, double kappa, double cap) {
    if (!(kappa > 0.0) || !(cap > 0.0)) throw BudgetError("delta policy parameters must be positive");
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.dimension(); ++i) {
        const int faces = d.interior_faces(i);
        if (faces == 0) continue;
        if (d[i].width() < 1e-6)
            throw BudgetError("region " + d.to_string() + " is too narrow for an approximate test");
        slack = std::min(slack, d[i].width() / (2.0 * faces));
    }
    return std::min(cap, kappa * slack);
}

}  // namespace hyperver
