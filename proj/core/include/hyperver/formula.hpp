#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hyperver/region.hpp"

namespace hyperver {

enum class NodeKind { True, Atom, Not, And, Next, Until, Prob };

class Formula;

namespace detail {
struct FormulaNode;
}

struct ProbArgument;
class FormulaFactory;

/// Immutable HyperPCTL* formula handle (shared AST node). Derived operators
/// are desugared on construction, so every node is one of the seven core
/// kinds: truth constant, atom, negation, conjunction, next, bounded until
/// and the probabilistic predicate.
class Formula {
public:
    static Formula truth();
    static Formula atom(std::string proposition, std::string variable);
    static Formula negation(Formula f);
    static Formula conjunction(Formula lhs, Formula rhs);
    static Formula next(Formula f);
    static Formula until(Formula lhs, unsigned bound, Formula rhs);
    /// Throws std::invalid_argument if the region dimension differs from
    /// the argument count or an argument has no variables.
    static Formula prob(BoxRegion region, std::vector<ProbArgument> args);

    static Formula disjunction(Formula lhs, Formula rhs);
    static Formula implication(Formula lhs, Formula rhs);
    static Formula eventually(unsigned bound, Formula f);
    static Formula always(unsigned bound, Formula f);
    /// Balanced disjunction of a non-empty list.
    static Formula any_of(std::vector<Formula> disjuncts);

    NodeKind kind() const;
    /// Process-unique node identity (used for budgets and caches).
    std::uint64_t id() const;
    /// Content hash; equal for structurally identical formulas, stable
    /// across processes.
    std::uint64_t structural_hash() const;

    const std::string& proposition() const;  // Atom
    const std::string& variable() const;     // Atom
    const Formula& child() const;            // Not, Next
    const Formula& lhs() const;              // And, Until
    const Formula& rhs() const;              // And, Until
    unsigned bound() const;                  // Until
    const BoxRegion& region() const;         // Prob
    std::span<const ProbArgument> arguments() const;  // Prob

    bool is_probabilistic() const { return kind() == NodeKind::Prob; }
    /// True when this node or any descendant is a Prob node.
    bool contains_probabilistic() const;
    /// Prob node whose argument bodies contain further Prob nodes.
    bool is_nested() const;

    const detail::FormulaNode* node() const noexcept { return node_.get(); }
    friend bool operator==(const Formula& a, const Formula& b) { return a.node_ == b.node_; }

private:
    friend class FormulaFactory;
    explicit Formula(std::shared_ptr<const detail::FormulaNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const detail::FormulaNode> node_;
};

struct ProbArgument {
    std::vector<std::string> variables;
    Formula body;
};

class FormulaError : public std::runtime_error {
public:
    FormulaError(const std::string& what, std::size_t position);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Parses the surface syntax:
///
///     phi := atom '@' var | '!' phi | '(' phi '&' phi ')' | '(' phi '|' phi ')'
///          | '(' phi '->' phi ')' | 'X' phi | '(' phi 'U<=' nat phi ')'
///          | 'F<=' nat phi | 'G<=' nat phi | 'true' | prob
///     prob := 'P' '{' interval (',' interval)* '}' '(' prarg (',' prarg)* ')'
///     prarg := 'Pr' '[' var (',' var)* ']' '(' phi ')'
///
/// Chains of the same binary connective, e.g. (a@p & b@p & c@p), are
/// accepted as a convenience.
Formula parse_formula(std::string_view text);

/// Prints core syntax that parse_formula reads back to an equal structure.
std::string to_string(const Formula& f);

/// Structural equality (same tree shape, atoms, bounds and regions).
bool structurally_equal(const Formula& a, const Formula& b);

/// Number of steps past the current shift that evaluation may read.
/// Atom, truth: 0; Not: child; And: max; Next: 1 + child; Until(k):
/// k + max(children). A Prob node resamples its own tuple variables, so
/// it contributes only the reads its bodies make of variables bound
/// outside it (0 when it only looks at current states).
std::size_t depth(const Formula& f);

/// Variables the assignment must supply, with the furthest offset at which
/// each is read relative to the current shift. A Pr tuple variable that is
/// not bound further out counts at offset 0, since its fresh paths start
/// from the assigned state.
std::map<std::string, std::size_t> variable_horizon(const Formula& f);

/// Keys of variable_horizon.
std::set<std::string> free_variables(const Formula& f);

struct ClosednessViolation {
    std::string variable;
    std::string argument;  // printed Pr argument that references it
};

struct ClosednessReport {
    std::vector<ClosednessViolation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Every Pr argument body may only reference its own tuple variables or
/// variables bound by an enclosing Pr argument.
ClosednessReport check_closed(const Formula& f);

/// Visits each maximal Prob subformula of f (not descending into Prob
/// bodies). If f itself is a Prob node it is the only one visited.
void for_each_probabilistic_leaf(const Formula& f, const std::function<void(const Formula&)>& visit);

}  // namespace hyperver
