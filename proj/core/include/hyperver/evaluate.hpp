#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hyperver/formula.hpp"
#include "hyperver/model.hpp"
#include "hyperver/sampler.hpp"

namespace hyperver {

/// Type-I / Type-II error pair attached to a verdict.
struct ErrorBudget {
    double type1 = 0.0;
    double type2 = 0.0;

    friend bool operator==(const ErrorBudget&, const ErrorBudget&) = default;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maps path variables to finite paths. Each binding carries its own
/// offset: shifting advances every binding, while rebinding installs fresh
/// paths at offset 0 and leaves the others where they are.
class PathAssignment {
public:
    PathAssignment() = default;

    void bind(std::string variable, FinitePath path);

    /// V^(steps)
    PathAssignment shifted(std::size_t steps) const;
    /// V[vars -> paths]
    PathAssignment rebound(std::span<const std::string> variables, std::vector<FinitePath> paths) const;

    bool contains(std::string_view variable) const;
    /// State of `variable` at `steps` past its current offset. Throws
    /// EvaluationError for an unmapped variable or a path that is too short.
    StateIndex state(std::string_view variable, std::size_t steps = 0) const;
    /// Number of states available from the current offset.
    std::size_t remaining(std::string_view variable) const;
    std::size_t offset(std::string_view variable) const;
    /// The full underlying path (ignoring the offset).
    const FinitePath& path(std::string_view variable) const;

    std::vector<std::string> variables() const;
    bool empty() const noexcept { return bindings_.empty(); }

private:
    struct Binding {
        std::string variable;
        std::shared_ptr<const FinitePath> path;
        std::size_t offset = 0;
    };
    const Binding& find(std::string_view variable) const;
    std::vector<Binding> bindings_;  // sorted by variable
};

/// Answers probabilistic subformulae during evaluation. Implementations
/// must return the same verdict when asked twice about the same formula
/// node and assignment within one run.
class VerdictProvider {
public:
    virtual ~VerdictProvider() = default;
    virtual bool decide(const Formula& prob, const PathAssignment& at) = 0;
    virtual ErrorBudget error_bounds(const Formula& /*prob*/) const { return {}; }
};

/// Provider for formulas without probabilistic subformulae; asking it
/// anything throws.
class NoNestedProvider final : public VerdictProvider {
public:
    bool decide(const Formula& prob, const PathAssignment& at) override;
};

/// Truth value of `f` under `v`, with Prob nodes delegated to `provider`
/// at the correspondingly shifted assignment.
bool evaluate(const Dtmc& model, const Formula& f, const PathAssignment& v, VerdictProvider& provider);

/// Samples one path per variable of `horizon` from the given start
/// states, each long enough for its horizon entry.
PathAssignment materialize_assignment(const Dtmc& model, const std::map<std::string, std::size_t>& horizon,
                                      const std::map<std::string, StateIndex>& starts, std::uint64_t seed);

/// Renders an assignment as "p1=s0,s1;p2=t0" using state names.
std::string assignment_to_string(const Dtmc& model, const PathAssignment& v);
/// Inverse of assignment_to_string; also accepts a single start state per
/// variable.
PathAssignment parse_assignment(const Dtmc& model, std::string_view text);

}  // namespace hyperver
