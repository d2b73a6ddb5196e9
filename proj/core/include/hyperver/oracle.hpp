#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperver/evaluate.hpp"
#include "hyperver/formula.hpp"
#include "hyperver/model.hpp"

namespace hyperver {

struct OracleLimits {
    /// Largest number of (joint state, obligation) pairs held in one DP
    /// layer, and of path tuples visited by enumeration.
    std::size_t max_states = 4'000'000;
};

class OracleBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExactResult {
    std::vector<double> probabilities;  // one per Pr argument
    bool verdict = false;
    /// Some probability lies within 1e-9 of an interior face of the region.
    bool on_boundary = false;
};

/// Probability that fresh paths for `tuple`, started from their current
/// states in `v`, satisfy `phi` together with the rest of `v`. Nested
/// probabilistic subformulae are decided exactly.
double exact_prob(const Dtmc& model, const Formula& phi, const PathAssignment& v, std::span<const std::string> tuple,
                  const OracleLimits& limits = {});

/// Exact probabilities of every Pr argument of a Prob-rooted formula and
/// the resulting region membership.
ExactResult exact_verdict(const Dtmc& model, const Formula& psi, const PathAssignment& v, const OracleLimits& limits = {});

/// Exact truth of an arbitrary closed formula under `v`.
bool exact_evaluate(const Dtmc& model, const Formula& phi, const PathAssignment& v, const OracleLimits& limits = {});

/// Same quantity as exact_prob by enumerating every tuple of paths of the
/// needed length. Exponential; meant for cross-checking on tiny inputs.
double enumerate_prob(const Dtmc& model, const Formula& phi, const PathAssignment& v, std::span<const std::string> tuple,
                      const OracleLimits& limits = {});

/// VerdictProvider backed by the exact oracle, memoised per node and
/// relevant path segments.
class ExactProvider final : public VerdictProvider {
public:
    explicit ExactProvider(const Dtmc& model, OracleLimits limits = {});
    ~ExactProvider() override;

    bool decide(const Formula& prob, const PathAssignment& at) override;
    ExactResult result(const Formula& prob, const PathAssignment& at);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hyperver
