#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperver/beta.hpp"
#include "hyperver/budget.hpp"
#include "hyperver/evaluate.hpp"
#include "hyperver/formula.hpp"
#include "hyperver/hypothesis.hpp"
#include "hyperver/model.hpp"

namespace hyperver {

enum class Method { Bayes, Sprt };
enum class Verdict { True, False, Undecided };
enum class UndecidedReason { None, Indifference, SampleCap, Timeout };

std::string to_string(Method m);
std::string to_string(Verdict v);
std::string to_string(UndecidedReason r);

/// One completed doubling round of a top-level test.
struct RoundInfo {
    std::uint64_t batch = 0;  // N
    BernoulliCounts counts;
    double delta = 0.0;                      // 0 for non-nested tests
    LeafBudgets leaf_budgets;                // budgets handed to nested calls
    std::vector<ErrorBudget> argument_bounds;  // propagated bound of each phi_i
    TestDecision decision = TestDecision::Continue;
};

struct SmcConfig {
    BetaPrior prior = BetaPrior::uniform();
    double alpha = 0.01;
    double beta = 0.01;
    double delta_fraction = 0.25;  // kappa
    double delta_cap = 0.1;
    std::uint64_t max_samples = 1'000'000;  // largest batch N
    double timeout_s = 1800.0;
    std::uint64_t seed = 0;
    Method method = Method::Bayes;
    double sprt_eps = 0.01;
    /// Worker threads for top-level batches; 0 reads HYPERVER_THREADS and
    /// falls back to the hardware concurrency.
    unsigned threads = 1;
    bool cache = true;
    std::function<void(const RoundInfo&)> on_round;

    /// Throws std::invalid_argument on out-of-range settings.
    void validate() const;
};

struct SmcVerdict {
    Verdict outcome = Verdict::Undecided;
    UndecidedReason reason = UndecidedReason::None;
    std::uint64_t samples = 0;        // batch size of the deciding round
    std::uint64_t total_samples = 0;  // joint samples over all rounds and dimensions
    std::uint64_t rounds = 0;
    double seconds = 0.0;
    ErrorBudget budget;  // (Type-I, Type-II) bound the verdict carries
    double delta = 0.0;
};

class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-nested Prob-rooted formula, Bayes' test with doubling batches.
SmcVerdict base_bayes(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg);

/// Any closed formula. Nested probabilistic subformulae are decided on
/// demand by recursive calls and memoised per (node, budget, relevant
/// path segments).
SmcVerdict bayes_smc(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg);

/// Non-nested Prob-rooted formula decided by the per-face SPRT. Nested
/// formulae raise UnsupportedError.
SmcVerdict sprt_smc(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg);

/// Dispatches on cfg.method.
SmcVerdict check(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg);

unsigned resolve_threads(unsigned requested);

}  // namespace hyperver
