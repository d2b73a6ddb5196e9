#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperver/beta.hpp"
#include "hyperver/region.hpp"

namespace hyperver {

/// Sufficient statistics of N joint Bernoulli samples: one success count
/// per dimension.
struct BernoulliCounts {
    std::vector<std::uint64_t> successes;
    std::uint64_t trials = 0;

    BernoulliCounts() = default;
    /// Throws std::invalid_argument if any count exceeds `trials`.
    BernoulliCounts(std::vector<std::uint64_t> successes, std::uint64_t trials);
    static BernoulliCounts empty(std::size_t dimension) { return BernoulliCounts(std::vector<std::uint64_t>(dimension, 0), 0); }

    std::size_t dimension() const noexcept { return successes.size(); }
};

/// Mass of a box and of its complement, each accurate near 0.
struct BoxMass {
    double mass;
    double complement;
};

/// Prior mass of the box under independent identical Beta priors.
BoxMass prior_box_mass(const BetaPrior& prior, const BoxRegion& d);
/// Conjugate posterior mass of the box.
BoxMass posterior_box_mass(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d);

double prior_mass(const BetaPrior& prior, const BoxRegion& d);
double posterior_mass(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d);

class DegeneratePriorMass : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Bayes factor kept in log space. `saturated` is set when the posterior
/// mass rounded to exactly 0 or 1, in which case log_value is -inf or +inf.
struct BayesFactor {
    double log_value = 0.0;
    bool saturated = false;

    double value() const;
};

/// Posterior odds of the box divided by its prior odds. Throws
/// DegeneratePriorMass when the prior mass is not in (0, 1).
BayesFactor bayes_factor(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d);

enum class TestDecision { AcceptH0, RejectH0, Continue, Indifferent };

std::string to_string(TestDecision decision);

/// Accept when b >= 1/beta, reject when b <= alpha (ties count as crossing).
TestDecision bayes_test(double b, double alpha, double beta);
TestDecision bayes_test(const BayesFactor& b, double alpha, double beta);

/// Prior-ratio corrections of the approximate test:
/// r1 = P(D) / P(D+_{2 delta}), r2 = (1 - P(D)) / (1 - P(D-_{2 delta})).
struct ApproxConstants {
    double r1;
    double r2;
};

ApproxConstants approx_constants(const BetaPrior& prior, const BoxRegion& d, double delta);

class EmptyReducedRegion : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Bayes test on data whose parameters are only known to lie within delta
/// of the true ones. Throws EmptyReducedRegion when D-_delta is empty and
/// DegeneratePriorMass when P(D) is not in (0, 1).
TestDecision approx_bayes_test(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d, double delta,
                               double alpha, double beta);

class SprtRangeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Wald SPRT per interior face of the box, with the two hypotheses placed
/// at theta -/+ eps. The box accepts when every face accepts containment
/// and rejects as soon as one face rejects. A face that sits on 0 or 1 is
/// part of the cube boundary: its alternative is the boundary point
/// itself, so it accepts on the first observation strictly on the
/// containment side and otherwise never resolves.
TestDecision sprt_test(const BernoulliCounts& counts, const BoxRegion& d, double eps, double alpha, double beta);

}  // namespace hyperver
