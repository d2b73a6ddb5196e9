#include "hyperver/hypothesis.hpp"

#include <cmath>
#include <limits>

namespace hyperver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Product of per-dimension masses; the complement telescopes as
// c1 + m1 c2 + m1 m2 c3 + ... so it stays accurate when the product is near 1.
BoxMass combine(const std::vector<IntervalMass>& parts) {
    double mass = 1.0;
    double complement = 0.0;
    for (const auto& p : parts) {
        complement += mass * p.complement;
        mass *= p.mass;
    }
    if (complement > 1.0) complement = 1.0;
    return {mass, complement};
}

double log_odds_ratio(const BoxMass& posterior, const BoxMass& prior) {
    return std::log(posterior.mass) - std::log(posterior.complement) + std::log(prior.complement) - std::log(prior.mass);
}

// Log Bayes factor with P in {0, 1} mapped to sentinels: a box of full
// prior mass can never be rejected, one of zero mass never accepted.
double log_bayes_or_sentinel(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d) {
    const BoxMass p = prior_box_mass(prior, d);
    if (p.complement <= 0.0) return kInf;
    if (p.mass <= 0.0) return -kInf;
    const BoxMass q = posterior_box_mass(prior, counts, d);
    if (q.mass <= 0.0) return -kInf;
    if (q.complement <= 0.0) return kInf;
    return log_odds_ratio(q, p);
}

void require_probability(double x, const char* name) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
}

}  // namespace

BernoulliCounts::BernoulliCounts(std::vector<std::uint64_t> s, std::uint64_t n) : successes(std::move(s)), trials(n) {
    for (auto m : successes)
        if (m > trials) throw std::invalid_argument("success count exceeds the number of trials");
}

BoxMass prior_box_mass(const BetaPrior& prior, const BoxRegion& d) {
    std::vector<IntervalMass> parts;
    parts.reserve(d.dimension());
    for (const auto& iv : d.intervals()) parts.push_back(beta_interval_mass(prior, iv.lower, iv.upper));
    return combine(parts);
}

BoxMass posterior_box_mass(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d) {
    if (counts.dimension() != d.dimension()) throw std::invalid_argument("counts and region differ in dimension");
    std::vector<IntervalMass> parts;
    parts.reserve(d.dimension());
    for (std::size_t i = 0; i < d.dimension(); ++i) {
        const BetaPrior post = prior.posterior(counts.successes[i], counts.trials);
        parts.push_back(beta_interval_mass(post, d[i].lower, d[i].upper));
    }
    return combine(parts);
}

double prior_mass(const BetaPrior& prior, const BoxRegion& d) { return prior_box_mass(prior, d).mass; }

double posterior_mass(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d) {
    return posterior_box_mass(prior, counts, d).mass;
}

double BayesFactor::value() const { return std::exp(log_value); }

BayesFactor bayes_factor(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d) {
    const BoxMass p = prior_box_mass(prior, d);
    if (!(p.mass > 0.0) || !(p.complement > 0.0))
        throw DegeneratePriorMass("prior mass of " + d.to_string() + " is not in (0, 1)");
    if (counts.trials == 0) return {0.0, false};
    const BoxMass q = posterior_box_mass(prior, counts, d);
    if (q.mass <= 0.0) return {-kInf, true};
    if (q.complement <= 0.0) return {kInf, true};
    return {log_odds_ratio(q, p), false};
}

std::string to_string(TestDecision decision) {
    switch (decision) {
        case TestDecision::AcceptH0:
            return "accept";
        case TestDecision::RejectH0:
            return "reject";
        case TestDecision::Continue:
            return "continue";
        case TestDecision::Indifferent:
            return "indifferent";
    }
    return "?";
}

TestDecision bayes_test(double b, double alpha, double beta) {
    require_probability(alpha, "alpha");
    require_probability(beta, "beta");
    if (b >= 1.0 / beta) return TestDecision::AcceptH0;
    if (b <= alpha) return TestDecision::RejectH0;
    return TestDecision::Continue;
}

TestDecision bayes_test(const BayesFactor& b, double alpha, double beta) {
    require_probability(alpha, "alpha");
    require_probability(beta, "beta");
    if (b.log_value >= -std::log(beta)) return TestDecision::AcceptH0;
    if (b.log_value <= std::log(alpha)) return TestDecision::RejectH0;
    return TestDecision::Continue;
}

ApproxConstants approx_constants(const BetaPrior& prior, const BoxRegion& d, double delta) {
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
    const BoxMass p = prior_box_mass(prior, d);
    const BoxMass wide = prior_box_mass(prior, region_expand(d, 2.0 * delta));
    const auto narrow_region = region_reduce(d, 2.0 * delta);
    const BoxMass narrow = narrow_region ? prior_box_mass(prior, *narrow_region) : BoxMass{0.0, 1.0};
    return {p.mass / wide.mass, p.complement / narrow.complement};
}

TestDecision approx_bayes_test(const BetaPrior& prior, const BernoulliCounts& counts, const BoxRegion& d, double delta,
                               double alpha, double beta) {
    require_probability(alpha, "alpha");
    require_probability(beta, "beta");
    const BoxMass p = prior_box_mass(prior, d);
    if (!(p.mass > 0.0) || !(p.complement > 0.0))
        throw DegeneratePriorMass("prior mass of " + d.to_string() + " is not in (0, 1)");
    const auto reduced = region_reduce(d, delta);
    if (!reduced) throw EmptyReducedRegion("reducing " + d.to_string() + " by " + std::to_string(delta) + " leaves nothing");
    const BoxRegion expanded = region_expand(d, delta);

    const ApproxConstants r = approx_constants(prior, d, delta);
    const double accept_threshold = -std::log(beta) - std::log(r.r2);
    const double reject_threshold = std::log(alpha) + std::log(r.r1);

    const double log_b_reduced = log_bayes_or_sentinel(prior, counts, *reduced);
    const double log_b_expanded = log_bayes_or_sentinel(prior, counts, expanded);

    if (log_b_reduced >= accept_threshold) return TestDecision::AcceptH0;
    if (log_b_expanded <= reject_threshold) return TestDecision::RejectH0;
    if (log_b_expanded >= accept_threshold && log_b_reduced <= reject_threshold) return TestDecision::Indifferent;
    return TestDecision::Continue;
}

namespace {

enum class FaceState { Accept, Reject, Open };

FaceState wald(double lambda, double alpha, double beta) {
    if (lambda >= std::log((1.0 - beta) / alpha)) return FaceState::Accept;
    if (lambda <= std::log(beta / (1.0 - alpha))) return FaceState::Reject;
    return FaceState::Open;
}

// Log-likelihood ratio of containment point h0 against alternative h1.
double log_likelihood_ratio(double m, double n, double h0, double h1) {
    return m * std::log(h0 / h1) + (n - m) * std::log((1.0 - h0) / (1.0 - h1));
}

}  // namespace

TestDecision sprt_test(const BernoulliCounts& counts, const BoxRegion& d, double eps, double alpha, double beta) {
    require_probability(alpha, "alpha");
    require_probability(beta, "beta");
    if (!(eps > 0.0)) throw std::invalid_argument("SPRT eps must be positive");
    if (counts.dimension() != d.dimension()) throw std::invalid_argument("counts and region differ in dimension");

    auto check_range = [&](double theta) {
        if (!(theta - eps > 0.0 && theta + eps < 1.0))
            throw SprtRangeError("SPRT hypotheses around face " + std::to_string(theta) + " leave (0, 1) for eps " +
                                 std::to_string(eps));
    };

    bool all_accept = true;
    const double n = static_cast<double>(counts.trials);
    for (std::size_t i = 0; i < d.dimension(); ++i) {
        const double m = static_cast<double>(counts.successes[i]);
        const Interval iv = d[i];
        FaceState lower = FaceState::Accept;
        FaceState upper = FaceState::Accept;

        if (iv.lower > 0.0 && iv.lower < 1.0) {
            check_range(iv.lower);
            lower = wald(log_likelihood_ratio(m, n, iv.lower + eps, iv.lower - eps), alpha, beta);
        } else {
            lower = iv.lower == 0.0 && m > 0.0 ? FaceState::Accept : FaceState::Open;
        }
        if (iv.upper > 0.0 && iv.upper < 1.0) {
            check_range(iv.upper);
            upper = wald(log_likelihood_ratio(m, n, iv.upper - eps, iv.upper + eps), alpha, beta);
        } else {
            upper = iv.upper == 1.0 && m < n ? FaceState::Accept : FaceState::Open;
        }

        if (lower == FaceState::Reject || upper == FaceState::Reject) return TestDecision::RejectH0;
        if (lower != FaceState::Accept || upper != FaceState::Accept) all_accept = false;
    }
    return all_accept ? TestDecision::AcceptH0 : TestDecision::Continue;
}

}  // namespace hyperver
