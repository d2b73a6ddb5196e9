#pragma once

namespace hyperver {

/// I_x(a, b) together with its complement 1 - I_x(a, b), each computed
/// directly so that neither suffers cancellation near 0 or 1.
struct IncompleteBeta {
    double value;
    double complement;
};

/// Regularized incomplete beta function for a, b > 0 and x in [0, 1].
/// Throws std::domain_error outside that domain.
IncompleteBeta regularized_incomplete_beta(double x, double a, double b);

/// Beta(a, b) distribution on [0, 1]; Beta(1, 1) is the uniform prior.
class BetaPrior {
public:
    /// Throws std::invalid_argument unless a > 0 and b > 0 (and finite).
    BetaPrior(double a = 1.0, double b = 1.0);

    static BetaPrior uniform() { return BetaPrior(1.0, 1.0); }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    double pdf(double x) const;
    double cdf(double x) const;

    /// Conjugate update after `successes` out of `trials` Bernoulli draws.
    BetaPrior posterior(unsigned long long successes, unsigned long long trials) const;

    friend bool operator==(const BetaPrior&, const BetaPrior&) = default;

private:
    double a_;
    double b_;
};

/// Probability mass of [lower, upper] under Beta(a, b), with the
/// complementary mass computed from the tails.
struct IntervalMass {
    double mass;
    double complement;
};

IntervalMass beta_interval_mass(const BetaPrior& prior, double lower, double upper);

}  // namespace hyperver
