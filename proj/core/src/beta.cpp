#include "hyperver/beta.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hyperver {

namespace {

double log_gamma(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double x, double a, double b) {
    constexpr int kMaxIterations = 200000;
    constexpr double kEpsilon = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEpsilon) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

IncompleteBeta regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw std::domain_error("incomplete beta needs finite a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete beta needs x in [0, 1]");
    if (x == 0.0) return {0.0, 1.0};
    if (x == 1.0) return {1.0, 0.0};

    const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        const double v = front * beta_continued_fraction(x, a, b) / a;
        return {v, 1.0 - v};
    }
    const double w = front * beta_continued_fraction(1.0 - x, b, a) / b;
    return {1.0 - w, w};
}

BetaPrior::BetaPrior(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("Beta prior shapes must be finite and positive, got a=" + std::to_string(a) +
                                    " b=" + std::to_string(b));
}

double BetaPrior::pdf(double x) const {
    if (x < 0.0 || x > 1.0) return 0.0;
    if ((x == 0.0 && a_ < 1.0) || (x == 1.0 && b_ < 1.0)) return std::numeric_limits<double>::infinity();
    if ((x == 0.0 && a_ > 1.0) || (x == 1.0 && b_ > 1.0)) return 0.0;
    const double log_norm = log_gamma(a_ + b_) - log_gamma(a_) - log_gamma(b_);
    const double la = (a_ == 1.0) ? 0.0 : (a_ - 1.0) * std::log(x);
    const double lb = (b_ == 1.0) ? 0.0 : (b_ - 1.0) * std::log1p(-x);
    return std::exp(log_norm + la + lb);
}

double BetaPrior::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return regularized_incomplete_beta(x, a_, b_).value;
}

BetaPrior BetaPrior::posterior(unsigned long long successes, unsigned long long trials) const {
    if (successes > trials) throw std::invalid_argument("more successes than trials");
    return BetaPrior(a_ + static_cast<double>(successes), b_ + static_cast<double>(trials - successes));
}

IntervalMass beta_interval_mass(const BetaPrior& prior, double lower, double upper) {
    if (!(0.0 <= lower && lower <= upper && upper <= 1.0)) throw std::invalid_argument("interval outside [0, 1]");
    const IncompleteBeta lo = regularized_incomplete_beta(lower, prior.a(), prior.b());
    const IncompleteBeta hi = regularized_incomplete_beta(upper, prior.a(), prior.b());
    // Subtract whichever pair of tails is smaller to keep relative accuracy.
    double mass = hi.value <= 0.5 ? hi.value - lo.value : lo.complement - hi.complement;
    if (mass < 0.0) mass = 0.0;
    double complement = lo.value + hi.complement;
    if (complement > 1.0) complement = 1.0;
    return {mass, complement};
}

}  // namespace hyperver
