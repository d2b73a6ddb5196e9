#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hyperver/beta.hpp"
#include "hyperver/hypothesis.hpp"
#include "hyperver/region.hpp"

using namespace hyperver;

namespace {

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    if (hi <= lo) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
}

BoxRegion box(std::initializer_list<Interval> ivs) { return BoxRegion(std::vector<Interval>(ivs)); }

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("incomplete beta agrees with boost") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> x(0.0, 1.0);
    std::uniform_real_distribution<double> shape(0.2, 300.0);
    for (int i = 0; i < 500; ++i) {
        const double a = shape(rng), b = shape(rng), t = x(rng);
        const IncompleteBeta r = regularized_incomplete_beta(t, a, b);
        CHECK(r.value == doctest::Approx(boost::math::ibeta(a, b, t)).epsilon(1e-10));
        CHECK(r.complement == doctest::Approx(boost::math::ibetac(a, b, t)).epsilon(1e-10));
    }
    CHECK(regularized_incomplete_beta(0.0, 2, 3).value == 0.0);
    CHECK(regularized_incomplete_beta(1.0, 2, 3).value == 1.0);
    CHECK(std::abs(regularized_incomplete_beta(1.0, 0.7, 4.5).value - 1.0) <= 1e-12);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(regularized_incomplete_beta(1.5, 1.0, 1.0), std::domain_error);
}

TEST_CASE("beta prior pdf integrates to one") {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 5.0}, {5.0, 2.0}, {2.0, 2.0}}) {
        const BetaPrior p(a, b);
        CHECK(integrate([&](double t) { return p.pdf(t); }, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.cdf(1.0) == 1.0);
    }
    CHECK(BetaPrior(1, 1).posterior(8, 10) == BetaPrior(9, 3));
    CHECK_THROWS_AS(BetaPrior(0, 1), std::invalid_argument);
}

TEST_CASE("region expansion") {
    CHECK(region_expand(box({{0, 0.5}}), 0.1) == box({{0, 0.6}}));
    const BoxRegion e = region_expand(box({{0.3, 0.7}, {0.5, 1}}), 0.05);
    CHECK(e[0].lower == doctest::Approx(0.25));
    CHECK(e[0].upper == doctest::Approx(0.75));
    CHECK(e[1].lower == doctest::Approx(0.45));
    CHECK(e[1].upper == 1.0);
    const BoxRegion d = box({{0.2, 0.4}});
    CHECK(region_expand(d, 0.0) == d);
}

TEST_CASE("region reduction") {
    const auto r = region_reduce(box({{0, 0.5}}), 0.1);
    REQUIRE(r);
    CHECK(r->intervals()[0].lower == 0.0);
    CHECK(r->intervals()[0].upper == doctest::Approx(0.4));
    CHECK_FALSE(region_reduce(box({{0.45, 0.55}}), 0.1));
    CHECK(region_reduce(box({{0, 1}}), 0.3) == box({{0, 1}}));
    CHECK(box({{0, 1}, {0.2, 1}}).interior_faces(1) == 1);
    CHECK(box({{0.1, 0.9}}).interior_faces(0) == 2);
}

TEST_CASE("prior mass") {
    CHECK(prior_mass(BetaPrior::uniform(), box({{0, 0.5}})) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(prior_mass(BetaPrior::uniform(), box({{0, 0.5}, {0.3, 1}})) == doctest::Approx(0.35).epsilon(1e-15));
    const double quad = integrate([](double t) { return 30.0 * t * std::pow(1 - t, 4); }, 0.0, 0.5);
    CHECK(std::abs(prior_mass(BetaPrior(2, 5), box({{0, 0.5}})) - quad) <= 1e-9);
}

TEST_CASE("posterior mass") {
    const BoxRegion d = box({{0.5, 1}});
    CHECK(posterior_mass(BetaPrior(2, 5), BernoulliCounts::empty(1), d) == prior_mass(BetaPrior(2, 5), d));
    // I_0.5(9,3) = P(Bin(11, 1/2) >= 9) = 67/2048
    double tail = 0;
    for (int k = 9; k <= 11; ++k) tail += std::tgamma(12) / (std::tgamma(k + 1) * std::tgamma(12 - k)) / 2048.0;
    CHECK(tail == doctest::Approx(67.0 / 2048.0).epsilon(1e-15));
    CHECK(std::abs(posterior_mass(BetaPrior::uniform(), BernoulliCounts({8}, 10), d) - 1981.0 / 2048.0) <= 1e-12);
    CHECK(posterior_mass(BetaPrior(3, 4), BernoulliCounts({17, 2}, 30), box({{0, 1}, {0, 1}})) == 1.0);
}

TEST_CASE("bayes factor closed forms") {
    CHECK(bayes_factor(BetaPrior(2, 5), BernoulliCounts::empty(1), box({{0.2, 0.6}})).value() == 1.0);
    const BayesFactor b = bayes_factor(BetaPrior::uniform(), BernoulliCounts({8}, 10), box({{0.5, 1}}));
    CHECK(b.value() == doctest::Approx(1981.0 / 67.0).epsilon(1e-12));
    CHECK_FALSE(b.saturated);
    const BayesFactor c = bayes_factor(BetaPrior::uniform(), BernoulliCounts({0, 0}, 1), box({{0.5, 1}, {0.5, 1}}));
    CHECK(c.value() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(bayes_factor(BetaPrior::uniform(), BernoulliCounts({1}, 2), box({{0, 1}})), DegeneratePriorMass);
    CHECK_THROWS_AS(bayes_factor(BetaPrior::uniform(), BernoulliCounts({1}, 2), box({{0.3, 0.3}})), DegeneratePriorMass);
}

TEST_CASE("bayes factor saturates instead of overflowing") {
    const BayesFactor b = bayes_factor(BetaPrior::uniform(), BernoulliCounts({2000000}, 2000000), box({{0.5, 1}}));
    CHECK(b.log_value > 0);
    CHECK(bayes_test(b, 0.01, 0.01) == TestDecision::AcceptH0);
    const BayesFactor c = bayes_factor(BetaPrior::uniform(), BernoulliCounts({0}, 2000000), box({{0.5, 1}}));
    CHECK(c.log_value < 0);
    CHECK(bayes_test(c, 0.01, 0.01) == TestDecision::RejectH0);
}

TEST_CASE("bayes test thresholds") {
    CHECK(bayes_test(150.0, 0.01, 0.01) == TestDecision::AcceptH0);
    CHECK(bayes_test(0.005, 0.01, 0.01) == TestDecision::RejectH0);
    CHECK(bayes_test(1.0, 0.01, 0.01) == TestDecision::Continue);
    CHECK(bayes_test(100.0, 0.01, 0.01) == TestDecision::AcceptH0);
    CHECK(bayes_test(0.01, 0.01, 0.01) == TestDecision::RejectH0);
}

TEST_CASE("approximate test constants") {
    const ApproxConstants c = approx_constants(BetaPrior::uniform(), box({{0.5, 1}}), 0.05);
    CHECK(c.r1 == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(c.r2 == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    const ApproxConstants z = approx_constants(BetaPrior(2, 5), box({{0.2, 0.7}}), 0.0);
    CHECK(z.r1 == 1.0);
    CHECK(z.r2 == 1.0);
}

TEST_CASE("approximate test with zero delta is the plain test") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t n = std::uniform_int_distribution<std::uint64_t>(0, 300)(rng);
        const std::uint64_t m = std::uniform_int_distribution<std::uint64_t>(0, n)(rng);
        const BernoulliCounts counts({m}, n);
        const BoxRegion d = box({{0.4, 1}});
        const BetaPrior prior(2, 2);
        CHECK(approx_bayes_test(prior, counts, d, 0.0, 0.01, 0.01) ==
              bayes_test(bayes_factor(prior, counts, d), 0.01, 0.01));
    }
}

TEST_CASE("approximate test accepts a clear case") {
    const BoxRegion d = box({{0.5, 1}});
    const BernoulliCounts counts({190}, 200);
    CHECK(approx_bayes_test(BetaPrior::uniform(), counts, d, 0.05, 0.01, 0.01) == TestDecision::AcceptH0);
    // independent check of the margin: B over [0.55, 1] against 120
    const double q = boost::math::ibetac(191.0, 11.0, 0.55);
    const double b = q / (1 - q) * (0.55 / 0.45);
    CHECK(b >= 120.0);
    CHECK_THROWS_AS(approx_bayes_test(BetaPrior::uniform(), counts, box({{0.45, 0.55}}), 0.1, 0.01, 0.01),
                    EmptyReducedRegion);
}

TEST_CASE("approximate test can be indifferent") {
    // Theta sits right at the face: both dual conditions hold once N is large
    const BoxRegion d = box({{0.5, 1}});
    const BernoulliCounts counts({50000}, 100000);
    CHECK(approx_bayes_test(BetaPrior::uniform(), counts, d, 0.05, 0.01, 0.01) == TestDecision::Indifferent);
}

TEST_CASE("sprt examples") {
    const BoxRegion d = box({{0, 0.5}});
    CHECK(sprt_test(BernoulliCounts({200}, 1000), d, 0.01, 0.01, 0.01) == TestDecision::AcceptH0);
    CHECK(sprt_test(BernoulliCounts({800}, 1000), d, 0.01, 0.01, 0.01) == TestDecision::RejectH0);
    for (std::uint64_t n = 2; n <= (1u << 20); n *= 2)
        CHECK(sprt_test(BernoulliCounts({n / 2}, n), d, 0.01, 0.01, 0.01) == TestDecision::Continue);
    // Theta = 0: the lower face at 0 never resolves
    for (std::uint64_t n = 1; n <= (1u << 20); n *= 2)
        CHECK(sprt_test(BernoulliCounts({0}, n), d, 0.01, 0.01, 0.01) == TestDecision::Continue);
    CHECK_THROWS_AS(sprt_test(BernoulliCounts({1}, 2), box({{0.005, 1}}), 0.01, 0.01, 0.01), SprtRangeError);
}

TEST_CASE("sprt log-likelihood ratio matches closed form") {
    // interior face at 0.3, H0 side is Theta >= 0.3; the face at 1 only
    // accepts once a failure has been seen
    const BoxRegion d = box({{0.3, 1}});
    const double eps = 0.02, a = 0.05, b = 0.05;
    const double hi = std::log((1 - b) / a), lo = std::log(b / (1 - a));
    for (std::uint64_t n : {10u, 100u, 400u})
        for (std::uint64_t m = 0; m <= n; m += std::max<std::uint64_t>(1, n / 20)) {
            const double lam = m * std::log((0.3 + eps) / (0.3 - eps)) + (n - m) * std::log((0.7 - eps) / (0.7 + eps));
            const TestDecision want = lam >= hi && m < n ? TestDecision::AcceptH0
                                    : lam <= lo ? TestDecision::RejectH0
                                                : TestDecision::Continue;
            CHECK(sprt_test(BernoulliCounts({m}, n), d, eps, a, b) == want);
        }
}

TEST_CASE("counts validate") {
    CHECK_THROWS_AS(BernoulliCounts({3}, 2), std::invalid_argument);
}

}
