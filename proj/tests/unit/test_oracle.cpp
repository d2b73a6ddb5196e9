#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hyperver/gridworld.hpp"
#include "hyperver/oracle.hpp"
#include "support.hpp"

using namespace hyperver;
using testsupport::Traces;

namespace {

Dtmc permuted(const Dtmc& m, const std::vector<StateIndex>& perm) {
    // state i of m becomes state perm[i]
    std::vector<StateDecl> decls(m.size());
    std::vector<std::vector<Transition>> rows(m.size());
    for (StateIndex s = 0; s < m.size(); ++s) {
        decls[perm[s]] = {m.name(s), m.labels(s)};
        for (const auto& t : m.successors(s)) rows[perm[s]].push_back({perm[t.target], t.probability});
    }
    return Dtmc(std::move(decls), std::move(rows));
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("single-step reachability") {
    const Dtmc m = testsupport::two_state_chain(0.3);
    PathAssignment v;
    v.bind("p", FinitePath{{0}});
    const std::vector<std::string> tuple{"p"};
    CHECK(exact_prob(m, parse_formula("F<=1 b@p"), v, tuple) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(exact_prob(m, parse_formula("F<=2 b@p"), v, tuple) == doctest::Approx(1 - 0.49).epsilon(1e-15));
}

TEST_CASE("2x2 collision within one step") {
    const GridSpec spec = make_layout(2, Layout::Default);
    const Dtmc g = build_grid_dtmc(spec);
    const Formula psi = build_psi_ca(2, 1, 0.5);
    PathAssignment v;
    v.bind("p1", FinitePath{{grid_state_index(spec, {0, 0}, 1)}});
    v.bind("p2", FinitePath{{grid_state_index(spec, {1, 1}, 2)}});
    const std::vector<std::string> tuple{"p1", "p2"};
    const Formula& body = psi.arguments()[0].body;
    CHECK(exact_prob(g, body, v, tuple) == doctest::Approx(0.5).epsilon(1e-15));
    const Traces t{{"p1", {grid_state_index(spec, {0, 0}, 1)}}, {"p2", {grid_state_index(spec, {1, 1}, 2)}}};
    CHECK(testsupport::brute_prob(g, body, t, 0, tuple) == doctest::Approx(0.5).epsilon(1e-15));

    const ExactResult r = exact_verdict(g, psi, v);
    CHECK(r.probabilities.size() == 1);
    CHECK(r.verdict);
    CHECK(r.on_boundary);
    CHECK_FALSE(exact_verdict(g, build_psi_ca(2, 1, 0.49), v).verdict);
    CHECK(exact_verdict(g, build_psi_ca(2, 1, 1.0), v).verdict);
}

TEST_CASE("depth-zero tuple gives an indicator") {
    const Dtmc m = parse_model("state a labels: x; state b labels: y; trans a b 1; trans b a 1");
    PathAssignment v;
    v.bind("p1", FinitePath{{0}});
    v.bind("p2", FinitePath{{1}});
    const std::vector<std::string> tuple{"p1", "p2"};
    CHECK(exact_prob(m, parse_formula("(x@p1 & y@p2)"), v, tuple) == 1.0);
    CHECK(exact_prob(m, parse_formula("(y@p1 & y@p2)"), v, tuple) == 0.0);
}

TEST_CASE("6x6 robots cannot meet within three steps") {
    const GridSpec spec = make_layout(6, Layout::Default);
    const Dtmc g = build_grid_dtmc(spec);
    PathAssignment v;
    v.bind("p1", FinitePath{{grid_state_index(spec, {0, 0}, 1)}});
    v.bind("p2", FinitePath{{grid_state_index(spec, {5, 5}, 2)}});
    for (double theta : {0.0, 0.01, 0.5}) {
        const ExactResult r = exact_verdict(g, build_psi_ca(6, 3, theta), v);
        CHECK(r.probabilities == std::vector<double>{0.0});
        CHECK(r.verdict);
    }
}

TEST_CASE("the full region always holds") {
    testsupport::Rng rng(8);
    const Dtmc m = testsupport::random_dtmc(rng, 4, 3, {"a"});
    PathAssignment v;
    v.bind("p", FinitePath{{0}});
    CHECK(exact_verdict(m, parse_formula("P{[0,1]}(Pr[p](F<=3 a@p))"), v).verdict);
}

TEST_CASE("DP, enumeration and the reference enumerator agree") {
    testsupport::Rng rng(21);
    const std::vector<std::string> atoms{"a", "b"};
    const std::vector<std::string> vars{"p", "q", "r"};
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        const Dtmc m = testsupport::random_dtmc(rng, std::uniform_int_distribution<std::size_t>(2, 6)(rng), 3, atoms);
        const Formula phi = testsupport::random_formula(rng, atoms, vars, 3, 2);
        if (depth(phi) > 4) continue;
        // q is the fixed free variable, p and r are resampled
        const std::vector<std::string> tuple{"p", "r"};
        std::uniform_int_distribution<StateIndex> st(0, StateIndex(m.size() - 1));
        Traces t;
        t["p"] = {st(rng)};
        t["r"] = {st(rng)};
        SeededSampler s(i);
        t["q"] = sample_path(m, st(rng), depth(phi), s).states;
        const PathAssignment v = testsupport::to_assignment(t);
        const double dp = exact_prob(m, phi, v, tuple);
        const double en = enumerate_prob(m, phi, v, tuple);
        const double ref = testsupport::brute_prob(m, phi, t, 0, tuple);
        CHECK(std::abs(dp - ref) <= 1e-12);
        CHECK(std::abs(en - ref) <= 1e-12);
        CHECK(dp >= 0.0);
        CHECK(dp <= 1.0 + 1e-12);
        const double neg = exact_prob(m, Formula::negation(phi), v, tuple);
        CHECK(std::abs(dp + neg - 1.0) <= 1e-12);
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("verdicts are invariant under state relabelling") {
    testsupport::Rng rng(33);
    const std::vector<std::string> atoms{"a", "b"};
    for (int i = 0; i < 100; ++i) {
        const Dtmc m = testsupport::random_dtmc(rng, 5, 3, atoms);
        std::vector<StateIndex> perm(m.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const Dtmc pm = permuted(m, perm);
        const Formula body = testsupport::random_formula(rng, atoms, {"p", "q"}, 3, 2);
        const double lo = std::uniform_real_distribution<double>(0, 0.6)(rng);
        const Formula psi = Formula::prob(BoxRegion({{lo, lo + 0.3}}), {{{"p", "q"}, body}});
        const StateIndex a = std::uniform_int_distribution<StateIndex>(0, 4)(rng);
        const StateIndex b = std::uniform_int_distribution<StateIndex>(0, 4)(rng);
        PathAssignment v, pv;
        v.bind("p", FinitePath{{a}});
        v.bind("q", FinitePath{{b}});
        pv.bind("p", FinitePath{{perm[a]}});
        pv.bind("q", FinitePath{{perm[b]}});
        const ExactResult x = exact_verdict(m, psi, v);
        const ExactResult y = exact_verdict(pm, psi, pv);
        CHECK(x.verdict == y.verdict);
        CHECK(std::abs(x.probabilities[0] - y.probabilities[0]) <= 1e-12);
    }
}

TEST_CASE("nested formulae: DP agrees with enumeration") {
    const Dtmc m = parse_model(
        "state s0 labels: b; state s1 labels:; state s2 labels: a;"
        "trans s0 s0 0.5; trans s0 s2 0.25; trans s0 s1 0.25; trans s1 s0 0.6; trans s1 s1 0.4; trans s2 s2 1");
    const Formula psi = parse_formula("P{[0.2,1]}(Pr[p1]( (P{[0.3,1]}(Pr[p2](F<=1 (b@p1 | a@p2))) U<=3 a@p1) ))");
    for (StateIndex s1 = 0; s1 < 3; ++s1)
        for (StateIndex s2 = 0; s2 < 3; ++s2) {
            PathAssignment v;
            v.bind("p1", FinitePath{{s1}});
            SeededSampler rng(s1 * 3 + s2);
            v.bind("p2", sample_path(m, s2, 3, rng));
            const std::vector<std::string> tuple{"p1"};
            const Formula& body = psi.arguments()[0].body;
            CHECK(std::abs(exact_prob(m, body, v, tuple) - enumerate_prob(m, body, v, tuple)) <= 1e-12);
            ExactProvider provider(m);
            CHECK(provider.decide(psi, v) == exact_verdict(m, psi, v).verdict);
            CHECK(exact_evaluate(m, psi, v) == exact_verdict(m, psi, v).verdict);
        }
}

TEST_CASE("state budget is enforced") {
    const GridSpec spec = make_layout(6, Layout::Default);
    const Dtmc g = build_grid_dtmc(spec);
    PathAssignment v;
    v.bind("p1", FinitePath{{grid_state_index(spec, {0, 0}, 1)}});
    v.bind("p2", FinitePath{{grid_state_index(spec, {5, 5}, 2)}});
    OracleLimits tiny;
    tiny.max_states = 10;
    CHECK_THROWS_AS(exact_verdict(g, build_psi_ca(6, 6, 0.5), v, tiny), OracleBudgetError);
}

}
