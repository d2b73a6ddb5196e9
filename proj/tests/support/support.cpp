#include "support.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace testsupport {

using hyperver::Interval;
using hyperver::NodeKind;
using hyperver::StateDecl;
using hyperver::Transition;

Dtmc random_dtmc(Rng& rng, std::size_t states, std::size_t max_out, const std::vector<std::string>& atoms) {
    std::vector<StateDecl> decls;
    std::vector<std::vector<Transition>> rows(states);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t s = 0; s < states; ++s) {
        StateDecl d{"s" + std::to_string(s), {}};
        for (const auto& a : atoms)
            if (coin(rng)) d.labels.push_back(a);
        decls.push_back(std::move(d));

        std::vector<StateIndex> targets(states);
        std::iota(targets.begin(), targets.end(), 0);
        std::shuffle(targets.begin(), targets.end(), rng);
        const std::size_t out = std::uniform_int_distribution<std::size_t>(1, std::min(max_out, states))(rng);
        std::vector<double> w(out);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        for (auto& x : w) x = u(rng);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        double used = 0.0;
        for (std::size_t i = 0; i < out; ++i) {
            // last weight absorbs rounding so the row sums to 1
            const double p = i + 1 == out ? 1.0 - used : w[i] / total;
            used += p;
            rows[s].push_back({targets[i], p});
        }
    }
    return Dtmc(std::move(decls), std::move(rows));
}

Formula random_formula(Rng& rng, const std::vector<std::string>& atoms, const std::vector<std::string>& vars,
                       int max_height, unsigned max_bound) {
    auto pick = [&](const std::vector<std::string>& xs) {
        return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
    };
    auto bound = [&] { return std::uniform_int_distribution<unsigned>(0, max_bound)(rng); };
    if (max_height <= 0) {
        if (std::uniform_int_distribution<int>(0, 9)(rng) == 0) return Formula::truth();
        return Formula::atom(pick(atoms), pick(vars));
    }
    auto sub = [&] { return random_formula(rng, atoms, vars, max_height - 1, max_bound); };
    switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
        case 0: return Formula::atom(pick(atoms), pick(vars));
        case 1: return Formula::negation(sub());
        case 2: return Formula::conjunction(sub(), sub());
        case 3: return Formula::next(sub());
        case 4: return Formula::until(sub(), bound(), sub());
        case 5: return Formula::disjunction(sub(), sub());
        case 6: return Formula::implication(sub(), sub());
        case 7: return Formula::eventually(bound(), sub());
        case 8: return Formula::always(bound(), sub());
        default: return Formula::until(sub(), bound(), sub());
    }
}

bool brute_eval(const Dtmc& m, const Formula& f, const Traces& v, std::size_t shift) {
    switch (f.kind()) {
        case NodeKind::True:
            return true;
        case NodeKind::Atom: {
            const Trace& t = v.at(f.variable());
            if (shift >= t.size()) throw std::out_of_range("trace too short");
            const auto labels = m.labels(t[shift]);
            return std::find(labels.begin(), labels.end(), f.proposition()) != labels.end();
        }
        case NodeKind::Not:
            return !brute_eval(m, f.child(), v, shift);
        case NodeKind::And: {
            const bool l = brute_eval(m, f.lhs(), v, shift);
            const bool r = brute_eval(m, f.rhs(), v, shift);
            return l && r;
        }
        case NodeKind::Next:
            return brute_eval(m, f.child(), v, shift + 1);
        case NodeKind::Until: {
            // exists i <= k: rhs at i and lhs at every j < i
            for (std::size_t i = 0; i <= f.bound(); ++i) {
                if (!brute_eval(m, f.rhs(), v, shift + i)) continue;
                bool prefix = true;
                for (std::size_t j = 0; j < i; ++j) prefix = prefix && brute_eval(m, f.lhs(), v, shift + j);
                if (prefix) return true;
            }
            return false;
        }
        case NodeKind::Prob:
            throw std::logic_error("brute_eval does not handle Prob");
    }
    return false;
}

std::vector<std::pair<Trace, double>> all_paths(const Dtmc& m, StateIndex start, std::size_t length) {
    std::vector<std::pair<Trace, double>> out{{Trace{start}, 1.0}};
    for (std::size_t step = 0; step < length; ++step) {
        std::vector<std::pair<Trace, double>> next;
        for (const auto& [t, p] : out)
            for (const auto& tr : m.successors(t.back())) {
                if (tr.probability <= 0.0) continue;
                Trace u = t;
                u.push_back(tr.target);
                next.emplace_back(std::move(u), p * tr.probability);
            }
        out = std::move(next);
    }
    return out;
}

namespace {

void brute_prob_rec(const Dtmc& m, const Formula& phi, Traces& v, std::size_t shift,
                    const std::vector<std::string>& tuple, std::size_t i, std::size_t length, double weight,
                    const std::vector<StateIndex>& starts, double& acc) {
    if (i == tuple.size()) {
        if (brute_eval(m, phi, v, shift)) acc += weight;
        return;
    }
    for (auto& [t, p] : all_paths(m, starts[i], length)) {
        // fresh paths sit at position `shift` so outer traces line up
        Trace padded(shift, starts[i]);
        padded.insert(padded.end(), t.begin(), t.end());
        v[tuple[i]] = std::move(padded);
        brute_prob_rec(m, phi, v, shift, tuple, i + 1, length, weight * p, starts, acc);
    }
}

}  // namespace

double brute_prob(const Dtmc& m, const Formula& phi, const Traces& v, std::size_t shift,
                  const std::vector<std::string>& tuple) {
    std::vector<StateIndex> starts;
    for (const auto& var : tuple) starts.push_back(v.at(var).at(shift));
    Traces work = v;
    double acc = 0.0;
    brute_prob_rec(m, phi, work, shift, tuple, 0, hyperver::depth(phi), 1.0, starts, acc);
    return acc;
}

namespace {

template <typename F>
double quad(F f, double lo, double hi) {
    if (hi <= lo) return 0.0;
    static boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, lo, hi, 1e-12);
}

}  // namespace

// Literal Bayes factor: likelihood integrated against the prior over D and
// over its complement, the complement split into disjoint slabs.
double quadrature_bayes_factor(double a, double b, const std::vector<std::uint64_t>& m, std::uint64_t n,
                               const std::vector<Interval>& d) {
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    std::vector<double> in_d, out_d, whole, pin, pout;
    for (std::size_t i = 0; i < d.size(); ++i) {
        // shift by the likelihood's maximum so the integrands stay O(1)
        const double mode = n == 0 ? 0.5 : std::clamp(double(m[i]) / double(n), 1e-9, 1 - 1e-9);
        const double shift = m[i] * std::log(mode) + (n - m[i]) * std::log1p(-mode);
        auto lik = [&, i](double t) {
            if (t <= 0.0 || t >= 1.0) return 0.0;
            return std::exp(log_norm + (a - 1 + m[i]) * std::log(t) + (b - 1 + n - m[i]) * std::log1p(-t) - shift);
        };
        auto pdf = [&](double t) {
            if (t <= 0.0 || t >= 1.0) return 0.0;
            return std::exp(log_norm + (a - 1) * std::log(t) + (b - 1) * std::log1p(-t));
        };
        in_d.push_back(quad(lik, d[i].lower, d[i].upper));
        out_d.push_back(quad(lik, 0.0, d[i].lower) + quad(lik, d[i].upper, 1.0));
        whole.push_back(in_d.back() + out_d.back());
        pin.push_back(quad(pdf, d[i].lower, d[i].upper));
        pout.push_back(quad(pdf, 0.0, d[i].lower) + quad(pdf, d[i].upper, 1.0));
    }
    auto outside = [&](const std::vector<double>& inside, const std::vector<double>& compl_,
                       const std::vector<double>& all) {
        double total = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            double slab = compl_[i];
            for (std::size_t j = 0; j < i; ++j) slab *= inside[j];
            for (std::size_t j = i + 1; j < d.size(); ++j) slab *= all[j];
            total += slab;
        }
        return total;
    };
    double lik_d = 1.0, prior_d = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        lik_d *= in_d[i];
        prior_d *= pin[i];
    }
    const std::vector<double> ones(d.size(), 1.0);
    const double lik_c = outside(in_d, out_d, whole);
    const double prior_c = outside(pin, pout, ones);
    return (lik_d / prior_d) / (lik_c / prior_c);
}

hyperver::PathAssignment to_assignment(const Traces& v) {
    hyperver::PathAssignment a;
    for (const auto& [var, t] : v) a.bind(var, FinitePath{t});
    return a;
}

Dtmc two_state_chain(double p) {
    char text[160];
    std::snprintf(text, sizeof text,
                  "state s0 labels:; state s1 labels: b; trans s0 s1 %.17g; trans s0 s0 %.17g; trans s1 s1 1.0", p,
                  1.0 - p);
    return hyperver::parse_model(text);
}

}  // namespace testsupport
