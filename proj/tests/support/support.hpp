#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hyperver/evaluate.hpp"
#include "hyperver/formula.hpp"
#include "hyperver/model.hpp"
#include "hyperver/region.hpp"

namespace testsupport {

using hyperver::Dtmc;
using hyperver::FinitePath;
using hyperver::Formula;
using hyperver::StateIndex;

using Rng = std::mt19937_64;
using Trace = std::vector<StateIndex>;
using Traces = std::map<std::string, Trace>;

/// Random DTMC with states s0..s{n-1}, 1..max_out successors per state and
/// each atom labelling a state with probability 1/2.
Dtmc random_dtmc(Rng& rng, std::size_t states, std::size_t max_out, const std::vector<std::string>& atoms);

/// Random formula without Prob nodes over atom@var, using every core kind
/// and the derived operators.
Formula random_formula(Rng& rng, const std::vector<std::string>& atoms, const std::vector<std::string>& vars,
                       int max_height, unsigned max_bound = 2);

/// Interpreter written straight from the semantics; Prob nodes throw.
bool brute_eval(const Dtmc& m, const Formula& f, const Traces& v, std::size_t shift);

/// Every positive-probability path with `length` steps from `start`,
/// paired with its probability.
std::vector<std::pair<Trace, double>> all_paths(const Dtmc& m, StateIndex start, std::size_t length);

/// Probability that fresh paths for `tuple` (from the current states of
/// `v` at `shift`) satisfy a Prob-free formula, by plain enumeration.
double brute_prob(const Dtmc& m, const Formula& phi, const Traces& v, std::size_t shift,
                  const std::vector<std::string>& tuple);

/// Bayes factor from its integral definition: the likelihood integrated
/// against a Beta(a, b) prior over the box and over its complement.
double quadrature_bayes_factor(double a, double b, const std::vector<std::uint64_t>& m, std::uint64_t n,
                               const std::vector<hyperver::Interval>& d);

hyperver::PathAssignment to_assignment(const Traces& v);

/// s0 -> {s1: p, s0: 1-p}, s1 absorbing and labelled b.
Dtmc two_state_chain(double p);

}  // namespace testsupport
