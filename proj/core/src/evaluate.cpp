#include "hyperver/evaluate.hpp"

#include <algorithm>

namespace hyperver {

void PathAssignment::bind(std::string variable, FinitePath path) {
    if (path.states.empty()) throw EvaluationError("cannot bind '" + variable + "' to an empty path");
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), variable,
                               [](const Binding& b, const std::string& v) { return b.variable < v; });
    auto shared = std::make_shared<const FinitePath>(std::move(path));
    if (it != bindings_.end() && it->variable == variable) {
        it->path = std::move(shared);
        it->offset = 0;
    } else {
        bindings_.insert(it, Binding{std::move(variable), std::move(shared), 0});
    }
}

PathAssignment PathAssignment::shifted(std::size_t steps) const {
    PathAssignment out = *this;
    for (auto& b : out.bindings_) b.offset += steps;
    return out;
}

PathAssignment PathAssignment::rebound(std::span<const std::string> variables, std::vector<FinitePath> paths) const {
    if (variables.size() != paths.size()) throw std::invalid_argument("rebound: variable/path count mismatch");
    PathAssignment out = *this;
    for (std::size_t i = 0; i < variables.size(); ++i) out.bind(variables[i], std::move(paths[i]));
    return out;
}

const PathAssignment::Binding& PathAssignment::find(std::string_view variable) const {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), variable,
                               [](const Binding& b, std::string_view v) { return b.variable < v; });
    if (it == bindings_.end() || it->variable != variable)
        throw EvaluationError("path variable '" + std::string(variable) + "' is not assigned");
    return *it;
}

bool PathAssignment::contains(std::string_view variable) const {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), variable,
                               [](const Binding& b, std::string_view v) { return b.variable < v; });
    return it != bindings_.end() && it->variable == variable;
}

StateIndex PathAssignment::state(std::string_view variable, std::size_t steps) const {
    const Binding& b = find(variable);
    const std::size_t index = b.offset + steps;
    if (index >= b.path->states.size())
        throw EvaluationError("path for '" + std::string(variable) + "' is too short: position " + std::to_string(index) +
                              " requested, " + std::to_string(b.path->states.size()) + " states assigned");
    return b.path->states[index];
}

std::size_t PathAssignment::remaining(std::string_view variable) const {
    const Binding& b = find(variable);
    return b.offset < b.path->states.size() ? b.path->states.size() - b.offset : 0;
}

std::size_t PathAssignment::offset(std::string_view variable) const { return find(variable).offset; }

const FinitePath& PathAssignment::path(std::string_view variable) const { return *find(variable).path; }

std::vector<std::string> PathAssignment::variables() const {
    std::vector<std::string> out;
    out.reserve(bindings_.size());
    for (const auto& b : bindings_) out.push_back(b.variable);
    return out;
}

bool NoNestedProvider::decide(const Formula& prob, const PathAssignment&) {
    throw EvaluationError("no verdict provider for probabilistic subformula " + to_string(prob));
}

namespace {

bool eval(const Dtmc& model, const Formula& f, const PathAssignment& v, std::size_t shift, VerdictProvider& provider) {
    switch (f.kind()) {
        case NodeKind::True:
            return true;
        case NodeKind::Atom: {
            const StateIndex s = v.state(f.variable(), shift);
            return model.has_label(s, f.proposition());
        }
        case NodeKind::Not:
            return !eval(model, f.child(), v, shift, provider);
        case NodeKind::And:
            return eval(model, f.lhs(), v, shift, provider) && eval(model, f.rhs(), v, shift, provider);
        case NodeKind::Next:
            return eval(model, f.child(), v, shift + 1, provider);
        case NodeKind::Until:
            for (std::size_t i = 0; i <= f.bound(); ++i) {
                if (eval(model, f.rhs(), v, shift + i, provider)) return true;
                if (!eval(model, f.lhs(), v, shift + i, provider)) return false;
            }
            return false;
        case NodeKind::Prob:
            return provider.decide(f, shift == 0 ? v : v.shifted(shift));
    }
    return false;
}

}  // namespace

bool evaluate(const Dtmc& model, const Formula& f, const PathAssignment& v, VerdictProvider& provider) {
    return eval(model, f, v, 0, provider);
}

PathAssignment materialize_assignment(const Dtmc& model, const std::map<std::string, std::size_t>& horizon,
                                      const std::map<std::string, StateIndex>& starts, std::uint64_t seed) {
    PathAssignment v;
    for (const auto& [var, length] : horizon) {
        auto it = starts.find(var);
        if (it == starts.end()) throw EvaluationError("no start state given for path variable '" + var + "'");
        if (it->second >= model.size()) throw EvaluationError("start state for '" + var + "' is out of range");
        SeededSampler rng(seed, hash_text(var));
        v.bind(var, sample_path(model, it->second, length, rng));
    }
    return v;
}

std::string assignment_to_string(const Dtmc& model, const PathAssignment& v) {
    std::string out;
    for (const auto& var : v.variables()) {
        if (!out.empty()) out += ';';
        out += var;
        out += '=';
        const auto& states = v.path(var).states;
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (i) out += ',';
            out += model.name(states[i]);
        }
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return parts;
}

}  // namespace

PathAssignment parse_assignment(const Dtmc& model, std::string_view text) {
    PathAssignment v;
    for (std::string_view entry : split(text, ';')) {
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) throw EvaluationError("assignment entry '" + std::string(entry) + "' lacks '='");
        const std::string var(trim(entry.substr(0, eq)));
        if (var.empty()) throw EvaluationError("assignment entry '" + std::string(entry) + "' has no variable");
        if (v.contains(var)) throw EvaluationError("path variable '" + var + "' assigned twice");
        FinitePath path;
        for (std::string_view name : split(entry.substr(eq + 1), ',')) {
            auto s = model.find(name);
            if (!s) throw EvaluationError("unknown state '" + std::string(name) + "' in assignment of '" + var + "'");
            path.states.push_back(*s);
        }
        if (!is_valid_path(model, path))
            throw EvaluationError("assigned path for '" + var + "' uses a zero-probability transition");
        v.bind(var, std::move(path));
    }
    return v;
}

}  // namespace hyperver
