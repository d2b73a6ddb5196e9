#include "hyperver/formula.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cstring>
#include <stdexcept>

#include "hyperver/detail/formula_node.hpp"
#include "hyperver/sampler.hpp"

namespace hyperver {

using detail::FormulaNode;

namespace {

std::atomic<std::uint64_t> next_node_id{1};

std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_double(double d) { return std::bit_cast<std::uint64_t>(d == 0.0 ? 0.0 : d); }

Formula make(FormulaNode&& proto);

const FormulaNode& deref(const detail::FormulaNode* node) {
    if (node == nullptr) throw std::logic_error("empty formula handle");
    return *node;
}

void require_kind(const FormulaNode& n, std::initializer_list<NodeKind> kinds, const char* accessor) {
    if (std::find(kinds.begin(), kinds.end(), n.kind) == kinds.end())
        throw std::logic_error(std::string("Formula::") + accessor + " called on a node of the wrong kind");
}

std::string format_number(double d) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    (void)ec;
    return std::string(buf, end);
}

}  // namespace

class FormulaFactory {
public:
    static Formula wrap(std::shared_ptr<const FormulaNode> node) { return Formula(std::move(node)); }
};

namespace {

Formula make(FormulaNode&& proto) {
    proto.id = next_node_id.fetch_add(1, std::memory_order_relaxed);
    std::uint64_t h = derive_seed(0x48797065ULL, static_cast<std::uint64_t>(proto.kind));
    switch (proto.kind) {
        case NodeKind::True:
            break;
        case NodeKind::Atom:
            h = derive_seed(h, hash_string(proto.proposition), hash_string(proto.variable));
            break;
        case NodeKind::Until:
            h = derive_seed(h, proto.bound);
            [[fallthrough]];
        case NodeKind::Not:
        case NodeKind::And:
        case NodeKind::Next:
            for (const auto& c : proto.children) {
                h = derive_seed(h, c.structural_hash());
                proto.has_prob = proto.has_prob || c.contains_probabilistic();
            }
            break;
        case NodeKind::Prob:
            proto.has_prob = true;
            for (const auto& iv : proto.region->intervals()) h = derive_seed(h, hash_double(iv.lower), hash_double(iv.upper));
            for (const auto& arg : proto.args) {
                h = derive_seed(h, arg.variables.size());
                for (const auto& v : arg.variables) h = derive_seed(h, hash_string(v));
                h = derive_seed(h, arg.body.structural_hash());
            }
            break;
    }
    proto.hash = h;
    return FormulaFactory::wrap(std::make_shared<const FormulaNode>(std::move(proto)));
}

}  // namespace

FormulaError::FormulaError(const std::string& what, std::size_t position)
    : std::runtime_error("at position " + std::to_string(position) + ": " + what), position_(position) {}

Formula Formula::truth() {
    FormulaNode n;
    n.kind = NodeKind::True;
    return make(std::move(n));
}

Formula Formula::atom(std::string proposition, std::string variable) {
    if (proposition.empty() || variable.empty()) throw std::invalid_argument("atom needs a proposition and a variable");
    FormulaNode n;
    n.kind = NodeKind::Atom;
    n.proposition = std::move(proposition);
    n.variable = std::move(variable);
    return make(std::move(n));
}

Formula Formula::negation(Formula f) {
    FormulaNode n;
    n.kind = NodeKind::Not;
    n.children = {std::move(f)};
    return make(std::move(n));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
    FormulaNode n;
    n.kind = NodeKind::And;
    n.children = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

Formula Formula::next(Formula f) {
    FormulaNode n;
    n.kind = NodeKind::Next;
    n.children = {std::move(f)};
    return make(std::move(n));
}

Formula Formula::until(Formula lhs, unsigned bound, Formula rhs) {
    FormulaNode n;
    n.kind = NodeKind::Until;
    n.bound = bound;
    n.children = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

Formula Formula::prob(BoxRegion region, std::vector<ProbArgument> args) {
    if (args.empty()) throw std::invalid_argument("probabilistic predicate needs at least one Pr argument");
    if (region.dimension() != args.size())
        throw std::invalid_argument("region has dimension " + std::to_string(region.dimension()) + " but " +
                                    std::to_string(args.size()) + " Pr arguments were given");
    for (const auto& a : args) {
        if (a.variables.empty()) throw std::invalid_argument("Pr argument needs at least one path variable");
        auto sorted = a.variables;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("Pr argument binds a path variable twice");
    }
    FormulaNode n;
    n.kind = NodeKind::Prob;
    n.region = std::move(region);
    n.args = std::move(args);
    return make(std::move(n));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
    return negation(conjunction(negation(std::move(lhs)), negation(std::move(rhs))));
}

Formula Formula::implication(Formula lhs, Formula rhs) { return disjunction(negation(std::move(lhs)), std::move(rhs)); }

Formula Formula::eventually(unsigned bound, Formula f) { return until(truth(), bound, std::move(f)); }

Formula Formula::always(unsigned bound, Formula f) { return negation(eventually(bound, negation(std::move(f)))); }

Formula Formula::any_of(std::vector<Formula> disjuncts) {
    if (disjuncts.empty()) throw std::invalid_argument("empty disjunction");
    while (disjuncts.size() > 1) {
        std::vector<Formula> level;
        for (std::size_t i = 0; i + 1 < disjuncts.size(); i += 2)
            level.push_back(disjunction(disjuncts[i], disjuncts[i + 1]));
        if (disjuncts.size() % 2) level.push_back(disjuncts.back());
        disjuncts = std::move(level);
    }
    return disjuncts.front();
}

NodeKind Formula::kind() const { return deref(node()).kind; }
std::uint64_t Formula::id() const { return deref(node()).id; }
std::uint64_t Formula::structural_hash() const { return deref(node()).hash; }

const std::string& Formula::proposition() const {
    require_kind(deref(node()), {NodeKind::Atom}, "proposition");
    return node()->proposition;
}

const std::string& Formula::variable() const {
    require_kind(deref(node()), {NodeKind::Atom}, "variable");
    return node()->variable;
}

const Formula& Formula::child() const {
    require_kind(deref(node()), {NodeKind::Not, NodeKind::Next}, "child");
    return node()->children[0];
}

const Formula& Formula::lhs() const {
    require_kind(deref(node()), {NodeKind::And, NodeKind::Until}, "lhs");
    return node()->children[0];
}

const Formula& Formula::rhs() const {
    require_kind(deref(node()), {NodeKind::And, NodeKind::Until}, "rhs");
    return node()->children[1];
}

unsigned Formula::bound() const {
    require_kind(deref(node()), {NodeKind::Until}, "bound");
    return node()->bound;
}

const BoxRegion& Formula::region() const {
    require_kind(deref(node()), {NodeKind::Prob}, "region");
    return *node()->region;
}

std::span<const ProbArgument> Formula::arguments() const {
    require_kind(deref(node()), {NodeKind::Prob}, "arguments");
    return node()->args;
}

bool Formula::contains_probabilistic() const { return deref(node()).has_prob; }

bool Formula::is_nested() const {
    if (kind() != NodeKind::Prob) return false;
    return std::any_of(node()->args.begin(), node()->args.end(),
                       [](const ProbArgument& a) { return a.body.contains_probabilistic(); });
}

namespace {

void print(const Formula& f, std::string& out) {
    switch (f.kind()) {
        case NodeKind::True:
            out += "true";
            break;
        case NodeKind::Atom:
            out += f.proposition();
            out += '@';
            out += f.variable();
            break;
        case NodeKind::Not: {
            const Formula& c = f.child();
            if (c.kind() == NodeKind::And && c.lhs().kind() == NodeKind::Not && c.rhs().kind() == NodeKind::Not) {
                out += '(';
                print(c.lhs().child(), out);
                out += " | ";
                print(c.rhs().child(), out);
                out += ')';
                break;
            }
            out += '!';
            print(c, out);
            break;
        }
        case NodeKind::And:
            out += '(';
            print(f.lhs(), out);
            out += " & ";
            print(f.rhs(), out);
            out += ')';
            break;
        case NodeKind::Next:
            out += "X ";
            print(f.child(), out);
            break;
        case NodeKind::Until:
            out += '(';
            print(f.lhs(), out);
            out += " U<=" + std::to_string(f.bound()) + ' ';
            print(f.rhs(), out);
            out += ')';
            break;
        case NodeKind::Prob: {
            out += "P{";
            const auto ivs = f.region().intervals();
            for (std::size_t i = 0; i < ivs.size(); ++i) {
                if (i) out += ',';
                out += '[' + format_number(ivs[i].lower) + ',' + format_number(ivs[i].upper) + ']';
            }
            out += "}(";
            const auto args = f.arguments();
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i) out += ", ";
                out += "Pr[";
                for (std::size_t j = 0; j < args[i].variables.size(); ++j) {
                    if (j) out += ',';
                    out += args[i].variables[j];
                }
                out += "](";
                print(args[i].body, out);
                out += ')';
            }
            out += ')';
            break;
        }
    }
}

void collect_horizon(const Formula& f, const std::set<std::string>& excluded, std::size_t base,
                     std::map<std::string, std::size_t>& out) {
    switch (f.kind()) {
        case NodeKind::True:
            return;
        case NodeKind::Atom:
            if (!excluded.count(f.variable())) {
                auto [it, inserted] = out.emplace(f.variable(), base);
                if (!inserted) it->second = std::max(it->second, base);
            }
            return;
        case NodeKind::Not:
            collect_horizon(f.child(), excluded, base, out);
            return;
        case NodeKind::Next:
            collect_horizon(f.child(), excluded, base + 1, out);
            return;
        case NodeKind::And:
            collect_horizon(f.lhs(), excluded, base, out);
            collect_horizon(f.rhs(), excluded, base, out);
            return;
        case NodeKind::Until:
            collect_horizon(f.lhs(), excluded, base + f.bound(), out);
            collect_horizon(f.rhs(), excluded, base + f.bound(), out);
            return;
        case NodeKind::Prob:
            for (const auto& arg : f.arguments()) {
                // tuple variables start from the enclosing assignment's current states
                for (const auto& v : arg.variables)
                    if (!excluded.count(v)) {
                        auto [it, inserted] = out.emplace(v, base);
                        if (!inserted) it->second = std::max(it->second, base);
                    }
                auto inner = excluded;
                inner.insert(arg.variables.begin(), arg.variables.end());
                collect_horizon(arg.body, inner, base, out);
            }
            return;
    }
}

std::size_t max_value(const std::map<std::string, std::size_t>& m) {
    std::size_t d = 0;
    for (const auto& [_, v] : m) d = std::max(d, v);
    return d;
}

void check_closed_rec(const Formula& f, const std::set<std::string>& scope, bool inside_prob,
                      const std::string& argument_text, ClosednessReport& report) {
    switch (f.kind()) {
        case NodeKind::True:
            return;
        case NodeKind::Atom:
            if (inside_prob && !scope.count(f.variable())) {
                const bool seen = std::any_of(report.violations.begin(), report.violations.end(),
                                              [&](const ClosednessViolation& v) {
                                                  return v.variable == f.variable() && v.argument == argument_text;
                                              });
                if (!seen) report.violations.push_back({f.variable(), argument_text});
            }
            return;
        case NodeKind::Not:
        case NodeKind::Next:
            check_closed_rec(f.child(), scope, inside_prob, argument_text, report);
            return;
        case NodeKind::And:
        case NodeKind::Until:
            check_closed_rec(f.lhs(), scope, inside_prob, argument_text, report);
            check_closed_rec(f.rhs(), scope, inside_prob, argument_text, report);
            return;
        case NodeKind::Prob:
            for (const auto& arg : f.arguments()) {
                auto inner = scope;
                inner.insert(arg.variables.begin(), arg.variables.end());
                std::string text = "Pr[";
                for (std::size_t j = 0; j < arg.variables.size(); ++j) text += (j ? "," : "") + arg.variables[j];
                text += "](" + to_string(arg.body) + ")";
                check_closed_rec(arg.body, inner, true, text, report);
            }
            return;
    }
}

}  // namespace

std::string to_string(const Formula& f) {
    std::string out;
    print(f, out);
    return out;
}

bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.node() == b.node()) return true;
    if (a.kind() != b.kind() || a.structural_hash() != b.structural_hash()) return false;
    switch (a.kind()) {
        case NodeKind::True:
            return true;
        case NodeKind::Atom:
            return a.proposition() == b.proposition() && a.variable() == b.variable();
        case NodeKind::Not:
        case NodeKind::Next:
            return structurally_equal(a.child(), b.child());
        case NodeKind::Until:
            if (a.bound() != b.bound()) return false;
            [[fallthrough]];
        case NodeKind::And:
            return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
        case NodeKind::Prob: {
            if (!(a.region() == b.region())) return false;
            auto x = a.arguments();
            auto y = b.arguments();
            if (x.size() != y.size()) return false;
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i].variables != y[i].variables || !structurally_equal(x[i].body, y[i].body)) return false;
            return true;
        }
    }
    return false;
}

std::size_t depth(const Formula& f) {
    switch (f.kind()) {
        case NodeKind::True:
        case NodeKind::Atom:
            return 0;
        case NodeKind::Not:
            return depth(f.child());
        case NodeKind::Next:
            return 1 + depth(f.child());
        case NodeKind::And:
            return std::max(depth(f.lhs()), depth(f.rhs()));
        case NodeKind::Until:
            return f.bound() + std::max(depth(f.lhs()), depth(f.rhs()));
        case NodeKind::Prob: {
            std::map<std::string, std::size_t> reads;
            collect_horizon(f, {}, 0, reads);
            return max_value(reads);
        }
    }
    return 0;
}

std::map<std::string, std::size_t> variable_horizon(const Formula& f) {
    std::map<std::string, std::size_t> out;
    collect_horizon(f, {}, 0, out);
    return out;
}

std::set<std::string> free_variables(const Formula& f) {
    std::set<std::string> out;
    for (const auto& [v, _] : variable_horizon(f)) out.insert(v);
    return out;
}

ClosednessReport check_closed(const Formula& f) {
    ClosednessReport report;
    check_closed_rec(f, {}, false, {}, report);
    return report;
}

void for_each_probabilistic_leaf(const Formula& f, const std::function<void(const Formula&)>& visit) {
    switch (f.kind()) {
        case NodeKind::True:
        case NodeKind::Atom:
            return;
        case NodeKind::Not:
        case NodeKind::Next:
            for_each_probabilistic_leaf(f.child(), visit);
            return;
        case NodeKind::And:
        case NodeKind::Until:
            for_each_probabilistic_leaf(f.lhs(), visit);
            for_each_probabilistic_leaf(f.rhs(), visit);
            return;
        case NodeKind::Prob:
            visit(f);
            return;
    }
}

}  // namespace hyperver
