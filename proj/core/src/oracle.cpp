#include "hyperver/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <tuple>
#include <unordered_map>

namespace hyperver {

namespace {

double compute_prob(const Dtmc& model, const Formula& phi, const PathAssignment& v, std::span<const std::string> tuple,
                    ExactProvider& provider, const OracleLimits& limits);

// Obligations left over after reading one time step. Terms are
// hash-consed so that equal obligations share one id and DP entries merge.
class Terms {
public:
    static constexpr int kTrue = 0;
    static constexpr int kFalse = 1;

    enum class Kind { True, False, Form, Until, Not, And };

    struct Term {
        Kind kind;
        Formula formula;
        unsigned remaining;
        int a;
        int b;
    };

    Terms() {
        intern(Kind::True, Formula::truth(), 0, -1, -1);
        intern(Kind::False, Formula::truth(), 0, -1, -1);
    }

    const Term& operator[](int id) const { return terms_[static_cast<std::size_t>(id)]; }

    int form(const Formula& f) { return intern(Kind::Form, f, 0, -1, -1); }
    int until(const Formula& u, unsigned remaining) { return intern(Kind::Until, u, remaining, -1, -1); }

    int negate(int x) {
        if (x == kTrue) return kFalse;
        if (x == kFalse) return kTrue;
        if (terms_[static_cast<std::size_t>(x)].kind == Kind::Not) return terms_[static_cast<std::size_t>(x)].a;
        return intern(Kind::Not, Formula::truth(), 0, x, -1);
    }

    int conjoin(int x, int y) {
        if (x == kFalse || y == kFalse) return kFalse;
        if (x == kTrue) return y;
        if (y == kTrue) return x;
        if (x == y) return x;
        if (x > y) std::swap(x, y);
        return intern(Kind::And, Formula::truth(), 0, x, y);
    }

    int disjoin(int x, int y) { return negate(conjoin(negate(x), negate(y))); }

private:
    int intern(Kind kind, const Formula& f, unsigned remaining, int a, int b) {
        const std::uint64_t fid = (kind == Kind::Form || kind == Kind::Until) ? f.id() : 0;
        const auto key = std::make_tuple(static_cast<int>(kind), fid, remaining, a, b);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        const int id = static_cast<int>(terms_.size());
        terms_.push_back({kind, f, remaining, a, b});
        index_.emplace(key, id);
        return id;
    }

    std::vector<Term> terms_;
    std::map<std::tuple<int, std::uint64_t, unsigned, int, int>, int> index_;
};

class Progression {
public:
    Progression(const Dtmc& model, const PathAssignment& v, std::span<const std::string> tuple, ExactProvider& provider,
                Terms& terms)
        : model_(model), v_(v), tuple_(tuple), provider_(provider), terms_(terms) {}

    // Obligation for time t+1 equivalent to `term` holding at time t.
    int step(int term, std::span<const StateIndex> joint, std::size_t t) {
        joint_ = joint;
        t_ = t;
        return prog(term);
    }

private:
    int prog(int id) {
        const Terms::Term term = terms_[id];
        switch (term.kind) {
            case Terms::Kind::True:
                return Terms::kTrue;
            case Terms::Kind::False:
                return Terms::kFalse;
            case Terms::Kind::Form:
                return progf(term.formula);
            case Terms::Kind::Until:
                return prog_until(term.formula, term.remaining);
            case Terms::Kind::Not:
                return terms_.negate(prog(term.a));
            case Terms::Kind::And: {
                const int lhs = prog(term.a);
                if (lhs == Terms::kFalse) return Terms::kFalse;
                return terms_.conjoin(lhs, prog(term.b));
            }
        }
        return Terms::kFalse;
    }

    int prog_until(const Formula& u, unsigned remaining) {
        const int now = progf(u.rhs());
        if (now == Terms::kTrue) return Terms::kTrue;
        if (remaining == 0) return now;
        const int hold = progf(u.lhs());
        return terms_.disjoin(now, terms_.conjoin(hold, terms_.until(u, remaining - 1)));
    }

    StateIndex state_of(const std::string& var) const {
        for (std::size_t i = 0; i < tuple_.size(); ++i)
            if (tuple_[i] == var) return joint_[i];
        return v_.state(var, t_);
    }

    int progf(const Formula& f) {
        switch (f.kind()) {
            case NodeKind::True:
                return Terms::kTrue;
            case NodeKind::Atom:
                return model_.has_label(state_of(f.variable()), f.proposition()) ? Terms::kTrue : Terms::kFalse;
            case NodeKind::Not:
                return terms_.negate(progf(f.child()));
            case NodeKind::And: {
                const int lhs = progf(f.lhs());
                if (lhs == Terms::kFalse) return Terms::kFalse;
                return terms_.conjoin(lhs, progf(f.rhs()));
            }
            case NodeKind::Next:
                return terms_.form(f.child());
            case NodeKind::Until:
                return prog_until(f, f.bound());
            case NodeKind::Prob: {
                std::vector<FinitePath> here;
                here.reserve(tuple_.size());
                for (auto s : joint_) here.push_back(FinitePath{{s}});
                const PathAssignment w = v_.shifted(t_).rebound(tuple_, std::move(here));
                return provider_.decide(f, w) ? Terms::kTrue : Terms::kFalse;
            }
        }
        return Terms::kFalse;
    }

    const Dtmc& model_;
    const PathAssignment& v_;
    std::span<const std::string> tuple_;
    ExactProvider& provider_;
    Terms& terms_;
    std::span<const StateIndex> joint_;
    std::size_t t_ = 0;
};

struct VectorHash {
    std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto x : key) h = mix_seed(h, x);
        return static_cast<std::size_t>(h);
    }
};

double dp_prob(const Dtmc& model, const Formula& phi, const PathAssignment& v, std::span<const std::string> tuple,
               ExactProvider& provider, const OracleLimits& limits) {
    Terms terms;
    Progression progression(model, v, tuple, provider, terms);
    const std::size_t width = tuple.size();

    // key = joint states followed by the obligation id
    using Layer = std::unordered_map<std::vector<std::uint32_t>, double, VectorHash>;
    Layer layer;
    std::vector<std::uint32_t> start;
    for (const auto& var : tuple) start.push_back(v.state(var, 0));
    start.push_back(static_cast<std::uint32_t>(terms.form(phi)));
    layer.emplace(std::move(start), 1.0);

    const std::size_t max_steps = depth(phi) + 2;
    double accepted = 0.0;
    for (std::size_t t = 0; !layer.empty(); ++t) {
        if (t > max_steps) throw std::logic_error("formula progression failed to terminate");
        Layer next;
        std::vector<std::uint32_t> key(width + 1);
        for (const auto& [entry, mass] : layer) {
            const std::span<const StateIndex> joint(entry.data(), width);
            const int rest = progression.step(static_cast<int>(entry[width]), joint, t);
            if (rest == Terms::kTrue) {
                accepted += mass;
                continue;
            }
            if (rest == Terms::kFalse) continue;
            key[width] = static_cast<std::uint32_t>(rest);
            // odometer over the product of successor rows
            std::vector<std::size_t> pick(width, 0);
            while (true) {
                double p = mass;
                for (std::size_t j = 0; j < width; ++j) {
                    const Transition& tr = model.successors(joint[j])[pick[j]];
                    p *= tr.probability;
                    key[j] = tr.target;
                }
                if (p > 0.0) next[key] += p;
                std::size_t j = 0;
                while (j < width && ++pick[j] == model.successors(joint[j]).size()) pick[j++] = 0;
                if (j == width) break;
            }
            if (next.size() > limits.max_states)
                throw OracleBudgetError("exact oracle exceeded its state budget of " + std::to_string(limits.max_states));
        }
        layer = std::move(next);
    }
    return std::clamp(accepted, 0.0, 1.0);
}

double enumerate(const Dtmc& model, const Formula& phi, const PathAssignment& v, std::span<const std::string> tuple,
                 VerdictProvider& provider, const OracleLimits& limits) {
    const auto reach = variable_horizon(phi);
    std::vector<std::size_t> lengths;
    std::vector<FinitePath> paths(tuple.size());
    for (std::size_t j = 0; j < tuple.size(); ++j) {
        auto it = reach.find(tuple[j]);
        lengths.push_back(it == reach.end() ? 0 : it->second);
        paths[j].states.push_back(v.state(tuple[j], 0));
    }
    std::size_t visited = 0;
    double total = 0.0;

    // Extends path j (and then the following ones) one state at a time.
    std::function<void(std::size_t, double)> extend = [&](std::size_t j, double mass) {
        if (j == tuple.size()) {
            if (++visited > limits.max_states)
                throw OracleBudgetError("path enumeration exceeded its budget of " + std::to_string(limits.max_states));
            const PathAssignment w = v.rebound(tuple, paths);
            if (evaluate(model, phi, w, provider)) total += mass;
            return;
        }
        if (paths[j].states.size() == lengths[j] + 1) {
            extend(j + 1, mass);
            return;
        }
        for (const auto& tr : model.successors(paths[j].states.back())) {
            if (!(tr.probability > 0.0)) continue;
            paths[j].states.push_back(tr.target);
            extend(j, mass * tr.probability);
            paths[j].states.pop_back();
        }
    };
    extend(0, 1.0);
    return std::clamp(total, 0.0, 1.0);
}

// The DP resolves nested Prob nodes from the current joint states only,
// which is exact when they do not look ahead along the tuple's paths.
bool nested_reads_only_current(const Formula& phi, std::span<const std::string> tuple) {
    bool ok = true;
    std::function<void(const Formula&)> visit = [&](const Formula& f) {
        switch (f.kind()) {
            case NodeKind::True:
            case NodeKind::Atom:
                return;
            case NodeKind::Not:
            case NodeKind::Next:
                visit(f.child());
                return;
            case NodeKind::And:
            case NodeKind::Until:
                visit(f.lhs());
                visit(f.rhs());
                return;
            case NodeKind::Prob:
                for (const auto& [var, reach] : variable_horizon(f))
                    if (reach > 0 && std::find(tuple.begin(), tuple.end(), var) != tuple.end()) ok = false;
                return;
        }
    };
    visit(phi);
    return ok;
}

double compute_prob(const Dtmc& model, const Formula& phi, const PathAssignment& v, std::span<const std::string> tuple,
                    ExactProvider& provider, const OracleLimits& limits) {
    if (nested_reads_only_current(phi, tuple)) return dp_prob(model, phi, v, tuple, provider, limits);
    return enumerate(model, phi, v, tuple, provider, limits);
}

struct OracleKey {
    std::uint64_t node;
    std::vector<StateIndex> states;
    friend bool operator==(const OracleKey&, const OracleKey&) = default;
};

struct OracleKeyHash {
    std::size_t operator()(const OracleKey& k) const noexcept {
        std::uint64_t h = k.node;
        for (auto s : k.states) h = mix_seed(h, s);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

struct ExactProvider::Impl {
    Impl(const Dtmc& m, OracleLimits l) : model(m), limits(l) {}

    const Dtmc& model;
    OracleLimits limits;
    std::mutex mutex;
    std::unordered_map<OracleKey, ExactResult, OracleKeyHash> cache;
};

ExactProvider::ExactProvider(const Dtmc& model, OracleLimits limits)
    : impl_(std::make_unique<Impl>(model, limits)) {}

ExactProvider::~ExactProvider() = default;

ExactResult ExactProvider::result(const Formula& prob, const PathAssignment& at) {
    if (!prob.is_probabilistic()) throw std::invalid_argument("exact verdicts need a probabilistic formula");
    OracleKey key{prob.id(), {}};
    for (const auto& [var, reach] : variable_horizon(prob))
        for (std::size_t t = 0; t <= reach; ++t) key.states.push_back(at.state(var, t));
    {
        std::lock_guard lock(impl_->mutex);
        auto it = impl_->cache.find(key);
        if (it != impl_->cache.end()) return it->second;
    }

    ExactResult r;
    const BoxRegion& region = prob.region();
    for (const auto& arg : prob.arguments())
        r.probabilities.push_back(compute_prob(impl_->model, arg.body, at, arg.variables, *this, impl_->limits));
    r.verdict = region.contains(r.probabilities);
    for (std::size_t i = 0; i < region.dimension(); ++i) {
        const Interval iv = region[i];
        const double p = r.probabilities[i];
        for (double face : {iv.lower, iv.upper})
            if (face > 0.0 && face < 1.0 && std::fabs(p - face) <= 1e-9) r.on_boundary = true;
    }

    std::lock_guard lock(impl_->mutex);
    impl_->cache.emplace(std::move(key), r);
    return r;
}

bool ExactProvider::decide(const Formula& prob, const PathAssignment& at) { return result(prob, at).verdict; }

double exact_prob(const Dtmc& model, const Formula& phi, const PathAssignment& v, std::span<const std::string> tuple,
                  const OracleLimits& limits) {
    ExactProvider provider(model, limits);
    return compute_prob(model, phi, v, tuple, provider, limits);
}

ExactResult exact_verdict(const Dtmc& model, const Formula& psi, const PathAssignment& v, const OracleLimits& limits) {
    ExactProvider provider(model, limits);
    return provider.result(psi, v);
}

bool exact_evaluate(const Dtmc& model, const Formula& phi, const PathAssignment& v, const OracleLimits& limits) {
    ExactProvider provider(model, limits);
    return evaluate(model, phi, v, provider);
}

double enumerate_prob(const Dtmc& model, const Formula& phi, const PathAssignment& v, std::span<const std::string> tuple,
                      const OracleLimits& limits) {
    ExactProvider provider(model, limits);
    return enumerate(model, phi, v, tuple, provider, limits);
}

}  // namespace hyperver
