#include "hyperver/smc.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace hyperver {

std::string to_string(Method m) { return m == Method::Bayes ? "bayes" : "sprt"; }

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::True:
            return "TRUE";
        case Verdict::False:
            return "FALSE";
        case Verdict::Undecided:
            return "UNDECIDED";
    }
    return "?";
}

std::string to_string(UndecidedReason r) {
    switch (r) {
        case UndecidedReason::None:
            return "";
        case UndecidedReason::Indifference:
            return "indifference";
        case UndecidedReason::SampleCap:
            return "sample-cap";
        case UndecidedReason::Timeout:
            return "timeout";
    }
    return "?";
}

void SmcConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    if (max_samples < 1) throw std::invalid_argument("max samples must be at least 1");
    if (!(timeout_s > 0.0)) throw std::invalid_argument("timeout must be positive");
    if (!(delta_fraction > 0.0 && delta_fraction < 0.5)) throw std::invalid_argument("delta fraction must lie in (0, 0.5)");
    if (!(delta_cap > 0.0 && delta_cap < 0.5)) throw std::invalid_argument("delta cap must lie in (0, 0.5)");
    if (!(sprt_eps > 0.0 && sprt_eps < 0.5)) throw std::invalid_argument("SPRT eps must lie in (0, 0.5)");
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HYPERVER_THREADS")) {
        char* end = nullptr;
        const unsigned long n = std::strtoul(env, &end, 10);
        if (end != env && n > 0) return static_cast<unsigned>(std::min<unsigned long>(n, 1024));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

using Clock = std::chrono::steady_clock;

struct TimeoutSignal {};

std::uint64_t bits(double d) { return std::bit_cast<std::uint64_t>(d); }

struct CacheKey {
    std::uint64_t node;
    std::uint64_t type1;
    std::uint64_t type2;
    std::vector<StateIndex> states;

    friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

std::uint64_t hash_states(const std::vector<StateIndex>& states) {
    std::uint64_t h = derive_seed(0x6b6579ULL, states.size());
    for (auto s : states) h = mix_seed(h, s);
    return h;
}

struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const noexcept {
        return static_cast<std::size_t>(derive_seed(hash_states(k.states), k.node, k.type1, k.type2));
    }
};

struct Outcome {
    Verdict verdict = Verdict::Undecided;
    UndecidedReason reason = UndecidedReason::None;
    std::uint64_t samples = 0;
    std::uint64_t total = 0;
    std::uint64_t rounds = 0;
    double delta = 0.0;
};

class Context {
public:
    Context(const Dtmc& model, const SmcConfig& cfg)
        : model(model), cfg(cfg),
          deadline(Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeout_s))) {}

    const Dtmc& model;
    const SmcConfig& cfg;
    Clock::time_point deadline;
    std::atomic<std::uint64_t> top_batch{0};

    void check_deadline() const {
        if (Clock::now() > deadline) throw TimeoutSignal{};
    }

    const std::vector<std::pair<std::string, std::size_t>>& horizon(const Formula& f) {
        std::lock_guard lock(horizon_mutex_);
        auto it = horizons_.find(f.id());
        if (it == horizons_.end()) {
            const auto h = variable_horizon(f);
            it = horizons_.emplace(f.id(), std::vector<std::pair<std::string, std::size_t>>(h.begin(), h.end())).first;
        }
        return it->second;
    }

    std::optional<bool> lookup(const CacheKey& key) {
        std::lock_guard lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it == cache_.end()) return std::nullopt;
        return it->second;
    }

    void store(CacheKey key, bool value) {
        std::lock_guard lock(cache_mutex_);
        cache_.emplace(std::move(key), value);  // first writer wins
    }

private:
    std::mutex horizon_mutex_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<std::string, std::size_t>>> horizons_;
    std::mutex cache_mutex_;
    std::unordered_map<CacheKey, bool, CacheKeyHash> cache_;
};

Outcome run_test(Context& ctx, const Formula& psi, const PathAssignment& v, ErrorBudget ab, std::uint64_t seed,
                 unsigned threads, bool top, Method method);

// Answers nested Prob nodes by recursive tests. The seed of a nested test
// is derived from its cache key, so cached and recomputed verdicts agree.
class RecursiveProvider final : public VerdictProvider {
public:
    RecursiveProvider(Context& ctx, const LeafBudgets& leaves) : ctx_(ctx), leaves_(leaves) {}

    bool decide(const Formula& prob, const PathAssignment& at) override {
        const ErrorBudget budget = error_bounds(prob);
        CacheKey key{prob.id(), bits(budget.type1), bits(budget.type2), {}};
        for (const auto& [var, reach] : ctx_.horizon(prob))
            for (std::size_t t = 0; t <= reach; ++t) key.states.push_back(at.state(var, t));
        if (ctx_.cfg.cache) {
            if (auto hit = ctx_.lookup(key)) return *hit;
        }
        const std::uint64_t seed =
            derive_seed(ctx_.cfg.seed, prob.structural_hash(), key.type1, key.type2, hash_states(key.states));
        const Outcome o = run_test(ctx_, prob, at, budget, seed, 1, false, Method::Bayes);
        // An undecided nested test counts as "not satisfied".
        const bool value = o.verdict == Verdict::True;
        if (ctx_.cfg.cache) ctx_.store(std::move(key), value);
        return value;
    }

    ErrorBudget error_bounds(const Formula& prob) const override {
        auto it = leaves_.find(prob.id());
        if (it == leaves_.end()) throw BudgetError("no error budget for nested subformula " + to_string(prob));
        return it->second;
    }

private:
    Context& ctx_;
    const LeafBudgets& leaves_;
};

struct Dimension {
    const ProbArgument* arg;
    std::vector<StateIndex> starts;
    std::vector<std::size_t> lengths;
};

bool sample_once(Context& ctx, const Dimension& dim, const PathAssignment& v, const LeafBudgets& leaves,
                 SeededSampler rng) {
    std::vector<FinitePath> paths;
    paths.reserve(dim.starts.size());
    for (std::size_t j = 0; j < dim.starts.size(); ++j)
        paths.push_back(sample_path(ctx.model, dim.starts[j], dim.lengths[j], rng));
    const PathAssignment w = v.rebound(dim.arg->variables, std::move(paths));
    RecursiveProvider provider(ctx, leaves);
    return evaluate(ctx.model, dim.arg->body, w, provider);
}

std::uint64_t count_successes(Context& ctx, const Dimension& dim, const PathAssignment& v, const LeafBudgets& leaves,
                              std::uint64_t batch, std::uint64_t round_seed, unsigned threads) {
    constexpr std::uint64_t kParallelThreshold = 64;
    auto run_range = [&](std::uint64_t from, std::uint64_t to) {
        std::uint64_t hits = 0;
        for (std::uint64_t k = from; k < to; ++k) {
            if ((k & 63u) == 0) ctx.check_deadline();
            if (sample_once(ctx, dim, v, leaves, SeededSampler(round_seed, k))) ++hits;
        }
        return hits;
    };
    if (threads <= 1 || batch < kParallelThreshold) return run_range(0, batch);

    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, batch));
    std::vector<std::uint64_t> hits(workers, 0);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t from = batch * w / workers;
        const std::uint64_t to = batch * (w + 1) / workers;
        pool.emplace_back([&, w, from, to] {
            try {
                hits[w] = run_range(from, to);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    return total;
}

Outcome run_test(Context& ctx, const Formula& psi, const PathAssignment& v, ErrorBudget ab, std::uint64_t seed,
                 unsigned threads, bool top, Method method) {
    const BoxRegion& region = psi.region();
    const auto args = psi.arguments();
    Outcome out;
    if (region.is_unit_cube()) {
        out.verdict = Verdict::True;
        return out;
    }
    const bool nested = psi.is_nested();
    if (nested && method == Method::Sprt)
        throw UnsupportedError("the SPRT baseline only handles non-nested probabilistic formulae");
    const BoxMass prior = prior_box_mass(ctx.cfg.prior, region);
    if (method == Method::Bayes && (!(prior.mass > 0.0) || !(prior.complement > 0.0)))
        throw DegeneratePriorMass("prior mass of " + region.to_string() + " is not in (0, 1)");

    LeafBudgets leaves;
    std::vector<ErrorBudget> bounds(args.size());
    if (nested) {
        const double target = choose_delta(region, ctx.cfg.delta_fraction, ctx.cfg.delta_cap);
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (!args[i].body.contains_probabilistic()) continue;
            const LeafBudgets own = allocate_budgets(args[i].body, target);
            for (const auto& [id, b] : own) {
                auto [it, inserted] = leaves.emplace(id, b);
                if (!inserted) it->second = {std::min(it->second.type1, b.type1), std::min(it->second.type2, b.type2)};
            }
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            bounds[i] = propagate_errors(args[i].body, leaves);
            out.delta = std::max({out.delta, bounds[i].type1, bounds[i].type2});
        }
    }

    std::vector<Dimension> dims;
    dims.reserve(args.size());
    for (const auto& arg : args) {
        Dimension d{&arg, {}, {}};
        const auto reach = variable_horizon(arg.body);
        for (const auto& var : arg.variables) {
            d.starts.push_back(v.state(var, 0));
            auto it = reach.find(var);
            d.lengths.push_back(it == reach.end() ? 0 : it->second);
        }
        dims.push_back(std::move(d));
    }

    std::uint64_t batch = 1;
    while (true) {
        ctx.check_deadline();
        if (top) ctx.top_batch = batch;
        BernoulliCounts counts(std::vector<std::uint64_t>(dims.size(), 0), batch);
        for (std::size_t i = 0; i < dims.size(); ++i)
            counts.successes[i] =
                count_successes(ctx, dims[i], v, leaves, batch, derive_seed(seed, batch, i), threads);
        out.total += batch * dims.size();
        ++out.rounds;
        out.samples = batch;

        TestDecision decision;
        if (method == Method::Sprt)
            decision = sprt_test(counts, region, ctx.cfg.sprt_eps, ab.type1, ab.type2);
        else if (nested)
            decision = approx_bayes_test(ctx.cfg.prior, counts, region, out.delta, ab.type1, ab.type2);
        else
            decision = bayes_test(bayes_factor(ctx.cfg.prior, counts, region), ab.type1, ab.type2);

        if (top && ctx.cfg.on_round) ctx.cfg.on_round(RoundInfo{batch, counts, out.delta, leaves, bounds, decision});

        switch (decision) {
            case TestDecision::AcceptH0:
                out.verdict = Verdict::True;
                return out;
            case TestDecision::RejectH0:
                out.verdict = Verdict::False;
                return out;
            case TestDecision::Indifferent:
                out.verdict = Verdict::Undecided;
                out.reason = UndecidedReason::Indifference;
                return out;
            case TestDecision::Continue:
                break;
        }
        if (batch > ctx.cfg.max_samples / 2) {
            out.verdict = Verdict::Undecided;
            out.reason = UndecidedReason::SampleCap;
            return out;
        }
        batch *= 2;
    }
}

std::string closedness_message(const ClosednessReport& report) {
    std::string msg = "formula is not closed:";
    for (const auto& v : report.violations) msg += " variable '" + v.variable + "' in " + v.argument + ";";
    return msg;
}

SmcVerdict run(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg, Method method) {
    cfg.validate();
    const auto report = check_closed(psi);
    if (!report.ok()) throw std::invalid_argument(closedness_message(report));

    const auto start = Clock::now();
    Context ctx(model, cfg);
    SmcVerdict result;
    try {
        if (psi.is_probabilistic()) {
            const Outcome o = run_test(ctx, psi, v, {cfg.alpha, cfg.beta}, cfg.seed, resolve_threads(cfg.threads), true, method);
            result.outcome = o.verdict;
            result.reason = o.reason;
            result.samples = o.samples;
            result.total_samples = o.total;
            result.rounds = o.rounds;
            result.delta = o.delta;
            result.budget = {cfg.alpha, cfg.beta};
        } else {
            if (method == Method::Sprt && psi.contains_probabilistic())
                throw UnsupportedError("the SPRT baseline only handles probabilistic formulae at the root");
            const LeafBudgets leaves =
                psi.contains_probabilistic() ? allocate_budgets(psi, ErrorBudget{cfg.alpha, cfg.beta}) : LeafBudgets{};
            RecursiveProvider provider(ctx, leaves);
            result.outcome = evaluate(model, psi, v, provider) ? Verdict::True : Verdict::False;
            result.budget = propagate_errors(psi, leaves);
        }
    } catch (const TimeoutSignal&) {
        result = SmcVerdict{};
        result.outcome = Verdict::Undecided;
        result.reason = UndecidedReason::Timeout;
        result.samples = ctx.top_batch;
        result.budget = {cfg.alpha, cfg.beta};
    }
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

}  // namespace

SmcVerdict base_bayes(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg) {
    if (!psi.is_probabilistic() || psi.is_nested())
        throw std::invalid_argument("base_bayes needs a non-nested probabilistic formula");
    return run(model, psi, v, cfg, Method::Bayes);
}

SmcVerdict bayes_smc(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg) {
    return run(model, psi, v, cfg, Method::Bayes);
}

SmcVerdict sprt_smc(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg) {
    if (!psi.is_probabilistic() || psi.is_nested())
        throw UnsupportedError("the SPRT baseline only handles non-nested probabilistic formulae");
    return run(model, psi, v, cfg, Method::Sprt);
}

SmcVerdict check(const Dtmc& model, const Formula& psi, const PathAssignment& v, const SmcConfig& cfg) {
    return cfg.method == Method::Sprt ? sprt_smc(model, psi, v, cfg) : bayes_smc(model, psi, v, cfg);
}

}  // namespace hyperver
