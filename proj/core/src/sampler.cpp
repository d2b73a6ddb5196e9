#include "hyperver/sampler.hpp"

namespace hyperver {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) {
    std::uint64_t z = seed ^ (key + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t hash_text(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SeededSampler::SeededSampler(std::uint64_t master_seed, std::uint64_t stream)
    : seed_(master_seed), stream_(stream), engine_(mix_seed(master_seed, stream)) {}

SeededSampler SeededSampler::substream(std::uint64_t key) const {
    return SeededSampler(mix_seed(seed_, stream_), key);
}

double SeededSampler::uniform() {
    // 53 random bits -> [0,1); avoids the implementation-defined
    // behaviour of std::uniform_real_distribution across standard libraries.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

StateIndex sample_successor(const Dtmc& model, StateIndex from, SeededSampler& rng) {
    const auto row = model.successors(from);
    const double u = rng.uniform();
    double acc = 0.0;
    StateIndex last_positive = from;
    for (const auto& t : row) {
        if (t.probability <= 0.0) continue;
        acc += t.probability;
        last_positive = t.target;
        if (u < acc) return t.target;
    }
    // Rounding left u above the accumulated mass; fall back to the last
    // positive-probability successor.
    return last_positive;
}

FinitePath sample_path(const Dtmc& model, StateIndex start, std::size_t length, SeededSampler& rng) {
    FinitePath path;
    path.states.reserve(length + 1);
    path.states.push_back(start);
    for (std::size_t i = 0; i < length; ++i) path.states.push_back(sample_successor(model, path.states.back(), rng));
    return path;
}

bool is_valid_path(const Dtmc& model, const FinitePath& path) {
    if (path.states.empty()) return false;
    for (auto s : path.states)
        if (s >= model.size()) return false;
    for (std::size_t i = 0; i + 1 < path.states.size(); ++i)
        if (!(model.probability(path.states[i], path.states[i + 1]) > 0.0)) return false;
    return true;
}

}  // namespace hyperver
