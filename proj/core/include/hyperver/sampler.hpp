#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "hyperver/model.hpp"

namespace hyperver {

struct FinitePath {
    std::vector<StateIndex> states;

    std::size_t size() const noexcept { return states.size(); }
    friend bool operator==(const FinitePath&, const FinitePath&) = default;
};

/// Mixes a sequence of 64-bit words into one seed (splitmix64 finaliser).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key);

/// FNV-1a hash of a string; stable across processes.
std::uint64_t hash_text(std::string_view text);

template <typename... Keys>
std::uint64_t derive_seed(std::uint64_t seed, Keys... keys) {
    ((seed = mix_seed(seed, static_cast<std::uint64_t>(keys))), ...);
    return seed;
}

/// Reproducible random source addressed by (master seed, stream counter).
/// Two samplers with equal seed and stream produce identical draws, so a
/// path's randomness depends only on its address and not on scheduling.
class SeededSampler {
public:
    explicit SeededSampler(std::uint64_t master_seed, std::uint64_t stream = 0);

    std::uint64_t master_seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Independent child stream keyed by `key`.
    SeededSampler substream(std::uint64_t key) const;

    /// Uniform draw in [0, 1).
    double uniform();

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

/// Successor of `from` drawn according to R(from, .). Zero-probability
/// transitions are never taken.
StateIndex sample_successor(const Dtmc& model, StateIndex from, SeededSampler& rng);

/// Path of exactly `length + 1` states beginning at `start`.
FinitePath sample_path(const Dtmc& model, StateIndex start, std::size_t length, SeededSampler& rng);

/// True when every consecutive pair has positive transition probability.
bool is_valid_path(const Dtmc& model, const FinitePath& path);

}  // namespace hyperver
