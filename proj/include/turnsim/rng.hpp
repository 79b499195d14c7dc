#pragma once

#include <cstdint>

#include "turnsim/types.hpp"

namespace turnsim {

/// Small deterministic generator (splitmix64). Every (agent, tick, purpose)
/// triple gets its own stream so simulation results do not depend on the
/// order agents are processed in.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    /// Uniform double in [0, 1).
    double uniform();

    /// True with probability p.
    bool bernoulli(double p) { return uniform() < p; }

    /// Geometric draw with the given mean, support {1, 2, ...}.
    /// mean_ticks must be >= 1.
    std::uint64_t geometric_min1(double mean_ticks);

private:
    std::uint64_t state_;
};

/// Avalanche mix of one 64-bit word (the splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Derive the seed of the substream for one agent at one tick. The salt
/// separates draw purposes (cue emission vs. transition decisions).
std::uint64_t substream_seed(std::uint64_t master_seed, AgentId agent,
                             std::uint64_t tick, std::uint32_t salt);

// Substream salts used by the engine.
inline constexpr std::uint32_t kSaltCues = 0;
inline constexpr std::uint32_t kSaltDecide = 1;
inline constexpr std::uint32_t kSaltInit = 2;

}  // namespace turnsim
