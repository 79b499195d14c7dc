#include "turnsim/rng.hpp"

#include <cmath>

#include "turnsim/errors.hpp"

namespace turnsim {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

std::uint64_t SplitMix::next() {
    state_ += kGolden;
    return mix64(state_);
}

double SplitMix::uniform() {
    // 53 random bits -> [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix::geometric_min1(double mean_ticks) {
    if (mean_ticks < 1.0) {
        throw ConfigError("geometric_min1: mean_ticks must be >= 1");
    }
    const double p = 1.0 / mean_ticks;
    if (p >= 1.0) {
        uniform();  // keep the stream position independent of the mean
        return 1;
    }
    const double u = uniform();  // in [0, 1), so 1-u is in (0, 1]
    const double k = std::floor(std::log1p(-u) / std::log1p(-p));
    return 1 + static_cast<std::uint64_t>(k);
}

std::uint64_t substream_seed(std::uint64_t master_seed, AgentId agent,
                             std::uint64_t tick, std::uint32_t salt) {
    // Mix the master seed before folding in the agent id; a raw XOR would
    // alias low seed bits against low agent ids, making adjacent seeds run
    // agent-relabelled copies of the same simulation.
    std::uint64_t h = mix64(master_seed + kGolden);
    h = mix64(h ^ (static_cast<std::uint64_t>(agent) + kGolden));
    h = mix64(h ^ (tick + kGolden));
    h = mix64(h ^ (static_cast<std::uint64_t>(salt) + kGolden));
    return h;
}

}  // namespace turnsim
