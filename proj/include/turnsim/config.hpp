#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "turnsim/perception.hpp"
#include "turnsim/types.hpp"

namespace turnsim {

struct AgentConfig {
    AgentId id = 0;
    double talkativeness = 0.05;  // in [0, 1]
    ConvState initial_state = ConvState::Unaddressed;
};

struct AttitudeOverride {
    AgentId from = 0;
    AgentId to = 0;
    Attitude value;
};

struct InitialAttitudes {
    Attitude default_value;  // applied to every directed pair
    std::vector<AttitudeOverride> overrides;
};

struct DynamicsConfig {
    double delta_dominance = 0.1;     // > 0
    double delta_liking = 0.1;        // > 0
    double yield_threshold = 0.0;     // felt dominance needed to yield the floor
    double mean_utterance_ticks = 20.0;  // >= 1
};

enum class PerceptionMode { Inferred, Oracle };

struct PerceptionConfig {
    PerceptionMode mode = PerceptionMode::Inferred;
    double noise_flip = 0.02;
    double hmm_stay_probability = 0.8;
    EmissionModel emission = EmissionModel::defaults();  // noise_flip kept in sync
};

struct RunConfig {
    std::uint64_t ticks = 5000;
    std::uint64_t seed = 42;
};

struct MetricsConfig {
    std::uint64_t window = 500;  // >= 2
    double epsilon = 0.05;       // > 0
    int k = 4;                   // KSG neighbor count, >= 1
    long lag = 0;                // shift of the second series, in ticks
};

/// Fully resolved simulation configuration. The JSON document format is the
/// external contract; parse_config applies defaults and validates every
/// field, naming the exact field path on error.
struct SimConfig {
    std::vector<AgentConfig> agents;  // >= 2, unique ids; kept sorted by id
    InitialAttitudes initial_attitudes;
    DynamicsConfig dynamics;
    PerceptionConfig perception;
    RunConfig run;
    MetricsConfig metrics;

    /// Throws ConfigError (with a field path) on any invariant violation.
    void validate() const;

    std::vector<AgentId> agent_ids() const;
};

/// Parse a JSON configuration document. Unknown keys, type mismatches and
/// invariant violations raise ConfigError naming the field. The result is
/// fully resolved: serializing and re-parsing yields an equal config.
SimConfig parse_config(const std::string& text);

/// Serialize a resolved config back to its JSON document form.
std::string serialize_config(const SimConfig& config);

bool operator==(const SimConfig& a, const SimConfig& b);

}  // namespace turnsim
