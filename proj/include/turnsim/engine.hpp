#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "turnsim/config.hpp"
#include "turnsim/dialogue.hpp"
#include "turnsim/perception.hpp"
#include "turnsim/rng.hpp"
#include "turnsim/types.hpp"

namespace turnsim {

/// Per-agent runtime data. utterance_remaining > 0 only while Speaking;
/// an addressee is present iff the state is Speaking or EndOfSpeech.
struct AgentRuntime {
    AgentId id = 0;
    ConvState state = ConvState::Unaddressed;
    std::uint32_t utterance_remaining = 0;
    std::optional<AgentId> addressee;
    std::map<AgentId, BeliefState> beliefs;  // about every other agent
    double talkativeness = 0.05;
};

enum class EventKind : std::uint8_t {
    FloorTaken,
    FloorReleased,
    Interruption,
    DegenerateObservation,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view name);

/// Discrete event raised by a step. `a` is the acting agent (or the
/// interrupter / observer); `b` is the interrupted / observed agent and is
/// only meaningful for Interruption and DegenerateObservation.
struct Event {
    std::uint64_t tick = 0;
    EventKind kind = EventKind::FloorTaken;
    AgentId a = 0;
    AgentId b = 0;

    bool operator==(const Event&) const = default;
};

struct WorldState {
    std::uint64_t tick = 0;
    std::vector<AgentRuntime> agents;  // ascending id
    AttitudeMatrix attitudes;
    std::map<AgentId, CueVector> last_cues;  // cues emitted at the last processed tick
};

/// One tick of the trace: true states and cues at that tick, the attitude
/// snapshot before that tick's updates, and the events raised while stepping
/// to the next tick. Arrays are aligned with the trace's agent id list.
struct TickRecord {
    std::uint64_t tick = 0;
    std::vector<ConvState> states;
    std::vector<CueVector> cues;
    AttitudeMatrix attitudes;
    std::vector<Event> events;

    bool operator==(const TickRecord&) const = default;
};

struct Trace {
    SimConfig config;  // fully resolved, seed included
    std::vector<AgentId> agent_ids;
    std::vector<TickRecord> records;  // one per tick, contiguous from 0
};

bool operator==(const Trace& a, const Trace& b);

/// Test hook: receives every belief posterior computed during stepping.
class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_belief(std::uint64_t tick, AgentId observer,
                           AgentId observed, const BeliefState& belief) = 0;
};

/// Build the initial world from a validated config: every agent in its
/// configured initial state (Unaddressed unless overridden), uniform
/// beliefs, attitudes from the config.
WorldState init_world(const SimConfig& config);

/// Geometric utterance length with the given mean, minimum 1 tick.
/// mean_ticks < 1 is a configuration error.
std::uint64_t sample_utterance_length(SplitMix& rng, double mean_ticks);

/// Advance the world by one tick, synchronously: (1) cues are emitted from
/// tick-t states, (2) beliefs update from those cues, (3) every agent picks
/// its tick-t+1 state from tick-t information only, (4) interruptions are
/// detected from true transition co-occurrence and attitude updates applied,
/// (5) utterance countdowns advance. Returns the events raised.
///
/// `processing_order` permutes the per-agent loops; it exists to demonstrate
/// that results do not depend on processing order. Empty means ascending.
std::vector<Event> step(WorldState& world, const SimConfig& config,
                        std::span<const std::size_t> processing_order = {},
                        StepObserver* observer = nullptr);

/// Run config.run.ticks steps from a fresh world and record the full trace
/// (ticks + 1 records; a zero-tick run yields only the initial record).
Trace run(const SimConfig& config, StepObserver* observer = nullptr,
          std::span<const std::size_t> processing_order = {});

}  // namespace turnsim
