#pragma once

#include <map>
#include <vector>

#include "turnsim/types.hpp"

namespace turnsim {

/// Summary of the other agents an agent currently perceives as speaking:
/// arithmetic means of the attitudes held toward them, and their number.
/// When nobody is perceived speaking both means are 0 by convention.
struct SpeakerAggregates {
    double mean_dominance = 0.0;
    double mean_liking = 0.0;
    int count_speaking = 0;

    bool operator==(const SpeakerAggregates&) const = default;
};

/// Per-interruption attitude adjustments. Both strictly positive.
struct AttitudeUpdateParams {
    double delta_dominance = 0.1;
    double delta_liking = 0.1;
};

/// Auxiliary predicates feeding the transition table. Each is computed from
/// tick-t information only.
struct TransitionContext {
    bool addressed = false;           // agent currently perceives itself addressed
    bool drive_fired = false;         // per-tick Bernoulli(speech drive) draw
    bool utterance_finished = false;  // sampled utterance length has elapsed
    bool yield_to_speaker = false;    // overlap perceived and the yield rule fires
};

/// Complete matrix of directed attitudes over a fixed agent set.
/// Entry (i, j) is i's private attitude toward j; there is no diagonal and
/// (i, j) is independent of (j, i).
class AttitudeMatrix {
public:
    AttitudeMatrix() = default;

    /// Build a complete matrix over `ids` with every entry set to `initial`.
    /// Ids must be unique; they are kept in ascending order.
    AttitudeMatrix(std::vector<AgentId> ids, Attitude initial);

    const std::vector<AgentId>& agent_ids() const { return ids_; }
    std::size_t agent_count() const { return ids_.size(); }

    /// Attitude of `from` toward `to`. Unknown id or from == to is a
    /// configuration error.
    const Attitude& at(AgentId from, AgentId to) const;
    void set(AgentId from, AgentId to, Attitude value);

    /// All likings held by `from`, keyed by the other agent.
    std::map<AgentId, double> likings_of(AgentId from) const;
    std::map<AgentId, Attitude> attitudes_of(AgentId from) const;

    bool operator==(const AttitudeMatrix&) const = default;

private:
    std::size_t index_of(AgentId id) const;  // throws ConfigError on unknown id

    std::vector<AgentId> ids_;       // ascending
    std::vector<Attitude> entries_;  // row-major, diagonal entries unused
};

/// Means and count over the agents perceived as Speaking right now.
/// `perceived_states` and `attitudes_of_self` must cover the same set of
/// other agents, and `self` must not appear in it.
SpeakerAggregates speaker_aggregates(
    const std::map<AgentId, ConvState>& perceived_states,
    const std::map<AgentId, Attitude>& attitudes_of_self, AgentId self);

/// One step of the conversational state machine. Pure and total over the
/// transition table; identical inputs give identical outputs.
///
/// The WantToSpeak row follows the floor-grab rule: take the floor when
/// nobody is perceived speaking, otherwise when
/// mean_dominance + |mean_liking| >= 0, else keep waiting. The empty-speaker
/// branch is evaluated first since the means are undefined over an empty set.
ConvState transition(ConvState current, const SpeakerAggregates& agg,
                     const TransitionContext& ctx);

/// Attitude dynamics of one interruption event: the interrupter's dominance
/// toward the interrupted rises by delta_dominance, the interrupted's liking
/// toward the interrupter falls by delta_liking, both clamped to [-1, 1].
/// No other entry changes.
AttitudeMatrix apply_interruption_update(AttitudeMatrix matrix,
                                         AgentId interrupter,
                                         AgentId interrupted,
                                         const AttitudeUpdateParams& params);

/// Probability that the agent tries to take the floor this tick:
/// talkativeness * (1 + max liking) / 2. Monotone non-decreasing in every
/// liking value. An empty liking map is a configuration error.
double speech_drive(const std::map<AgentId, double>& likings_of_self,
                    double talkativeness);

}  // namespace turnsim
