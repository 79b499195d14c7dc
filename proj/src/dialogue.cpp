#include "turnsim/dialogue.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "turnsim/errors.hpp"

namespace turnsim {

AttitudeMatrix::AttitudeMatrix(std::vector<AgentId> ids, Attitude initial)
    : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
        throw ConfigError("AttitudeMatrix: duplicate agent id");
    }
    entries_.assign(ids_.size() * ids_.size(), clamped(initial));
}

std::size_t AttitudeMatrix::index_of(AgentId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) {
        throw ConfigError("AttitudeMatrix: unknown agent id " +
                          std::to_string(id));
    }
    return static_cast<std::size_t>(it - ids_.begin());
}

const Attitude& AttitudeMatrix::at(AgentId from, AgentId to) const {
    if (from == to) {
        throw ConfigError("AttitudeMatrix: no self-attitude (agent " +
                          std::to_string(from) + ")");
    }
    return entries_[index_of(from) * ids_.size() + index_of(to)];
}

void AttitudeMatrix::set(AgentId from, AgentId to, Attitude value) {
    if (from == to) {
        throw ConfigError("AttitudeMatrix: no self-attitude (agent " +
                          std::to_string(from) + ")");
    }
    entries_[index_of(from) * ids_.size() + index_of(to)] = clamped(value);
}

std::map<AgentId, double> AttitudeMatrix::likings_of(AgentId from) const {
    std::map<AgentId, double> out;
    for (AgentId to : ids_) {
        if (to != from) out[to] = at(from, to).liking;
    }
    return out;
}

std::map<AgentId, Attitude> AttitudeMatrix::attitudes_of(AgentId from) const {
    std::map<AgentId, Attitude> out;
    for (AgentId to : ids_) {
        if (to != from) out[to] = at(from, to);
    }
    return out;
}

SpeakerAggregates speaker_aggregates(
    const std::map<AgentId, ConvState>& perceived_states,
    const std::map<AgentId, Attitude>& attitudes_of_self, AgentId self) {
    if (perceived_states.size() != attitudes_of_self.size()) {
        throw ConfigError("speaker_aggregates: perceived states and attitudes cover different agents");
    }
    for (const auto& [id, state] : perceived_states) {
        (void)state;
        if (id == self) {
            throw ConfigError("speaker_aggregates: self must not appear among perceived agents");
        }
        if (!attitudes_of_self.contains(id)) {
            throw ConfigError("speaker_aggregates: no attitude toward agent " +
                              std::to_string(id));
        }
    }

    SpeakerAggregates agg;
    double dom_sum = 0.0;
    double lik_sum = 0.0;
    for (const auto& [id, state] : perceived_states) {
        if (state != ConvState::Speaking) continue;
        const Attitude& att = attitudes_of_self.at(id);
        dom_sum += att.dominance;
        lik_sum += att.liking;
        ++agg.count_speaking;
    }
    if (agg.count_speaking > 0) {
        agg.mean_dominance = dom_sum / agg.count_speaking;
        agg.mean_liking = lik_sum / agg.count_speaking;
    }
    return agg;
}

ConvState transition(ConvState current, const SpeakerAggregates& agg,
                     const TransitionContext& ctx) {
    switch (current) {
        case ConvState::Unaddressed:
            if (ctx.addressed) return ConvState::Addressed;
            if (ctx.drive_fired) return ConvState::WantToSpeak;
            return ConvState::Unaddressed;
        case ConvState::Addressed:
            if (ctx.drive_fired) return ConvState::WantToSpeak;
            if (!ctx.addressed) return ConvState::Unaddressed;
            return ConvState::Addressed;
        case ConvState::WantToSpeak:
            // Empty-speaker branch first: the means are undefined otherwise.
            if (agg.count_speaking == 0) return ConvState::Speaking;
            if (agg.mean_dominance + std::abs(agg.mean_liking) >= 0.0) {
                return ConvState::Speaking;
            }
            return ConvState::WantToSpeak;
        case ConvState::Speaking:
            if (ctx.utterance_finished) return ConvState::EndOfSpeech;
            if (ctx.yield_to_speaker) return ConvState::InterruptionOfSpeech;
            return ConvState::Speaking;
        case ConvState::InterruptionOfSpeech:
            return ConvState::Unaddressed;  // exactly one tick
        case ConvState::EndOfSpeech:
            return ConvState::Unaddressed;  // floor released, one tick
    }
    return current;
}

AttitudeMatrix apply_interruption_update(AttitudeMatrix matrix,
                                         AgentId interrupter,
                                         AgentId interrupted,
                                         const AttitudeUpdateParams& params) {
    if (interrupter == interrupted) {
        throw ConfigError("apply_interruption_update: interrupter and interrupted must differ");
    }
    Attitude toward_interrupted = matrix.at(interrupter, interrupted);
    toward_interrupted.dominance += params.delta_dominance;
    matrix.set(interrupter, interrupted, toward_interrupted);

    Attitude toward_interrupter = matrix.at(interrupted, interrupter);
    toward_interrupter.liking -= params.delta_liking;
    matrix.set(interrupted, interrupter, toward_interrupter);
    return matrix;
}

double speech_drive(const std::map<AgentId, double>& likings_of_self,
                    double talkativeness) {
    if (likings_of_self.empty()) {
        throw ConfigError("speech_drive: at least one other agent required");
    }
    double max_liking = -1.0;
    for (const auto& [id, liking] : likings_of_self) {
        (void)id;
        max_liking = std::max(max_liking, liking);
    }
    return talkativeness * (1.0 + max_liking) / 2.0;
}

}  // namespace turnsim
