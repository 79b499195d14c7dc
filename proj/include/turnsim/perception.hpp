#pragma once

#include <array>
#include <map>
#include <optional>

#include "turnsim/rng.hpp"
#include "turnsim/types.hpp"

namespace turnsim {

/// Observable nonverbal signal bundle emitted by an agent each tick.
struct CueVector {
    bool speaking = false;
    std::optional<AgentId> gaze_target;  // valid id distinct from the emitter
    bool attention_display = false;
    bool backchannel = false;

    bool operator==(const CueVector&) const = default;
};

/// Per-state cue emission probabilities.
struct StateEmission {
    double speaking = 0.05;
    double gaze_at_addressee = 0.05;
    double attention = 0.05;
    double backchannel = 0.05;

    bool operator==(const StateEmission&) const = default;
};

/// Generative cue model: one emission row per conversational state plus a
/// per-boolean-channel flip probability. Gaze is an id channel and is not
/// flipped.
struct EmissionModel {
    std::array<StateEmission, kStateCount> per_state{};
    double noise_flip = 0.02;

    const StateEmission& row(ConvState s) const {
        return per_state[static_cast<std::size_t>(s)];
    }
    StateEmission& row(ConvState s) {
        return per_state[static_cast<std::size_t>(s)];
    }

    /// Default model: every state gets a distinguishable cue signature.
    static EmissionModel defaults();

    /// Throws ConfigError if any probability is outside [0, 1].
    void validate() const;
};

/// Probability distribution over the six states that one agent maintains
/// about another. Components are non-negative and sum to 1 within 1e-9.
class BeliefState {
public:
    BeliefState() : p_{} { p_.fill(1.0 / kStateCount); }

    static BeliefState uniform() { return BeliefState(); }
    static BeliefState point_mass(ConvState s);

    double operator[](ConvState s) const {
        return p_[static_cast<std::size_t>(s)];
    }
    double& operator[](ConvState s) { return p_[static_cast<std::size_t>(s)]; }

    double sum() const;

    bool operator==(const BeliefState&) const = default;

private:
    std::array<double, kStateCount> p_;
};

/// Row-stochastic 6x6 transition prior used by the forward filter.
using HmmTransition = std::array<std::array<double, kStateCount>, kStateCount>;

/// Self-biased uniform prior: stay probability on the diagonal, the rest
/// spread evenly over the other five states.
HmmTransition sticky_transition(double stay_probability);

struct BeliefUpdateResult {
    BeliefState posterior;
    bool degenerate = false;  // all-zero likelihood, posterior reset to uniform
};

/// Sample a cue vector from the agent's true state. Boolean channels are
/// drawn from the state's emission row, then each flipped independently with
/// probability noise_flip. The gaze target is the addressee when the
/// gaze-at-addressee draw succeeds and an addressee exists, absent otherwise.
/// Draw order is fixed: speaking, gaze, attention, backchannel, then flips.
CueVector emit_cues(ConvState true_state, std::optional<AgentId> addressee,
                    const EmissionModel& model, SplitMix& rng);

/// One forward-filter step: predict with the transition prior, weight by the
/// observation likelihood (channels conditionally independent given the
/// state), renormalize. A zero total likelihood yields the uniform
/// distribution with the degenerate flag set.
BeliefUpdateResult belief_update(const BeliefState& prior,
                                 const CueVector& observed,
                                 const EmissionModel& model,
                                 const HmmTransition& hmm_transition);

/// Most probable state; ties broken by the fixed state ordering.
ConvState map_state(const BeliefState& belief);

/// Dyadic addressed rule: true iff some other agent is perceived speaking
/// with gaze on `self` while `self` displays attention.
bool infer_addressed(const std::map<AgentId, CueVector>& cues_from_others,
                     bool own_attention, AgentId self);

}  // namespace turnsim
