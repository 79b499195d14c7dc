#include "turnsim/perception.hpp"

#include <cmath>
#include <string>

#include "turnsim/errors.hpp"

namespace turnsim {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(std::string("EmissionModel: ") + what +
                          " outside [0, 1]");
    }
}

}  // namespace

// Each state's cue signature is chosen so that a single tick of typical cues
// overcomes the sticky forward-filter prior (stay 0.8 caps the prior odds at
// 20:1), keeping one-tick states decodable: waiting agents audibly wind up to
// speak, addressed listeners backchannel heavily, a released floor shows as a
// parting gaze, and the idle noise floor is low enough that no single
// spurious cue can break an Unaddressed hold.
EmissionModel EmissionModel::defaults() {
    EmissionModel m;
    m.row(ConvState::Unaddressed) = {0.025, 0.025, 0.025, 0.025};
    m.row(ConvState::Addressed) = {0.05, 0.05, 0.95, 0.95};
    m.row(ConvState::WantToSpeak) = {0.95, 0.05, 0.95, 0.3};
    m.row(ConvState::Speaking) = {0.98, 0.95, 0.95, 0.05};
    m.row(ConvState::InterruptionOfSpeech) = {0.5, 0.05, 0.95, 0.05};
    m.row(ConvState::EndOfSpeech) = {0.02, 0.97, 0.05, 0.05};
    m.noise_flip = 0.02;
    return m;
}

void EmissionModel::validate() const {
    for (ConvState s : kAllStates) {
        const StateEmission& e = row(s);
        check_probability(e.speaking, "speaking probability");
        check_probability(e.gaze_at_addressee, "gaze probability");
        check_probability(e.attention, "attention probability");
        check_probability(e.backchannel, "backchannel probability");
    }
    check_probability(noise_flip, "noise_flip");
}

BeliefState BeliefState::point_mass(ConvState s) {
    BeliefState b;
    for (ConvState t : kAllStates) b[t] = 0.0;
    b[s] = 1.0;
    return b;
}

double BeliefState::sum() const {
    double total = 0.0;
    for (double v : p_) total += v;
    return total;
}

HmmTransition sticky_transition(double stay_probability) {
    if (!(stay_probability >= 0.0 && stay_probability <= 1.0)) {
        throw ConfigError("sticky_transition: stay probability outside [0, 1]");
    }
    const double off = (1.0 - stay_probability) / (kStateCount - 1);
    HmmTransition t;
    for (std::size_t i = 0; i < kStateCount; ++i) {
        for (std::size_t j = 0; j < kStateCount; ++j) {
            t[i][j] = (i == j) ? stay_probability : off;
        }
    }
    return t;
}

CueVector emit_cues(ConvState true_state, std::optional<AgentId> addressee,
                    const EmissionModel& model, SplitMix& rng) {
    const StateEmission& e = model.row(true_state);
    CueVector cues;
    cues.speaking = rng.bernoulli(e.speaking);
    const bool gaze_fires = rng.bernoulli(e.gaze_at_addressee);
    if (gaze_fires && addressee.has_value()) cues.gaze_target = addressee;
    cues.attention_display = rng.bernoulli(e.attention);
    cues.backchannel = rng.bernoulli(e.backchannel);
    // Channel noise: each boolean flipped independently. The draws happen
    // unconditionally so streams stay aligned across noise settings.
    cues.speaking ^= rng.bernoulli(model.noise_flip);
    cues.attention_display ^= rng.bernoulli(model.noise_flip);
    cues.backchannel ^= rng.bernoulli(model.noise_flip);
    return cues;
}

namespace {

// P(observed boolean | channel probability p) under flip noise.
double boolean_likelihood(bool observed, double p, double noise) {
    const double q = p * (1.0 - noise) + (1.0 - p) * noise;
    return observed ? q : 1.0 - q;
}

}  // namespace

BeliefUpdateResult belief_update(const BeliefState& prior,
                                 const CueVector& observed,
                                 const EmissionModel& model,
                                 const HmmTransition& hmm_transition) {
    for (std::size_t i = 0; i < kStateCount; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < kStateCount; ++j) {
            row_sum += hmm_transition[i][j];
        }
        if (std::abs(row_sum - 1.0) > 1e-9) {
            throw ConfigError("belief_update: transition matrix row " +
                              std::to_string(i) + " does not sum to 1");
        }
    }

    // Predict.
    std::array<double, kStateCount> predicted{};
    for (std::size_t i = 0; i < kStateCount; ++i) {
        const double p = prior[static_cast<ConvState>(i)];
        for (std::size_t j = 0; j < kStateCount; ++j) {
            predicted[j] += p * hmm_transition[i][j];
        }
    }

    // Weight by the observation likelihood, channels independent given the
    // state. The gaze channel carries presence only; the target id is used
    // by the addressed rule, not by state inference.
    const double noise = model.noise_flip;
    std::array<double, kStateCount> weighted{};
    double total = 0.0;
    for (std::size_t j = 0; j < kStateCount; ++j) {
        const StateEmission& e = model.per_state[j];
        double lik = boolean_likelihood(observed.speaking, e.speaking, noise);
        lik *= observed.gaze_target.has_value() ? e.gaze_at_addressee
                                                : 1.0 - e.gaze_at_addressee;
        lik *= boolean_likelihood(observed.attention_display, e.attention, noise);
        lik *= boolean_likelihood(observed.backchannel, e.backchannel, noise);
        weighted[j] = predicted[j] * lik;
        total += weighted[j];
    }

    BeliefUpdateResult result;
    if (total <= 0.0) {
        result.posterior = BeliefState::uniform();
        result.degenerate = true;
        return result;
    }
    for (std::size_t j = 0; j < kStateCount; ++j) {
        result.posterior[static_cast<ConvState>(j)] = weighted[j] / total;
    }
    return result;
}

ConvState map_state(const BeliefState& belief) {
    ConvState best = ConvState::Unaddressed;
    double best_p = belief[best];
    for (ConvState s : kAllStates) {
        if (belief[s] > best_p) {  // strict: ties keep the earlier state
            best = s;
            best_p = belief[s];
        }
    }
    return best;
}

bool infer_addressed(const std::map<AgentId, CueVector>& cues_from_others,
                     bool own_attention, AgentId self) {
    if (!own_attention) return false;
    for (const auto& [id, cues] : cues_from_others) {
        if (id == self) continue;
        if (cues.speaking && cues.gaze_target == self) return true;
    }
    return false;
}

}  // namespace turnsim
