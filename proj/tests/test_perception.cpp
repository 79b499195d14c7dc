#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "turnsim/errors.hpp"
#include "turnsim/perception.hpp"
#include "turnsim/rng.hpp"

using namespace turnsim;

namespace {

/// Deterministic emission model: every probability is 0 or 1, no flip noise.
EmissionModel crisp_model() {
    EmissionModel m;
    m.noise_flip = 0.0;
    for (ConvState s : kAllStates) m.row(s) = StateEmission{0.0, 0.0, 0.0, 0.0};
    m.row(ConvState::Speaking) = StateEmission{1.0, 1.0, 1.0, 0.0};
    m.row(ConvState::Addressed) = StateEmission{0.0, 0.0, 1.0, 1.0};
    return m;
}

}  // namespace

TEST_CASE("emit_cues: noiseless deterministic rows") {
    EmissionModel model = crisp_model();
    SplitMix rng(1);
    const CueVector speaking =
        emit_cues(ConvState::Speaking, AgentId{7}, model, rng);
    CHECK(speaking.speaking);
    CHECK(speaking.gaze_target == AgentId{7});
    CHECK(speaking.attention_display);
    CHECK_FALSE(speaking.backchannel);

    const CueVector idle =
        emit_cues(ConvState::Unaddressed, std::nullopt, model, rng);
    CHECK_FALSE(idle.speaking);
    CHECK_FALSE(idle.gaze_target.has_value());
    CHECK_FALSE(idle.attention_display);
    CHECK_FALSE(idle.backchannel);
}

TEST_CASE("emit_cues: certain flip negates every boolean, gaze untouched") {
    EmissionModel model = crisp_model();
    model.noise_flip = 1.0;
    SplitMix rng(2);
    const CueVector cue = emit_cues(ConvState::Speaking, AgentId{3}, model, rng);
    CHECK_FALSE(cue.speaking);
    CHECK(cue.gaze_target == AgentId{3});  // id channel is not flipped
    CHECK_FALSE(cue.attention_display);
    CHECK(cue.backchannel);
}

TEST_CASE("emit_cues: no addressee means no gaze even when the draw fires") {
    EmissionModel model = crisp_model();
    model.row(ConvState::WantToSpeak).gaze_at_addressee = 1.0;
    SplitMix rng(3);
    const CueVector cue =
        emit_cues(ConvState::WantToSpeak, std::nullopt, model, rng);
    CHECK_FALSE(cue.gaze_target.has_value());
}

TEST_CASE("emit_cues: empirical rates follow the default model") {
    const EmissionModel model = EmissionModel::defaults();
    int speaking = 0;
    int gaze = 0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        SplitMix rng(substream_seed(99, 0, static_cast<std::uint64_t>(i), 0));
        const CueVector cue =
            emit_cues(ConvState::Speaking, AgentId{1}, model, rng);
        speaking += cue.speaking ? 1 : 0;
        gaze += cue.gaze_target.has_value() ? 1 : 0;
    }
    // speaking: 0.98 emitted, then flipped with 0.02.
    const double p_speaking = 0.98 * 0.98 + 0.02 * 0.02;
    CHECK(speaking / static_cast<double>(trials) ==
          doctest::Approx(p_speaking).epsilon(0.02));
    CHECK(gaze / static_cast<double>(trials) ==
          doctest::Approx(model.row(ConvState::Speaking).gaze_at_addressee)
              .epsilon(0.02));
}

TEST_CASE("sticky transition: rows are stochastic with the stay mass") {
    const HmmTransition t = sticky_transition(0.8);
    for (std::size_t i = 0; i < kStateCount; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < kStateCount; ++j) {
            sum += t[i][j];
            if (i == j) {
                CHECK(t[i][j] == doctest::Approx(0.8));
            } else {
                CHECK(t[i][j] == doctest::Approx(0.2 / 5.0));
            }
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("belief_update: observation uniquely consistent with Speaking") {
    const EmissionModel model = crisp_model();
    CueVector cue;
    cue.speaking = true;
    cue.gaze_target = AgentId{2};
    cue.attention_display = true;
    cue.backchannel = false;
    const BeliefUpdateResult r = belief_update(
        BeliefState::uniform(), cue, model, sticky_transition(0.8));
    CHECK_FALSE(r.degenerate);
    CHECK(map_state(r.posterior) == ConvState::Speaking);
    for (ConvState s : kAllStates) {
        CHECK(r.posterior[ConvState::Speaking] >= r.posterior[s]);
    }
    CHECK(r.posterior[ConvState::Speaking] == doctest::Approx(1.0));
}

TEST_CASE("belief_update: posterior is normalized for arbitrary inputs") {
    const EmissionModel model = EmissionModel::defaults();
    const HmmTransition hmm = sticky_transition(0.8);
    SplitMix rng(5);
    BeliefState belief = BeliefState::uniform();
    for (int i = 0; i < 500; ++i) {
        CueVector cue;
        cue.speaking = rng.bernoulli(0.5);
        if (rng.bernoulli(0.3)) cue.gaze_target = AgentId{1};
        cue.attention_display = rng.bernoulli(0.5);
        cue.backchannel = rng.bernoulli(0.5);
        const BeliefUpdateResult r = belief_update(belief, cue, model, hmm);
        belief = r.posterior;
        CHECK(std::abs(belief.sum() - 1.0) <= 1e-9);
        for (ConvState s : kAllStates) CHECK(belief[s] >= 0.0);
    }
}

TEST_CASE("belief_update: zero likelihood resets to uniform and flags") {
    // A frozen point-mass prior plus a cue only Speaking can produce.
    const EmissionModel model = crisp_model();
    CueVector cue;
    cue.speaking = true;
    const BeliefUpdateResult r =
        belief_update(BeliefState::point_mass(ConvState::Unaddressed), cue,
                      model, sticky_transition(1.0));
    CHECK(r.degenerate);
    for (ConvState s : kAllStates) {
        CHECK(r.posterior[s] == doctest::Approx(1.0 / 6.0));
    }
}

TEST_CASE("belief_update: non-stochastic transition matrix is rejected") {
    HmmTransition bad = sticky_transition(0.8);
    bad[2][3] += 0.5;
    CHECK_THROWS_AS(belief_update(BeliefState::uniform(), CueVector{},
                                  EmissionModel::defaults(), bad),
                    ConfigError);
}

TEST_CASE("map_state: argmax with fixed-order tie-break") {
    CHECK(map_state(BeliefState::point_mass(ConvState::Speaking)) ==
          ConvState::Speaking);
    CHECK(map_state(BeliefState::uniform()) == ConvState::Unaddressed);

    BeliefState b;
    b[ConvState::Unaddressed] = 0.4;
    b[ConvState::Addressed] = 0.4;
    b[ConvState::WantToSpeak] = 0.2;
    b[ConvState::Speaking] = 0.0;
    b[ConvState::InterruptionOfSpeech] = 0.0;
    b[ConvState::EndOfSpeech] = 0.0;
    CHECK(map_state(b) == ConvState::Unaddressed);
}

TEST_CASE("infer_addressed: dyadic rule") {
    CueVector b_to_a;
    b_to_a.speaking = true;
    b_to_a.gaze_target = AgentId{0};

    CHECK(infer_addressed({{1, b_to_a}}, true, 0));
    CHECK_FALSE(infer_addressed({{1, b_to_a}}, false, 0));

    CueVector b_to_c = b_to_a;
    b_to_c.gaze_target = AgentId{2};
    CHECK_FALSE(infer_addressed({{1, b_to_c}}, true, 0));

    CueVector silent;
    silent.gaze_target = AgentId{0};
    CHECK_FALSE(infer_addressed({{1, silent}}, true, 0));
}

TEST_CASE("infer_addressed: adding a speaking-gazing cue never retracts") {
    SplitMix rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<AgentId, CueVector> cues;
        const int others = 1 + static_cast<int>(rng.next() % 4);
        for (int j = 0; j < others; ++j) {
            CueVector c;
            c.speaking = rng.bernoulli(0.5);
            if (rng.bernoulli(0.5)) {
                c.gaze_target = static_cast<AgentId>(rng.next() % 5);
            }
            c.attention_display = rng.bernoulli(0.5);
            cues[static_cast<AgentId>(j + 1)] = c;
        }
        const bool own_attention = rng.bernoulli(0.5);
        const bool before = infer_addressed(cues, own_attention, 0);
        CueVector direct;
        direct.speaking = true;
        direct.gaze_target = AgentId{0};
        cues[static_cast<AgentId>(others + 1)] = direct;
        const bool after = infer_addressed(cues, own_attention, 0);
        if (before) CHECK(after);
    }
}

TEST_CASE("emission model validation") {
    EmissionModel bad = EmissionModel::defaults();
    bad.row(ConvState::Speaking).attention = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = EmissionModel::defaults();
    bad.noise_flip = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_NOTHROW(EmissionModel::defaults().validate());
}
