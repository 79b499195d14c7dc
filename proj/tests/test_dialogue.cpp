#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "turnsim/dialogue.hpp"
#include "turnsim/errors.hpp"
#include "turnsim/rng.hpp"

using namespace turnsim;

namespace {

/// The three-branch floor-grab rule written down independently of the
/// production transition table.
ConvState direct_rule(const SpeakerAggregates& agg) {
    if (agg.count_speaking == 0) return ConvState::Speaking;
    if (agg.mean_dominance + std::abs(agg.mean_liking) >= 0.0) {
        return ConvState::Speaking;
    }
    return ConvState::WantToSpeak;
}

}  // namespace

TEST_CASE("speaker aggregates: means over perceived speakers only") {
    const std::map<AgentId, ConvState> perceived{
        {1, ConvState::Speaking}, {2, ConvState::Speaking}};
    const std::map<AgentId, Attitude> attitudes{
        {1, Attitude{0.6, -0.4}}, {2, Attitude{0.4, 0.2}}};
    const SpeakerAggregates agg = speaker_aggregates(perceived, attitudes, 0);
    CHECK(agg.count_speaking == 2);
    CHECK(agg.mean_dominance == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(agg.mean_liking == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("speaker aggregates: zero convention when nobody speaks") {
    const std::map<AgentId, ConvState> perceived{
        {1, ConvState::Unaddressed}, {2, ConvState::Addressed}};
    const std::map<AgentId, Attitude> attitudes{
        {1, Attitude{0.9, 0.9}}, {2, Attitude{-0.9, -0.9}}};
    const SpeakerAggregates agg = speaker_aggregates(perceived, attitudes, 0);
    CHECK(agg == SpeakerAggregates{0.0, 0.0, 0});
}

TEST_CASE("speaker aggregates: an addressed agent is not a speaker") {
    const std::map<AgentId, ConvState> perceived{{1, ConvState::Addressed}};
    const std::map<AgentId, Attitude> attitudes{{1, Attitude{0.5, 0.5}}};
    const SpeakerAggregates agg = speaker_aggregates(perceived, attitudes, 0);
    CHECK(agg == SpeakerAggregates{0.0, 0.0, 0});
}

TEST_CASE("speaker aggregates: non-speakers never influence the means") {
    std::map<AgentId, ConvState> perceived{
        {1, ConvState::Speaking}, {2, ConvState::Unaddressed}};
    const std::map<AgentId, Attitude> attitudes{
        {1, Attitude{0.25, -0.75}}, {2, Attitude{-1.0, 1.0}}};
    const SpeakerAggregates with_idle =
        speaker_aggregates(perceived, attitudes, 0);
    for (ConvState s : {ConvState::Unaddressed, ConvState::Addressed,
                        ConvState::WantToSpeak, ConvState::InterruptionOfSpeech,
                        ConvState::EndOfSpeech}) {
        perceived[2] = s;
        CHECK(speaker_aggregates(perceived, attitudes, 0) == with_idle);
    }
    CHECK(with_idle.mean_liking == doctest::Approx(0.25));
    CHECK(with_idle.mean_dominance == doctest::Approx(-0.75));
    CHECK(with_idle.count_speaking == 1);
}

TEST_CASE("speaker aggregates: key-set mismatch and self-inclusion rejected") {
    const std::map<AgentId, ConvState> perceived{{1, ConvState::Speaking}};
    const std::map<AgentId, Attitude> wrong_keys{{2, Attitude{}}};
    CHECK_THROWS_AS(speaker_aggregates(perceived, wrong_keys, 0), ConfigError);

    const std::map<AgentId, ConvState> with_self{{0, ConvState::Speaking}};
    const std::map<AgentId, Attitude> with_self_att{{0, Attitude{}}};
    CHECK_THROWS_AS(speaker_aggregates(with_self, with_self_att, 0),
                    ConfigError);
}

TEST_CASE("transition: floor grab when nobody is speaking") {
    const SpeakerAggregates agg{-1.0, -1.0, 0};
    CHECK(transition(ConvState::WantToSpeak, agg, {}) == ConvState::Speaking);
}

TEST_CASE("transition: grab inequality passes") {
    // -0.3 + |0.5| = 0.2 >= 0.
    const SpeakerAggregates agg{-0.3, 0.5, 2};
    CHECK(transition(ConvState::WantToSpeak, agg, {}) == ConvState::Speaking);
}

TEST_CASE("transition: grab inequality fails") {
    // -0.6 + |0.2| = -0.4 < 0.
    const SpeakerAggregates agg{-0.6, 0.2, 1};
    CHECK(transition(ConvState::WantToSpeak, agg, {}) ==
          ConvState::WantToSpeak);
}

TEST_CASE("transition: finished utterance releases the floor") {
    TransitionContext ctx;
    ctx.utterance_finished = true;
    CHECK(transition(ConvState::Speaking, {}, ctx) == ConvState::EndOfSpeech);
    // Finishing wins over yielding when both fire on the same tick.
    ctx.yield_to_speaker = true;
    CHECK(transition(ConvState::Speaking, {}, ctx) == ConvState::EndOfSpeech);
}

TEST_CASE("transition: yield rule sends the speaker to interruption") {
    TransitionContext ctx;
    ctx.yield_to_speaker = true;
    CHECK(transition(ConvState::Speaking, {}, ctx) ==
          ConvState::InterruptionOfSpeech);
    CHECK(transition(ConvState::Speaking, {}, {}) == ConvState::Speaking);
}

TEST_CASE("transition: listener-side rows") {
    TransitionContext addressed;
    addressed.addressed = true;
    TransitionContext drive;
    drive.drive_fired = true;
    TransitionContext both;
    both.addressed = true;
    both.drive_fired = true;

    CHECK(transition(ConvState::Unaddressed, {}, addressed) ==
          ConvState::Addressed);
    CHECK(transition(ConvState::Unaddressed, {}, drive) ==
          ConvState::WantToSpeak);
    CHECK(transition(ConvState::Unaddressed, {}, {}) == ConvState::Unaddressed);
    // Being addressed is noticed before the drive on the Unaddressed row.
    CHECK(transition(ConvState::Unaddressed, {}, both) == ConvState::Addressed);

    CHECK(transition(ConvState::Addressed, {}, both) == ConvState::WantToSpeak);
    CHECK(transition(ConvState::Addressed, {}, addressed) ==
          ConvState::Addressed);
    CHECK(transition(ConvState::Addressed, {}, {}) == ConvState::Unaddressed);
}

TEST_CASE("transition: one-tick states fall back to unaddressed") {
    TransitionContext ctx;
    ctx.addressed = true;
    ctx.drive_fired = true;
    ctx.yield_to_speaker = true;
    ctx.utterance_finished = true;
    CHECK(transition(ConvState::InterruptionOfSpeech, {}, ctx) ==
          ConvState::Unaddressed);
    CHECK(transition(ConvState::EndOfSpeech, {}, ctx) ==
          ConvState::Unaddressed);
}

TEST_CASE("transition: grid conformance with the three-branch rule") {
    for (int c = 0; c <= 3; ++c) {
        for (int di = -10; di <= 10; ++di) {
            for (int li = -10; li <= 10; ++li) {
                const SpeakerAggregates agg{di * 0.1, li * 0.1, c};
                CHECK(transition(ConvState::WantToSpeak, agg, {}) ==
                      direct_rule(agg));
            }
        }
    }
}

TEST_CASE("attitude matrix: complete, directed, no diagonal") {
    AttitudeMatrix m({3, 1, 2}, Attitude{0.25, -0.5});
    CHECK(m.agent_ids() == std::vector<AgentId>{1, 2, 3});
    CHECK(m.at(1, 3).liking == doctest::Approx(0.25));
    m.set(1, 3, Attitude{0.9, 0.1});
    CHECK(m.at(1, 3).liking == doctest::Approx(0.9));
    // (3, 1) is an independent entry.
    CHECK(m.at(3, 1).liking == doctest::Approx(0.25));
    CHECK_THROWS_AS(m.at(1, 1), ConfigError);
    CHECK_THROWS_AS(m.at(1, 9), ConfigError);
    CHECK_THROWS_AS(m.set(2, 2, Attitude{}), ConfigError);
    CHECK_THROWS_AS(AttitudeMatrix({1, 1}, Attitude{}), ConfigError);

    const auto likings = m.likings_of(1);
    CHECK(likings.size() == 2);
    CHECK(likings.at(2) == doctest::Approx(0.25));
    CHECK(likings.at(3) == doctest::Approx(0.9));
}

TEST_CASE("interruption update: direction and magnitude") {
    const AttitudeMatrix base({0, 1, 2}, Attitude{});
    const AttitudeMatrix updated =
        apply_interruption_update(base, 1, 0, AttitudeUpdateParams{0.1, 0.1});
    CHECK(updated.at(1, 0).dominance == doctest::Approx(0.1));
    CHECK(updated.at(0, 1).liking == doctest::Approx(-0.1));
    // Untouched components and entries.
    CHECK(updated.at(1, 0).liking == doctest::Approx(0.0));
    CHECK(updated.at(0, 1).dominance == doctest::Approx(0.0));
    for (AgentId from : {0u, 1u, 2u}) {
        for (AgentId to : {0u, 1u, 2u}) {
            if (from == to || (from == 1 && to == 0) || (from == 0 && to == 1)) {
                continue;
            }
            CHECK(updated.at(from, to) == Attitude{});
        }
    }
}

TEST_CASE("interruption update: clamped at the boundaries") {
    AttitudeMatrix m({0, 1}, Attitude{});
    m.set(1, 0, Attitude{0.0, 0.95});
    m.set(0, 1, Attitude{-0.95, 0.0});
    const AttitudeMatrix updated =
        apply_interruption_update(m, 1, 0, AttitudeUpdateParams{0.1, 0.1});
    CHECK(updated.at(1, 0).dominance == doctest::Approx(1.0));
    CHECK(updated.at(0, 1).liking == doctest::Approx(-1.0));
}

TEST_CASE("interruption update: any sequence stays within bounds") {
    AttitudeMatrix m({0, 1, 2}, Attitude{});
    SplitMix rng(7);
    for (int step = 0; step < 500; ++step) {
        const AgentId a = static_cast<AgentId>(rng.next() % 3);
        AgentId b = static_cast<AgentId>(rng.next() % 3);
        if (a == b) b = (b + 1) % 3;
        m = apply_interruption_update(m, a, b, AttitudeUpdateParams{0.3, 0.4});
        for (AgentId from : m.agent_ids()) {
            for (AgentId to : m.agent_ids()) {
                if (from == to) continue;
                const Attitude& att = m.at(from, to);
                CHECK(att.liking >= -1.0);
                CHECK(att.liking <= 1.0);
                CHECK(att.dominance >= -1.0);
                CHECK(att.dominance <= 1.0);
            }
        }
    }
    CHECK_THROWS_AS(apply_interruption_update(m, 1, 1, {}), ConfigError);
    CHECK_THROWS_AS(apply_interruption_update(m, 1, 9, {}), ConfigError);
}

TEST_CASE("speech drive: defined formula") {
    CHECK(speech_drive({{1, 1.0}}, 0.1) == doctest::Approx(0.1));
    CHECK(speech_drive({{1, -1.0}, {2, -1.0}}, 0.1) == doctest::Approx(0.0));
    CHECK(speech_drive({{1, 0.0}}, 0.1) == doctest::Approx(0.05));
    CHECK_THROWS_AS(speech_drive({}, 0.1), ConfigError);
}

TEST_CASE("speech drive: monotone in every liking") {
    SplitMix rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::map<AgentId, double> likings;
        const int others = 1 + static_cast<int>(rng.next() % 4);
        for (int j = 0; j < others; ++j) {
            likings[static_cast<AgentId>(j + 1)] = rng.uniform() * 2.0 - 1.0;
        }
        const double talk = rng.uniform();
        const double base = speech_drive(likings, talk);
        for (auto& [id, liking] : likings) {
            auto raised = likings;
            raised[id] = std::min(1.0, liking + rng.uniform());
            CHECK(speech_drive(raised, talk) >= base);
        }
    }
}
