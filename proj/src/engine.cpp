#include "turnsim/engine.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "turnsim/errors.hpp"

namespace turnsim {

namespace {

/// Identity order, or a validated copy of the caller's permutation.
std::vector<std::size_t> resolve_order(std::span<const std::size_t> order,
                                       std::size_t n) {
    if (order.empty()) {
        std::vector<std::size_t> identity(n);
        std::iota(identity.begin(), identity.end(), std::size_t{0});
        return identity;
    }
    if (order.size() != n) {
        throw ConfigError("processing_order: size must match the agent count");
    }
    std::vector<bool> seen(n, false);
    for (std::size_t k : order) {
        if (k >= n || seen[k]) {
            throw ConfigError("processing_order: not a permutation");
        }
        seen[k] = true;
    }
    return {order.begin(), order.end()};
}

/// The most liked other agent; ties go to the lowest id.
AgentId pick_addressee(const AttitudeMatrix& attitudes, AgentId self) {
    const auto likings = attitudes.likings_of(self);
    auto best = likings.begin();
    for (auto it = std::next(likings.begin()); it != likings.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

std::vector<ConvState> snapshot_states(const WorldState& world) {
    std::vector<ConvState> states;
    states.reserve(world.agents.size());
    for (const AgentRuntime& a : world.agents) states.push_back(a.state);
    return states;
}

std::uint32_t clip_utterance(std::uint64_t length) {
    return static_cast<std::uint32_t>(std::min<std::uint64_t>(
        length, std::numeric_limits<std::uint32_t>::max()));
}

}  // namespace

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::FloorTaken: return "FloorTaken";
        case EventKind::FloorReleased: return "FloorReleased";
        case EventKind::Interruption: return "Interruption";
        case EventKind::DegenerateObservation: return "DegenerateObservation";
    }
    return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
    for (EventKind k : {EventKind::FloorTaken, EventKind::FloorReleased,
                        EventKind::Interruption,
                        EventKind::DegenerateObservation}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

bool operator==(const Trace& a, const Trace& b) {
    return a.config == b.config && a.agent_ids == b.agent_ids &&
           a.records == b.records;
}

WorldState init_world(const SimConfig& config) {
    config.validate();

    std::vector<AgentConfig> agents = config.agents;
    std::sort(agents.begin(), agents.end(),
              [](const AgentConfig& a, const AgentConfig& b) {
                  return a.id < b.id;
              });
    std::vector<AgentId> ids;
    ids.reserve(agents.size());
    for (const AgentConfig& a : agents) ids.push_back(a.id);

    WorldState world;
    world.attitudes =
        AttitudeMatrix(ids, config.initial_attitudes.default_value);
    for (const AttitudeOverride& o : config.initial_attitudes.overrides) {
        world.attitudes.set(o.from, o.to, o.value);
    }

    for (const AgentConfig& a : agents) {
        AgentRuntime rt;
        rt.id = a.id;
        rt.state = a.initial_state;
        rt.talkativeness = a.talkativeness;
        for (AgentId other : ids) {
            if (other != a.id) rt.beliefs.emplace(other, BeliefState::uniform());
        }
        if (rt.state == ConvState::Speaking ||
            rt.state == ConvState::EndOfSpeech) {
            rt.addressee = pick_addressee(world.attitudes, rt.id);
        }
        if (rt.state == ConvState::Speaking) {
            SplitMix rng(substream_seed(config.run.seed, rt.id, 0, kSaltInit));
            rt.utterance_remaining = clip_utterance(sample_utterance_length(
                rng, config.dynamics.mean_utterance_ticks));
        }
        world.agents.push_back(std::move(rt));
    }
    return world;
}

std::uint64_t sample_utterance_length(SplitMix& rng, double mean_ticks) {
    if (!(mean_ticks >= 1.0)) {
        throw ConfigError("mean_utterance_ticks must be >= 1");
    }
    return rng.geometric_min1(mean_ticks);
}

std::vector<Event> step(WorldState& world, const SimConfig& config,
                        std::span<const std::size_t> processing_order,
                        StepObserver* observer) {
    const std::size_t n = world.agents.size();
    const std::vector<std::size_t> order = resolve_order(processing_order, n);
    const std::uint64_t t = world.tick;
    const bool oracle = config.perception.mode == PerceptionMode::Oracle;
    const EmissionModel& emission = config.perception.emission;
    const HmmTransition hmm =
        sticky_transition(config.perception.hmm_stay_probability);

    // Phase 1: every agent emits cues from its tick-t state. Each agent has
    // its own substream, so the loop order cannot matter.
    std::map<AgentId, CueVector> cues;
    for (std::size_t k : order) {
        const AgentRuntime& a = world.agents[k];
        SplitMix rng(substream_seed(config.run.seed, a.id, t, kSaltCues));
        cues[a.id] = emit_cues(a.state, a.addressee, emission, rng);
    }

    // Phase 2: forward-filter every directed belief on those cues. Updates
    // are independent across (observer, observed) pairs.
    std::vector<std::vector<bool>> degenerate(n, std::vector<bool>(n, false));
    for (std::size_t ki : order) {
        AgentRuntime& self = world.agents[ki];
        for (std::size_t kj : order) {
            if (ki == kj) continue;
            const AgentId j = world.agents[kj].id;
            BeliefState& belief = self.beliefs.at(j);
            const BeliefUpdateResult r =
                belief_update(belief, cues.at(j), emission, hmm);
            belief = r.posterior;
            degenerate[ki][kj] = r.degenerate;
            if (observer) observer->on_belief(t, self.id, j, r.posterior);
        }
    }

    // Phase 3: pick tick-t+1 states from the frozen tick-t picture. Nothing
    // written here is visible to other agents until the commit below.
    std::vector<ConvState> next(n);
    std::vector<std::uint32_t> next_remaining(n, 0);
    std::vector<std::optional<AgentId>> next_addressee(n);
    for (std::size_t k : order) {
        const AgentRuntime& self = world.agents[k];
        SplitMix rng(substream_seed(config.run.seed, self.id, t, kSaltDecide));

        std::map<AgentId, ConvState> perceived;
        for (const AgentRuntime& other : world.agents) {
            if (other.id == self.id) continue;
            perceived[other.id] =
                oracle ? other.state : map_state(self.beliefs.at(other.id));
        }

        TransitionContext ctx;
        if (oracle) {
            for (const AgentRuntime& other : world.agents) {
                if (other.id != self.id && other.state == ConvState::Speaking &&
                    other.addressee == self.id) {
                    ctx.addressed = true;
                    break;
                }
            }
        } else {
            std::map<AgentId, CueVector> cues_from_others = cues;
            cues_from_others.erase(self.id);
            ctx.addressed = infer_addressed(
                cues_from_others, cues.at(self.id).attention_display, self.id);
        }

        // One drive draw per agent per tick keeps the decision stream aligned
        // whatever the current state is.
        const double drive = speech_drive(world.attitudes.likings_of(self.id),
                                          self.talkativeness);
        ctx.drive_fired = rng.bernoulli(drive);
        ctx.utterance_finished =
            self.state == ConvState::Speaking && self.utterance_remaining <= 1;
        if (self.state == ConvState::Speaking) {
            for (const auto& [j, state] : perceived) {
                if (state == ConvState::Speaking &&
                    world.attitudes.at(self.id, j).dominance >=
                        config.dynamics.yield_threshold) {
                    ctx.yield_to_speaker = true;
                    break;
                }
            }
        }

        const SpeakerAggregates agg = speaker_aggregates(
            perceived, world.attitudes.attitudes_of(self.id), self.id);
        next[k] = transition(self.state, agg, ctx);

        if (next[k] == ConvState::Speaking) {
            if (self.state == ConvState::Speaking) {
                next_remaining[k] = self.utterance_remaining - 1;
                next_addressee[k] = self.addressee;
            } else {
                next_remaining[k] = clip_utterance(sample_utterance_length(
                    rng, config.dynamics.mean_utterance_ticks));
                next_addressee[k] = pick_addressee(world.attitudes, self.id);
            }
        } else if (next[k] == ConvState::EndOfSpeech) {
            next_addressee[k] = self.addressee;
        }
    }

    // Phase 4: events in canonical ascending-id order, independent of the
    // processing order. Attitude updates follow the same canonical order.
    std::vector<Event> events;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (degenerate[i][j]) {
                events.push_back({t, EventKind::DegenerateObservation,
                                  world.agents[i].id, world.agents[j].id});
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (next[k] == ConvState::Speaking &&
            world.agents[k].state != ConvState::Speaking) {
            events.push_back(
                {t, EventKind::FloorTaken, world.agents[k].id, 0});
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (world.agents[k].state == ConvState::Speaking &&
            next[k] == ConvState::EndOfSpeech) {
            events.push_back(
                {t, EventKind::FloorReleased, world.agents[k].id, 0});
        }
    }
    const AttitudeUpdateParams params{config.dynamics.delta_dominance,
                                      config.dynamics.delta_liking};
    for (std::size_t kx = 0; kx < n; ++kx) {
        if (world.agents[kx].state != ConvState::Speaking ||
            next[kx] != ConvState::InterruptionOfSpeech) {
            continue;
        }
        const AgentId interrupted = world.agents[kx].id;
        for (std::size_t ky = 0; ky < n; ++ky) {
            if (ky == kx || world.agents[ky].state != ConvState::Speaking) {
                continue;
            }
            const AgentId interrupter = world.agents[ky].id;
            events.push_back(
                {t, EventKind::Interruption, interrupter, interrupted});
            world.attitudes = apply_interruption_update(
                std::move(world.attitudes), interrupter, interrupted, params);
        }
    }

    // Phase 5: commit.
    for (std::size_t k = 0; k < n; ++k) {
        AgentRuntime& a = world.agents[k];
        a.state = next[k];
        a.utterance_remaining =
            next[k] == ConvState::Speaking ? next_remaining[k] : 0;
        if (next[k] == ConvState::Speaking ||
            next[k] == ConvState::EndOfSpeech) {
            a.addressee = next_addressee[k];
        } else {
            a.addressee.reset();
        }
    }
    world.last_cues = std::move(cues);
    world.tick = t + 1;
    return events;
}

Trace run(const SimConfig& config, StepObserver* observer,
          std::span<const std::size_t> processing_order) {
    WorldState world = init_world(config);

    Trace trace;
    trace.config = config;
    for (const AgentRuntime& a : world.agents) trace.agent_ids.push_back(a.id);
    trace.records.reserve(config.run.ticks + 1);

    for (std::uint64_t t = 0; t < config.run.ticks; ++t) {
        TickRecord rec;
        rec.tick = t;
        rec.states = snapshot_states(world);
        rec.attitudes = world.attitudes;
        rec.events = step(world, config, processing_order, observer);
        for (AgentId id : trace.agent_ids) rec.cues.push_back(world.last_cues.at(id));
        trace.records.push_back(std::move(rec));
    }

    // Final record: cues are still emitted from the final states, so a run of
    // T ticks agrees record for record with the first T + 1 records of any
    // longer run (events of the last record excepted; no step produced them).
    TickRecord last;
    last.tick = config.run.ticks;
    last.states = snapshot_states(world);
    last.attitudes = world.attitudes;
    for (AgentRuntime& a : world.agents) {
        SplitMix rng(
            substream_seed(config.run.seed, a.id, config.run.ticks, kSaltCues));
        const CueVector cue =
            emit_cues(a.state, a.addressee, config.perception.emission, rng);
        world.last_cues[a.id] = cue;
        last.cues.push_back(cue);
    }
    trace.records.push_back(std::move(last));
    return trace;
}

}  // namespace turnsim
