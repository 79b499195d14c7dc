#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace turnsim {

using AgentId = std::uint32_t;

/// The six conversational states of an agent. The enumeration order is the
/// fixed tie-break order used when picking a MAP state from a belief.
enum class ConvState : std::uint8_t {
    Unaddressed = 0,
    Addressed = 1,
    WantToSpeak = 2,
    Speaking = 3,
    InterruptionOfSpeech = 4,
    EndOfSpeech = 5,
};

inline constexpr std::size_t kStateCount = 6;

inline constexpr std::array<ConvState, kStateCount> kAllStates = {
    ConvState::Unaddressed,        ConvState::Addressed,
    ConvState::WantToSpeak,        ConvState::Speaking,
    ConvState::InterruptionOfSpeech, ConvState::EndOfSpeech,
};

constexpr std::string_view to_string(ConvState s) {
    switch (s) {
        case ConvState::Unaddressed: return "Unaddressed";
        case ConvState::Addressed: return "Addressed";
        case ConvState::WantToSpeak: return "WantToSpeak";
        case ConvState::Speaking: return "Speaking";
        case ConvState::InterruptionOfSpeech: return "InterruptionOfSpeech";
        case ConvState::EndOfSpeech: return "EndOfSpeech";
    }
    return "?";
}

std::optional<ConvState> state_from_string(std::string_view name);

/// Directed interpersonal attitude: liking and dominance, each in [-1, 1].
struct Attitude {
    double liking = 0.0;
    double dominance = 0.0;

    bool operator==(const Attitude&) const = default;
};

/// Clamp both components into [-1, 1].
Attitude clamped(Attitude a);

}  // namespace turnsim
