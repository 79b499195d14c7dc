#include "turnsim/types.hpp"

#include <algorithm>

namespace turnsim {

std::optional<ConvState> state_from_string(std::string_view name) {
    for (ConvState s : kAllStates) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

Attitude clamped(Attitude a) {
    a.liking = std::clamp(a.liking, -1.0, 1.0);
    a.dominance = std::clamp(a.dominance, -1.0, 1.0);
    return a;
}

}  // namespace turnsim
