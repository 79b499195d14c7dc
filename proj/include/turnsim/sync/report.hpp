#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "turnsim/engine.hpp"
#include "turnsim/sync/metrics.hpp"

namespace turnsim::sync {

/// Synchrony metrics of one trace. State MI and PLV are computed per
/// unordered agent pair; attitude metrics per directed pair, where the
/// attitude MI couples the liking and dominance series of that directed
/// attitude and the convergence detector runs on each component.
struct SynchronyReport {
    using Pair = std::pair<AgentId, AgentId>;

    struct ConvergenceEntry {
        std::optional<std::uint64_t> liking_tick;
        std::optional<std::uint64_t> dominance_tick;
    };

    std::map<Pair, double> state_mi_bits;       // unordered pairs (a < b)
    std::map<Pair, PlvResult> speaking_plv;     // unordered pairs (a < b)
    std::map<Pair, double> attitude_mi_nats;    // directed pairs
    std::map<Pair, ConvergenceEntry> convergence;  // directed pairs

    std::uint64_t window = 0;
    double epsilon = 0.0;
    int k = 0;
    long lag = 0;

    /// All attitude components settled.
    bool converged() const;
    /// Latest per-component convergence tick; nullopt unless all converged.
    std::optional<std::uint64_t> overall_convergence_tick() const;

    double mean_state_mi_bits() const;
    double mean_plv() const;
};

/// Compute every metric of the report from a trace. The lag setting shifts
/// the second series of each pair. Pure: identical traces give identical
/// reports.
SynchronyReport analyze_trace(const Trace& trace, const MetricsConfig& metrics);

std::string report_to_json(const SynchronyReport& report);

/// Flat CSV, one row per pair/metric: pair,metric,value.
std::string report_to_csv(const SynchronyReport& report);

}  // namespace turnsim::sync
