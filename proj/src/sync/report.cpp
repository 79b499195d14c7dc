#include "turnsim/sync/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "turnsim/errors.hpp"

namespace turnsim::sync {

namespace {

using ojson = nlohmann::ordered_json;

/// Overlapping portions of two equal-length series after shifting the second
/// one by `lag` ticks.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> align(const std::vector<T>& a,
                                                const std::vector<T>& b,
                                                long lag) {
    const long n = static_cast<long>(a.size());
    if (std::labs(lag) >= n) {
        throw UsageError("lag must be smaller than the series length");
    }
    std::vector<T> out_a;
    std::vector<T> out_b;
    out_a.reserve(n - std::labs(lag));
    out_b.reserve(n - std::labs(lag));
    for (long t = 0; t < n; ++t) {
        const long s = t + lag;
        if (s < 0 || s >= n) continue;
        out_a.push_back(a[t]);
        out_b.push_back(b[s]);
    }
    return {std::move(out_a), std::move(out_b)};
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ojson optional_tick(const std::optional<std::uint64_t>& t) {
    if (t) return *t;
    return nullptr;
}

}  // namespace

bool SynchronyReport::converged() const {
    for (const auto& [pair, entry] : convergence) {
        if (!entry.liking_tick || !entry.dominance_tick) return false;
    }
    return true;
}

std::optional<std::uint64_t> SynchronyReport::overall_convergence_tick() const {
    if (!converged() || convergence.empty()) return std::nullopt;
    std::uint64_t latest = 0;
    for (const auto& [pair, entry] : convergence) {
        latest = std::max({latest, *entry.liking_tick, *entry.dominance_tick});
    }
    return latest;
}

double SynchronyReport::mean_state_mi_bits() const {
    if (state_mi_bits.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [pair, bits] : state_mi_bits) sum += bits;
    return sum / static_cast<double>(state_mi_bits.size());
}

double SynchronyReport::mean_plv() const {
    if (speaking_plv.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [pair, plv] : speaking_plv) sum += plv.value;
    return sum / static_cast<double>(speaking_plv.size());
}

SynchronyReport analyze_trace(const Trace& trace,
                              const MetricsConfig& metrics) {
    const auto& ids = trace.agent_ids;
    if (trace.records.empty()) {
        throw UsageError("analyze: trace has no records");
    }
    if (ids.size() < 2) {
        throw UsageError("analyze: trace needs at least 2 agents");
    }

    SynchronyReport report;
    report.window = metrics.window;
    report.epsilon = metrics.epsilon;
    report.k = metrics.k;
    report.lag = metrics.lag;

    // Per-agent discrete state sequence and binary speaking indicator.
    std::map<AgentId, SymbolSequence> state_seq;
    std::map<AgentId, RealSeries> speaking_seq;
    for (std::size_t idx = 0; idx < ids.size(); ++idx) {
        SymbolSequence& sym = state_seq[ids[idx]];
        RealSeries& spk = speaking_seq[ids[idx]];
        sym.reserve(trace.records.size());
        spk.reserve(trace.records.size());
        for (const TickRecord& rec : trace.records) {
            sym.push_back(static_cast<int>(rec.states[idx]));
            spk.push_back(rec.states[idx] == ConvState::Speaking ? 1.0 : 0.0);
        }
    }

    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            const SynchronyReport::Pair pair{ids[i], ids[j]};
            const auto [sa, sb] =
                align(state_seq.at(ids[i]), state_seq.at(ids[j]), metrics.lag);
            report.state_mi_bits[pair] = discrete_mutual_information(sa, sb);
            const auto [ra, rb] = align(speaking_seq.at(ids[i]),
                                        speaking_seq.at(ids[j]), metrics.lag);
            report.speaking_plv[pair] = phase_locking_value(ra, rb);
        }
    }

    // Directed attitude series: couple the liking and dominance components
    // of each directed pair. Attitude steps plateau, so the tie-breaking
    // jitter stays on for the KSG estimate.
    KsgOptions ksg;
    ksg.k = metrics.k;
    ksg.jitter = true;
    for (AgentId from : ids) {
        for (AgentId to : ids) {
            if (from == to) continue;
            RealSeries liking;
            RealSeries dominance;
            liking.reserve(trace.records.size());
            dominance.reserve(trace.records.size());
            for (const TickRecord& rec : trace.records) {
                const Attitude& a = rec.attitudes.at(from, to);
                liking.push_back(a.liking);
                dominance.push_back(a.dominance);
            }
            const SynchronyReport::Pair pair{from, to};
            const auto [la, ld] = align(liking, dominance, metrics.lag);
            report.attitude_mi_nats[pair] = ksg_mutual_information(la, ld, ksg);

            SynchronyReport::ConvergenceEntry entry;
            if (const auto t =
                    convergence_tick(liking, metrics.window, metrics.epsilon)) {
                entry.liking_tick = static_cast<std::uint64_t>(*t);
            }
            if (const auto t = convergence_tick(dominance, metrics.window,
                                                metrics.epsilon)) {
                entry.dominance_tick = static_cast<std::uint64_t>(*t);
            }
            report.convergence[pair] = entry;
        }
    }
    return report;
}

std::string report_to_json(const SynchronyReport& report) {
    ojson out;
    out["window"] = report.window;
    out["epsilon"] = report.epsilon;
    out["k"] = report.k;
    out["lag"] = report.lag;

    ojson state_mi = ojson::array();
    for (const auto& [pair, bits] : report.state_mi_bits) {
        state_mi.push_back({{"a", pair.first}, {"b", pair.second}, {"bits", bits}});
    }
    out["state_mi_bits"] = std::move(state_mi);

    ojson plv = ojson::array();
    for (const auto& [pair, r] : report.speaking_plv) {
        plv.push_back({{"a", pair.first},
                       {"b", pair.second},
                       {"value", r.value},
                       {"degenerate", r.degenerate}});
    }
    out["speaking_plv"] = std::move(plv);

    ojson attitude = ojson::array();
    for (const auto& [pair, nats] : report.attitude_mi_nats) {
        attitude.push_back(
            {{"from", pair.first}, {"to", pair.second}, {"nats", nats}});
    }
    out["attitude_mi_nats"] = std::move(attitude);

    ojson convergence = ojson::array();
    for (const auto& [pair, entry] : report.convergence) {
        convergence.push_back({{"from", pair.first},
                               {"to", pair.second},
                               {"liking_tick", optional_tick(entry.liking_tick)},
                               {"dominance_tick",
                                optional_tick(entry.dominance_tick)}});
    }
    out["convergence"] = std::move(convergence);

    out["converged"] = report.converged();
    out["overall_convergence_tick"] =
        optional_tick(report.overall_convergence_tick());
    out["mean_state_mi_bits"] = report.mean_state_mi_bits();
    out["mean_plv"] = report.mean_plv();
    return out.dump(2);
}

std::string report_to_csv(const SynchronyReport& report) {
    std::ostringstream out;
    out << "pair,metric,value\n";
    for (const auto& [pair, bits] : report.state_mi_bits) {
        out << pair.first << '-' << pair.second << ",state_mi_bits,"
            << format_double(bits) << '\n';
    }
    for (const auto& [pair, r] : report.speaking_plv) {
        out << pair.first << '-' << pair.second << ",plv,"
            << format_double(r.value) << '\n';
        out << pair.first << '-' << pair.second << ",plv_degenerate,"
            << (r.degenerate ? 1 : 0) << '\n';
    }
    for (const auto& [pair, nats] : report.attitude_mi_nats) {
        out << pair.first << "->" << pair.second << ",attitude_mi_nats,"
            << format_double(nats) << '\n';
    }
    for (const auto& [pair, entry] : report.convergence) {
        out << pair.first << "->" << pair.second << ",liking_convergence_tick,";
        if (entry.liking_tick) out << *entry.liking_tick;
        out << '\n';
        out << pair.first << "->" << pair.second
            << ",dominance_convergence_tick,";
        if (entry.dominance_tick) out << *entry.dominance_tick;
        out << '\n';
    }
    out << "all,converged," << (report.converged() ? "true" : "false") << '\n';
    out << "all,overall_convergence_tick,";
    if (const auto t = report.overall_convergence_tick()) out << *t;
    out << '\n';
    out << "all,mean_state_mi_bits," << format_double(report.mean_state_mi_bits())
        << '\n';
    out << "all,mean_plv," << format_double(report.mean_plv()) << '\n';
    return out.str();
}

}  // namespace turnsim::sync
