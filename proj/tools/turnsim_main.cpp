#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "turnsim/config.hpp"
#include "turnsim/engine.hpp"
#include "turnsim/errors.hpp"
#include "turnsim/sync/report.hpp"
#include "turnsim/trace_io.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using turnsim::ConfigError;
using turnsim::UsageError;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw UsageError("failed while writing '" + path + "'");
}

turnsim::SimConfig load_config(const std::string& path) {
    return turnsim::parse_config(read_file(path));
}

std::map<std::string, std::uint64_t> count_events(const turnsim::Trace& trace) {
    std::map<std::string, std::uint64_t> counts{
        {"FloorTaken", 0},
        {"FloorReleased", 0},
        {"Interruption", 0},
        {"DegenerateObservation", 0},
    };
    for (const turnsim::TickRecord& rec : trace.records) {
        for (const turnsim::Event& e : rec.events) {
            ++counts[std::string(turnsim::to_string(e.kind))];
        }
    }
    return counts;
}

std::string trace_to_string(const turnsim::Trace& trace) {
    std::ostringstream out;
    turnsim::io::write_trace(trace, out);
    return out.str();
}

/// Report file: digests, event counts, wall time, and the synchrony report.
std::string report_file_json(const turnsim::Trace& trace,
                             const std::string& trace_bytes,
                             const turnsim::sync::SynchronyReport& report,
                             double wall_seconds) {
    ordered_json out;
    out["config_digest"] =
        turnsim::io::fnv1a_hex(turnsim::serialize_config(trace.config));
    out["trace_digest"] = turnsim::io::fnv1a_hex(trace_bytes);
    ordered_json counts;
    for (const auto& [kind, count] : count_events(trace)) counts[kind] = count;
    out["event_counts"] = std::move(counts);
    out["wall_time_seconds"] = wall_seconds;
    out["report"] = ordered_json::parse(turnsim::sync::report_to_json(report));
    return out.dump(2) + "\n";
}

/// report.json -> report.csv next to it.
std::string csv_sibling(const std::string& out_path) {
    fs::path p(out_path);
    if (p.extension() == ".json") {
        p.replace_extension(".csv");
    } else {
        p += ".csv";
    }
    return p.string();
}

struct SeedRange {
    std::uint64_t first = 0;
    std::uint64_t last = 0;
};

SeedRange parse_seed_range(const std::string& text) {
    static const std::regex range_re(R"(^(\d+)\.\.(\d+)$)");
    static const std::regex single_re(R"(^(\d+)$)");
    std::smatch m;
    SeedRange range;
    if (std::regex_match(text, m, range_re)) {
        range.first = std::stoull(m[1]);
        range.last = std::stoull(m[2]);
    } else if (std::regex_match(text, m, single_re)) {
        range.first = range.last = std::stoull(m[1]);
    } else {
        throw UsageError("--seeds expects A..B (e.g. 1..8), got '" + text + "'");
    }
    if (range.last < range.first) {
        throw UsageError("--seeds range is empty: " + text);
    }
    return range;
}

int command_validate(const std::string& config_path) {
    const turnsim::SimConfig config = load_config(config_path);
    std::cout << "config ok: " << config.agents.size() << " agents, "
              << config.run.ticks << " ticks, seed " << config.run.seed
              << ", digest "
              << turnsim::io::fnv1a_hex(turnsim::serialize_config(config))
              << "\n";
    return 0;
}

int command_run(const std::string& config_path,
                const std::optional<std::uint64_t>& seed,
                const std::optional<std::uint64_t>& ticks,
                const std::string& out_path) {
    turnsim::SimConfig config = load_config(config_path);
    if (seed) config.run.seed = *seed;
    if (ticks) config.run.ticks = *ticks;
    config.validate();

    const turnsim::Trace trace = turnsim::run(config);
    const std::string bytes = trace_to_string(trace);
    write_file(out_path, bytes);

    std::cout << "trace: " << out_path << "\n"
              << "agents: " << trace.agent_ids.size()
              << "  ticks: " << config.run.ticks
              << "  seed: " << config.run.seed << "\n"
              << "digest: " << turnsim::io::fnv1a_hex(bytes) << "\n";
    for (const auto& [kind, count] : count_events(trace)) {
        std::cout << kind << ": " << count << "\n";
    }
    return 0;
}

int command_analyze(const std::string& trace_path, const std::string& out_path,
                    const std::optional<long>& lag) {
    const auto started = std::chrono::steady_clock::now();
    const std::string trace_bytes = read_file(trace_path);
    std::istringstream in(trace_bytes);
    const turnsim::Trace trace = turnsim::io::read_trace(in);

    turnsim::MetricsConfig metrics = trace.config.metrics;
    if (lag) metrics.lag = *lag;
    const turnsim::sync::SynchronyReport report =
        turnsim::sync::analyze_trace(trace, metrics);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    write_file(out_path, report_file_json(trace, trace_bytes, report, wall));
    write_file(csv_sibling(out_path), turnsim::sync::report_to_csv(report));

    std::cout << "report: " << out_path << "\n"
              << "mean_state_mi_bits: " << report.mean_state_mi_bits() << "\n"
              << "mean_plv: " << report.mean_plv() << "\n"
              << "converged: " << (report.converged() ? "true" : "false")
              << "\n";
    if (const auto t = report.overall_convergence_tick()) {
        std::cout << "overall_convergence_tick: " << *t << "\n";
    }
    return 0;
}

int command_sweep(const std::string& config_path, const std::string& seeds,
                  const std::string& out_dir) {
    const turnsim::SimConfig base = load_config(config_path);
    const SeedRange range = parse_seed_range(seeds);
    const std::uint64_t count = range.last - range.first + 1;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw UsageError("cannot create directory '" + out_dir +
                         "': " + ec.message());
    }

    struct Row {
        std::uint64_t seed = 0;
        bool converged = false;
        std::optional<std::uint64_t> convergence_tick;
        std::uint64_t interruption_count = 0;
        double mean_state_mi = 0.0;
        double mean_plv = 0.0;
    };
    std::vector<Row> rows(count);
    std::vector<std::string> errors(count);

    // Independent runs; each iteration touches only its own slot and files.
    const long long total = static_cast<long long>(count);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < total; ++i) {
        const std::uint64_t seed = range.first + static_cast<std::uint64_t>(i);
        try {
            turnsim::SimConfig config = base;
            config.run.seed = seed;

            const auto started = std::chrono::steady_clock::now();
            const turnsim::Trace trace = turnsim::run(config);
            const std::string bytes = trace_to_string(trace);
            const fs::path trace_path =
                fs::path(out_dir) / ("trace_" + std::to_string(seed) + ".jsonl");
            write_file(trace_path.string(), bytes);

            const turnsim::sync::SynchronyReport report =
                turnsim::sync::analyze_trace(trace, config.metrics);
            const double wall = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - started)
                                    .count();
            const fs::path report_path =
                fs::path(out_dir) / ("report_" + std::to_string(seed) + ".json");
            write_file(report_path.string(),
                       report_file_json(trace, bytes, report, wall));
            write_file(csv_sibling(report_path.string()),
                       turnsim::sync::report_to_csv(report));

            Row row;
            row.seed = seed;
            row.converged = report.converged();
            row.convergence_tick = report.overall_convergence_tick();
            row.interruption_count = count_events(trace).at("Interruption");
            row.mean_state_mi = report.mean_state_mi_bits();
            row.mean_plv = report.mean_plv();
            rows[i] = row;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }

    for (std::uint64_t i = 0; i < count; ++i) {
        if (!errors[i].empty()) {
            throw UsageError("seed " + std::to_string(range.first + i) +
                             " failed: " + errors[i]);
        }
    }

    std::ostringstream csv;
    csv << "seed,converged,convergence_tick,interruption_count,"
           "mean_state_mi_bits,mean_plv\n";
    for (const Row& row : rows) {
        csv << row.seed << ',' << (row.converged ? "true" : "false") << ',';
        if (row.convergence_tick) csv << *row.convergence_tick;
        csv << ',' << row.interruption_count << ',';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", row.mean_state_mi);
        csv << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", row.mean_plv);
        csv << buf << '\n';
    }
    const fs::path aggregate = fs::path(out_dir) / "aggregate.csv";
    write_file(aggregate.string(), csv.str());

    std::uint64_t converged_count = 0;
    for (const Row& row : rows) converged_count += row.converged ? 1 : 0;
    std::cout << "sweep: " << count << " seeds -> " << out_dir << "\n"
              << "aggregate: " << aggregate.string() << "\n"
              << "converged: " << converged_count << "/" << count << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Deterministic multi-agent turn-taking simulator with synchrony "
        "metrics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string trace_path;
    std::string out_path;
    std::string seeds;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::uint64_t> ticks_override;
    std::optional<long> lag_override;

    CLI::App* cmd_run =
        app.add_subcommand("run", "Simulate a scenario and write a JSONL trace");
    cmd_run->add_option("--config", config_path, "Scenario file (JSON)")
        ->required();
    cmd_run->add_option("--seed", seed_override, "Override run.seed");
    cmd_run->add_option("--ticks", ticks_override, "Override run.ticks");
    cmd_run->add_option("--out", out_path, "Trace output path")->required();

    CLI::App* cmd_analyze = app.add_subcommand(
        "analyze", "Compute synchrony metrics for a recorded trace");
    cmd_analyze->add_option("--trace", trace_path, "Trace file (JSONL)")
        ->required();
    cmd_analyze
        ->add_option("--out", out_path,
                     "Report output path (a .csv sibling is written too)")
        ->required();
    cmd_analyze->add_option("--lag", lag_override,
                            "Shift the second series of each pair by N ticks");

    CLI::App* cmd_sweep = app.add_subcommand(
        "sweep", "Run independent seeds and aggregate the results");
    cmd_sweep->add_option("--config", config_path, "Scenario file (JSON)")
        ->required();
    cmd_sweep->add_option("--seeds", seeds, "Inclusive seed range A..B")
        ->required();
    cmd_sweep->add_option("--out", out_path, "Output directory")->required();

    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Parse and validate a scenario file");
    cmd_validate->add_option("--config", config_path, "Scenario file (JSON)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (cmd_run->parsed()) {
            return command_run(config_path, seed_override, ticks_override,
                               out_path);
        }
        if (cmd_analyze->parsed()) {
            return command_analyze(trace_path, out_path, lag_override);
        }
        if (cmd_sweep->parsed()) {
            return command_sweep(config_path, seeds, out_path);
        }
        if (cmd_validate->parsed()) {
            return command_validate(config_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
