#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "turnsim/config.hpp"
#include "turnsim/engine.hpp"
#include "turnsim/errors.hpp"
#include "turnsim/trace_io.hpp"

using namespace turnsim;
namespace fs = std::filesystem;

namespace {

/// Expect a ConfigError whose message mentions the offending field.
void expect_config_error(const std::string& text, const std::string& needle) {
    try {
        parse_config(text);
        FAIL_CHECK("expected ConfigError for: " << text);
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK_MESSAGE(what.find(needle) != std::string::npos,
                      "message '" << what << "' lacks '" << needle << "'");
    }
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "turnsim-io-tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("a minimal config fills in every default") {
    const SimConfig cfg = parse_config(R"({"agents":[{"id":1},{"id":0}]})");
    REQUIRE(cfg.agents.size() == 2);
    // Agents come back sorted by id.
    CHECK(cfg.agents[0].id == 0);
    CHECK(cfg.agents[1].id == 1);
    CHECK(cfg.agents[0].talkativeness == doctest::Approx(0.05));
    CHECK(cfg.agents[0].initial_state == ConvState::Unaddressed);
    CHECK(cfg.initial_attitudes.default_value == Attitude{0.0, 0.0});
    CHECK(cfg.initial_attitudes.overrides.empty());
    CHECK(cfg.dynamics.delta_dominance == doctest::Approx(0.1));
    CHECK(cfg.dynamics.delta_liking == doctest::Approx(0.1));
    CHECK(cfg.dynamics.yield_threshold == doctest::Approx(0.0));
    CHECK(cfg.dynamics.mean_utterance_ticks == doctest::Approx(20.0));
    CHECK(cfg.perception.mode == PerceptionMode::Inferred);
    CHECK(cfg.perception.noise_flip == doctest::Approx(0.02));
    CHECK(cfg.perception.hmm_stay_probability == doctest::Approx(0.8));
    CHECK(cfg.run.ticks == 5000);
    CHECK(cfg.run.seed == 42);
    CHECK(cfg.metrics.window == 500);
    CHECK(cfg.metrics.epsilon == doctest::Approx(0.05));
    CHECK(cfg.metrics.k == 4);
    CHECK(cfg.metrics.lag == 0);

    // The emission table matches the library default, with the noise synced.
    EmissionModel defaults = EmissionModel::defaults();
    defaults.noise_flip = cfg.perception.noise_flip;
    for (ConvState s : kAllStates) {
        CHECK(cfg.perception.emission.row(s) == defaults.row(s));
    }
    const StateEmission& speaking =
        cfg.perception.emission.row(ConvState::Speaking);
    CHECK(speaking.speaking == doctest::Approx(0.98));
    CHECK(speaking.gaze_at_addressee == doctest::Approx(0.95));
    const StateEmission& idle =
        cfg.perception.emission.row(ConvState::Unaddressed);
    CHECK(idle.speaking == doctest::Approx(0.025));
    CHECK(idle.backchannel == doctest::Approx(0.025));
}

TEST_CASE("config validation names the offending field") {
    expect_config_error(R"({"agents":[{"id":0}]})", "at least 2");
    expect_config_error(R"({"agents":[{"id":0},{"id":0}]})", "duplicate");
    expect_config_error(
        R"({"agents":[{"id":0,"talkativeness":1.5},{"id":1}]})",
        "talkativeness");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],"initial_attitudes":{"liking":1.5}})",
        "liking");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],
            "initial_attitudes":{"overrides":[
              {"from":0,"to":0,"liking":0,"dominance":0}]}})",
        "differ");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],
            "initial_attitudes":{"overrides":[
              {"from":0,"to":7,"liking":0,"dominance":0}]}})",
        "unknown agent id");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],"dynamics":{"delta_liking":0}})",
        "delta_liking");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],"dynamics":{"mean_utterance_ticks":0.5}})",
        "mean_utterance_ticks");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],"perception":{"noise_flip":-0.1}})",
        "noise_flip");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],"metrics":{"window":1}})",
        "window");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],"metrics":{"epsilon":0}})",
        "epsilon");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],"metrics":{"k":0}})", "metrics.k");
}

TEST_CASE("structural config problems are reported with a path") {
    expect_config_error("[1,2,3]", "config");
    expect_config_error("{\"agents\": 3}", "agents");
    expect_config_error("{}", "agents");
    expect_config_error(R"({"agents":[{"id":0},{"id":1}],"agnets":[]})",
                        "agnets");
    expect_config_error(R"({"agents":[{"talkativeness":0.1},{"id":1}]})",
                        "id");
    expect_config_error(
        R"({"agents":[{"id":0,"talkativeness":"high"},{"id":1}]})",
        "talkativeness");
    expect_config_error(
        R"({"agents":[{"id":0,"initial_state":"Musing"},{"id":1}]})",
        "Musing");
    expect_config_error(
        R"({"agents":[{"id":0},{"id":1}],
            "perception":{"emission":{"Shouting":{}}}})",
        "Shouting");
    expect_config_error("{not json", "invalid JSON");
}

TEST_CASE("emission overrides merge onto the defaults") {
    const SimConfig cfg = parse_config(R"({
        "agents":[{"id":0},{"id":1}],
        "perception":{
            "noise_flip": 0.0,
            "emission":{"Speaking":{"speaking":0.7}}
        }
    })");
    const StateEmission& row = cfg.perception.emission.row(ConvState::Speaking);
    CHECK(row.speaking == doctest::Approx(0.7));
    CHECK(row.gaze_at_addressee == doctest::Approx(0.95));  // untouched
    CHECK(cfg.perception.emission.noise_flip == doctest::Approx(0.0));
}

TEST_CASE("serialize/parse round-trips and equality is structural") {
    const SimConfig cfg = parse_config(R"({
        "agents":[{"id":0,"talkativeness":0.3,"initial_state":"Speaking"},
                  {"id":4,"talkativeness":0.1}],
        "initial_attitudes":{"liking":0.2,"overrides":[
            {"from":0,"to":4,"liking":-0.5,"dominance":0.25}]},
        "dynamics":{"delta_dominance":0.05,"mean_utterance_ticks":12},
        "perception":{"mode":"oracle","noise_flip":0.1},
        "run":{"ticks":77,"seed":9},
        "metrics":{"window":10,"epsilon":0.2,"k":3,"lag":-2}
    })");
    const std::string text = serialize_config(cfg);
    const SimConfig reparsed = parse_config(text);
    CHECK(reparsed == cfg);
    CHECK(serialize_config(reparsed) == text);

    SimConfig nudged = cfg;
    nudged.run.seed = 10;
    CHECK_FALSE(nudged == cfg);
}

TEST_CASE("traces round-trip through the JSONL format") {
    SimConfig cfg = parse_config(R"({
        "agents":[{"id":0,"talkativeness":0.3},{"id":1,"talkativeness":0.2}],
        "dynamics":{"mean_utterance_ticks":6},
        "run":{"ticks":200,"seed":31}
    })");
    const Trace trace = run(cfg);
    const std::string text = io::write_trace(trace);
    const Trace reread = io::read_trace(text);
    CHECK(reread == trace);
    CHECK(reread.config == trace.config);
    CHECK(io::write_trace(reread) == text);

    const fs::path path = temp_file("roundtrip.jsonl");
    io::write_trace_file(trace, path.string());
    CHECK(io::read_trace_file(path.string()) == trace);
    fs::remove(path);
}

TEST_CASE("a header-only file is a zero-record trace") {
    SimConfig cfg = parse_config(R"({"agents":[{"id":0},{"id":1}]})");
    Trace empty;
    empty.config = cfg;
    empty.agent_ids = cfg.agent_ids();
    const std::string text = io::write_trace(empty);
    CHECK(text.find('\n') == text.size() - 1);  // single line
    const Trace reread = io::read_trace(text);
    CHECK(reread.records.empty());
    CHECK(reread.agent_ids == empty.agent_ids);
}

TEST_CASE("malformed traces are rejected with a line number") {
    SimConfig cfg = parse_config(
        R"({"agents":[{"id":0},{"id":1}],"run":{"ticks":3}})");
    const std::string text = io::write_trace(run(cfg));

    SUBCASE("empty input") {
        CHECK_THROWS_AS(io::read_trace(""), UsageError);
    }
    SUBCASE("garbage header") {
        CHECK_THROWS_AS(io::read_trace("not json\n"), UsageError);
    }
    SUBCASE("wrong format marker") {
        CHECK_THROWS_AS(
            io::read_trace(R"({"format":"csv","version":1})" "\n"),
            UsageError);
    }
    SUBCASE("truncated record line") {
        std::istringstream in(text);
        std::string line;
        std::string broken;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line_no == 3) line = line.substr(0, line.size() / 2);
            broken += line + "\n";
        }
        try {
            io::read_trace(broken);
            FAIL_CHECK("expected UsageError");
        } catch (const UsageError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("non-contiguous ticks") {
        std::istringstream in(text);
        std::string line;
        std::string skipped;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line_no == 3) continue;  // drop the tick-1 record
            skipped += line + "\n";
        }
        CHECK_THROWS_AS(io::read_trace(skipped), UsageError);
    }
}

TEST_CASE("fnv1a digests match the reference vectors") {
    CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(io::fnv1a_hex("hello") == io::fnv1a_hex("hello"));
    CHECK(io::fnv1a_hex("hello") != io::fnv1a_hex("hellp"));
    CHECK(io::fnv1a_hex("x").size() == 16);
}
