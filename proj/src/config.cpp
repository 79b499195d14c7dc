#include "turnsim/config.hpp"

#include <algorithm>
#include <set>
#include <string>

#include <json.hpp>

#include "turnsim/errors.hpp"

namespace turnsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return key == a;
            }) == allowed.end()) {
            fail(path + "." + key, "unknown key");
        }
    }
}

double get_number(const json& obj, const std::string& path, const char* key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::uint64_t get_uint(const json& obj, const std::string& path,
                       const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
        fail(path + "." + key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

long get_int(const json& obj, const std::string& path, const char* key,
             long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<long>();
}

std::string get_string(const json& obj, const std::string& path,
                       const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

void parse_emission_row(const json& obj, const std::string& path,
                        StateEmission& row) {
    expect_object(obj, path);
    check_keys(obj, path,
               {"speaking", "gaze_at_addressee", "attention", "backchannel"});
    row.speaking = get_number(obj, path, "speaking", row.speaking);
    row.gaze_at_addressee =
        get_number(obj, path, "gaze_at_addressee", row.gaze_at_addressee);
    row.attention = get_number(obj, path, "attention", row.attention);
    row.backchannel = get_number(obj, path, "backchannel", row.backchannel);
}

SimConfig config_from_json(const json& root) {
    expect_object(root, "config");
    check_keys(root, "config",
               {"agents", "initial_attitudes", "dynamics", "perception", "run",
                "metrics"});

    SimConfig cfg;

    if (!root.contains("agents")) fail("agents", "required");
    const json& agents = root.at("agents");
    if (!agents.is_array()) fail("agents", "expected an array");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        const json& a = agents.at(i);
        expect_object(a, path);
        check_keys(a, path, {"id", "talkativeness", "initial_state"});
        if (!a.contains("id")) fail(path + ".id", "required");
        AgentConfig agent;
        agent.id = static_cast<AgentId>(get_uint(a, path, "id", 0));
        agent.talkativeness = get_number(a, path, "talkativeness", 0.05);
        const std::string state_name =
            get_string(a, path, "initial_state", "Unaddressed");
        const auto state = state_from_string(state_name);
        if (!state) fail(path + ".initial_state", "unknown state '" + state_name + "'");
        agent.initial_state = *state;
        cfg.agents.push_back(agent);
    }

    if (root.contains("initial_attitudes")) {
        const json& ia = root.at("initial_attitudes");
        const std::string path = "initial_attitudes";
        expect_object(ia, path);
        check_keys(ia, path, {"liking", "dominance", "overrides"});
        cfg.initial_attitudes.default_value.liking =
            get_number(ia, path, "liking", 0.0);
        cfg.initial_attitudes.default_value.dominance =
            get_number(ia, path, "dominance", 0.0);
        if (ia.contains("overrides")) {
            const json& ov = ia.at("overrides");
            if (!ov.is_array()) fail(path + ".overrides", "expected an array");
            for (std::size_t i = 0; i < ov.size(); ++i) {
                const std::string opath =
                    path + ".overrides[" + std::to_string(i) + "]";
                const json& o = ov.at(i);
                expect_object(o, opath);
                check_keys(o, opath, {"from", "to", "liking", "dominance"});
                if (!o.contains("from")) fail(opath + ".from", "required");
                if (!o.contains("to")) fail(opath + ".to", "required");
                if (!o.contains("liking")) fail(opath + ".liking", "required");
                if (!o.contains("dominance")) fail(opath + ".dominance", "required");
                AttitudeOverride entry;
                entry.from = static_cast<AgentId>(get_uint(o, opath, "from", 0));
                entry.to = static_cast<AgentId>(get_uint(o, opath, "to", 0));
                entry.value.liking = get_number(o, opath, "liking", 0.0);
                entry.value.dominance = get_number(o, opath, "dominance", 0.0);
                cfg.initial_attitudes.overrides.push_back(entry);
            }
        }
    }

    if (root.contains("dynamics")) {
        const json& d = root.at("dynamics");
        const std::string path = "dynamics";
        expect_object(d, path);
        check_keys(d, path,
                   {"delta_dominance", "delta_liking", "yield_threshold",
                    "mean_utterance_ticks"});
        cfg.dynamics.delta_dominance =
            get_number(d, path, "delta_dominance", 0.1);
        cfg.dynamics.delta_liking = get_number(d, path, "delta_liking", 0.1);
        cfg.dynamics.yield_threshold =
            get_number(d, path, "yield_threshold", 0.0);
        cfg.dynamics.mean_utterance_ticks =
            get_number(d, path, "mean_utterance_ticks", 20.0);
    }

    if (root.contains("perception")) {
        const json& p = root.at("perception");
        const std::string path = "perception";
        expect_object(p, path);
        check_keys(p, path,
                   {"mode", "noise_flip", "hmm_stay_probability", "emission"});
        const std::string mode = get_string(p, path, "mode", "inferred");
        if (mode == "inferred") {
            cfg.perception.mode = PerceptionMode::Inferred;
        } else if (mode == "oracle") {
            cfg.perception.mode = PerceptionMode::Oracle;
        } else {
            fail(path + ".mode", "expected 'inferred' or 'oracle'");
        }
        cfg.perception.noise_flip = get_number(p, path, "noise_flip", 0.02);
        cfg.perception.hmm_stay_probability =
            get_number(p, path, "hmm_stay_probability", 0.8);
        if (p.contains("emission")) {
            const json& em = p.at("emission");
            const std::string epath = path + ".emission";
            expect_object(em, epath);
            for (const auto& [key, value] : em.items()) {
                const auto state = state_from_string(key);
                if (!state) fail(epath + "." + key, "unknown state");
                parse_emission_row(value, epath + "." + key,
                                   cfg.perception.emission.row(*state));
            }
        }
    }
    cfg.perception.emission.noise_flip = cfg.perception.noise_flip;

    if (root.contains("run")) {
        const json& r = root.at("run");
        expect_object(r, "run");
        check_keys(r, "run", {"ticks", "seed"});
        cfg.run.ticks = get_uint(r, "run", "ticks", 5000);
        cfg.run.seed = get_uint(r, "run", "seed", 42);
    }

    if (root.contains("metrics")) {
        const json& m = root.at("metrics");
        expect_object(m, "metrics");
        check_keys(m, "metrics", {"window", "epsilon", "k", "lag"});
        cfg.metrics.window = get_uint(m, "metrics", "window", 500);
        cfg.metrics.epsilon = get_number(m, "metrics", "epsilon", 0.05);
        cfg.metrics.k = static_cast<int>(get_int(m, "metrics", "k", 4));
        cfg.metrics.lag = get_int(m, "metrics", "lag", 0);
    }

    std::sort(cfg.agents.begin(), cfg.agents.end(),
              [](const AgentConfig& a, const AgentConfig& b) {
                  return a.id < b.id;
              });
    cfg.validate();
    return cfg;
}

json emission_to_json(const EmissionModel& m) {
    json out = json::object();
    for (ConvState s : kAllStates) {
        const StateEmission& e = m.row(s);
        out[std::string(to_string(s))] = {
            {"speaking", e.speaking},
            {"gaze_at_addressee", e.gaze_at_addressee},
            {"attention", e.attention},
            {"backchannel", e.backchannel},
        };
    }
    return out;
}

json config_to_json(const SimConfig& cfg) {
    json agents = json::array();
    for (const AgentConfig& a : cfg.agents) {
        agents.push_back({
            {"id", a.id},
            {"talkativeness", a.talkativeness},
            {"initial_state", std::string(to_string(a.initial_state))},
        });
    }
    json overrides = json::array();
    for (const AttitudeOverride& o : cfg.initial_attitudes.overrides) {
        overrides.push_back({
            {"from", o.from},
            {"to", o.to},
            {"liking", o.value.liking},
            {"dominance", o.value.dominance},
        });
    }
    return json{
        {"agents", agents},
        {"initial_attitudes",
         {{"liking", cfg.initial_attitudes.default_value.liking},
          {"dominance", cfg.initial_attitudes.default_value.dominance},
          {"overrides", overrides}}},
        {"dynamics",
         {{"delta_dominance", cfg.dynamics.delta_dominance},
          {"delta_liking", cfg.dynamics.delta_liking},
          {"yield_threshold", cfg.dynamics.yield_threshold},
          {"mean_utterance_ticks", cfg.dynamics.mean_utterance_ticks}}},
        {"perception",
         {{"mode", cfg.perception.mode == PerceptionMode::Oracle ? "oracle"
                                                                 : "inferred"},
          {"noise_flip", cfg.perception.noise_flip},
          {"hmm_stay_probability", cfg.perception.hmm_stay_probability},
          {"emission", emission_to_json(cfg.perception.emission)}}},
        {"run", {{"ticks", cfg.run.ticks}, {"seed", cfg.run.seed}}},
        {"metrics",
         {{"window", cfg.metrics.window},
          {"epsilon", cfg.metrics.epsilon},
          {"k", cfg.metrics.k},
          {"lag", cfg.metrics.lag}}},
    };
}

}  // namespace

void SimConfig::validate() const {
    if (agents.size() < 2) fail("agents", "at least 2 required");
    std::set<AgentId> ids;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        if (!ids.insert(agents[i].id).second) {
            fail(path + ".id", "duplicate agent id " + std::to_string(agents[i].id));
        }
        if (!(agents[i].talkativeness >= 0.0 && agents[i].talkativeness <= 1.0)) {
            fail(path + ".talkativeness", "must be in [0, 1]");
        }
    }
    const Attitude& d = initial_attitudes.default_value;
    if (!(d.liking >= -1.0 && d.liking <= 1.0)) {
        fail("initial_attitudes.liking", "must be in [-1, 1]");
    }
    if (!(d.dominance >= -1.0 && d.dominance <= 1.0)) {
        fail("initial_attitudes.dominance", "must be in [-1, 1]");
    }
    for (std::size_t i = 0; i < initial_attitudes.overrides.size(); ++i) {
        const AttitudeOverride& o = initial_attitudes.overrides[i];
        const std::string path =
            "initial_attitudes.overrides[" + std::to_string(i) + "]";
        if (!ids.contains(o.from)) fail(path + ".from", "unknown agent id");
        if (!ids.contains(o.to)) fail(path + ".to", "unknown agent id");
        if (o.from == o.to) fail(path, "from and to must differ");
        if (!(o.value.liking >= -1.0 && o.value.liking <= 1.0)) {
            fail(path + ".liking", "must be in [-1, 1]");
        }
        if (!(o.value.dominance >= -1.0 && o.value.dominance <= 1.0)) {
            fail(path + ".dominance", "must be in [-1, 1]");
        }
    }
    if (!(dynamics.delta_dominance > 0.0)) {
        fail("dynamics.delta_dominance", "must be > 0");
    }
    if (!(dynamics.delta_liking > 0.0)) {
        fail("dynamics.delta_liking", "must be > 0");
    }
    if (!(dynamics.mean_utterance_ticks >= 1.0)) {
        fail("dynamics.mean_utterance_ticks", "must be >= 1");
    }
    if (!(perception.noise_flip >= 0.0 && perception.noise_flip <= 1.0)) {
        fail("perception.noise_flip", "must be in [0, 1]");
    }
    if (!(perception.hmm_stay_probability >= 0.0 &&
          perception.hmm_stay_probability <= 1.0)) {
        fail("perception.hmm_stay_probability", "must be in [0, 1]");
    }
    try {
        perception.emission.validate();
    } catch (const ConfigError& e) {
        fail("perception.emission", e.what());
    }
    if (metrics.window < 2) fail("metrics.window", "must be >= 2");
    if (!(metrics.epsilon > 0.0)) fail("metrics.epsilon", "must be > 0");
    if (metrics.k < 1) fail("metrics.k", "must be >= 1");
}

std::vector<AgentId> SimConfig::agent_ids() const {
    std::vector<AgentId> ids;
    ids.reserve(agents.size());
    for (const AgentConfig& a : agents) ids.push_back(a.id);
    return ids;
}

SimConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return config_from_json(root);
}

std::string serialize_config(const SimConfig& config) {
    return config_to_json(config).dump(2);
}

bool operator==(const SimConfig& a, const SimConfig& b) {
    return config_to_json(a) == config_to_json(b);
}

}  // namespace turnsim
