#include "turnsim/trace_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "turnsim/errors.hpp"

namespace turnsim::io {

namespace {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

[[noreturn]] void line_error(std::size_t line_no, const std::string& message) {
    throw UsageError("trace line " + std::to_string(line_no) + ": " + message);
}

ojson cue_to_json(const CueVector& cue) {
    ojson out;
    out["speaking"] = cue.speaking;
    if (cue.gaze_target) {
        out["gaze"] = *cue.gaze_target;
    } else {
        out["gaze"] = nullptr;
    }
    out["attention"] = cue.attention_display;
    out["backchannel"] = cue.backchannel;
    return out;
}

CueVector cue_from_json(const json& j, std::size_t line_no) {
    if (!j.is_object()) line_error(line_no, "cue must be an object");
    CueVector cue;
    try {
        cue.speaking = j.at("speaking").get<bool>();
        if (!j.at("gaze").is_null()) {
            cue.gaze_target = j.at("gaze").get<AgentId>();
        }
        cue.attention_display = j.at("attention").get<bool>();
        cue.backchannel = j.at("backchannel").get<bool>();
    } catch (const json::exception& e) {
        line_error(line_no, std::string("bad cue: ") + e.what());
    }
    return cue;
}

ojson attitudes_to_json(const AttitudeMatrix& m) {
    const auto& ids = m.agent_ids();
    ojson rows = ojson::array();
    for (AgentId from : ids) {
        ojson row = ojson::array();
        for (AgentId to : ids) {
            if (from == to) {
                row.push_back(nullptr);
            } else {
                const Attitude& a = m.at(from, to);
                row.push_back(ojson::array({a.liking, a.dominance}));
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

AttitudeMatrix attitudes_from_json(const json& j,
                                   const std::vector<AgentId>& ids,
                                   std::size_t line_no) {
    if (!j.is_array() || j.size() != ids.size()) {
        line_error(line_no, "attitudes must be one row per agent");
    }
    AttitudeMatrix m(ids, Attitude{});
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const json& row = j.at(i);
        if (!row.is_array() || row.size() != ids.size()) {
            line_error(line_no, "attitude row has the wrong width");
        }
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const json& cell = row.at(k);
            if (i == k) {
                if (!cell.is_null()) line_error(line_no, "diagonal must be null");
                continue;
            }
            if (!cell.is_array() || cell.size() != 2) {
                line_error(line_no, "attitude cell must be [liking, dominance]");
            }
            m.set(ids[i], ids[k],
                  Attitude{cell.at(0).get<double>(), cell.at(1).get<double>()});
        }
    }
    return m;
}

ojson record_to_json(const TickRecord& rec) {
    ojson out;
    out["tick"] = rec.tick;
    ojson states = ojson::array();
    for (ConvState s : rec.states) states.push_back(std::string(to_string(s)));
    out["states"] = std::move(states);
    ojson cues = ojson::array();
    for (const CueVector& c : rec.cues) cues.push_back(cue_to_json(c));
    out["cues"] = std::move(cues);
    out["attitudes"] = attitudes_to_json(rec.attitudes);
    ojson events = ojson::array();
    for (const Event& e : rec.events) {
        ojson ev;
        ev["kind"] = std::string(to_string(e.kind));
        ev["a"] = e.a;
        ev["b"] = e.b;
        events.push_back(std::move(ev));
    }
    out["events"] = std::move(events);
    return out;
}

TickRecord record_from_json(const json& j, const std::vector<AgentId>& ids,
                            std::size_t line_no) {
    if (!j.is_object()) line_error(line_no, "record must be an object");
    TickRecord rec;
    try {
        rec.tick = j.at("tick").get<std::uint64_t>();

        const json& states = j.at("states");
        if (!states.is_array() || states.size() != ids.size()) {
            line_error(line_no, "states must list one state per agent");
        }
        for (const json& s : states) {
            const auto state = state_from_string(s.get<std::string>());
            if (!state) {
                line_error(line_no,
                           "unknown state '" + s.get<std::string>() + "'");
            }
            rec.states.push_back(*state);
        }

        const json& cues = j.at("cues");
        if (!cues.is_array() || cues.size() != ids.size()) {
            line_error(line_no, "cues must list one cue vector per agent");
        }
        for (const json& c : cues) rec.cues.push_back(cue_from_json(c, line_no));

        rec.attitudes = attitudes_from_json(j.at("attitudes"), ids, line_no);

        const json& events = j.at("events");
        if (!events.is_array()) line_error(line_no, "events must be an array");
        for (const json& ev : events) {
            const std::string kind_name = ev.at("kind").get<std::string>();
            const auto kind = event_kind_from_string(kind_name);
            if (!kind) {
                line_error(line_no, "unknown event kind '" + kind_name + "'");
            }
            Event event;
            event.tick = rec.tick;
            event.kind = *kind;
            event.a = ev.at("a").get<AgentId>();
            event.b = ev.at("b").get<AgentId>();
            rec.events.push_back(event);
        }
    } catch (const json::exception& e) {
        line_error(line_no, std::string("bad record: ") + e.what());
    }
    return rec;
}

}  // namespace

void write_trace(const Trace& trace, std::ostream& out) {
    ojson header;
    header["format"] = "turnsim-trace";
    header["version"] = 1;
    header["agent_ids"] = trace.agent_ids;
    header["config"] = ojson::parse(serialize_config(trace.config));
    out << header.dump() << '\n';
    for (const TickRecord& rec : trace.records) {
        out << record_to_json(rec).dump() << '\n';
    }
}

std::string write_trace(const Trace& trace) {
    std::ostringstream out;
    write_trace(trace, out);
    return out.str();
}

void write_trace_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open '" + path + "' for writing");
    write_trace(trace, out);
    out.flush();
    if (!out) throw UsageError("failed while writing '" + path + "'");
}

Trace read_trace(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    Trace trace;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!saw_header) {
            if (!j.is_object() || j.value("format", "") != "turnsim-trace") {
                line_error(line_no, "missing trace header");
            }
            if (j.value("version", 0) != 1) {
                line_error(line_no, "unsupported trace version");
            }
            try {
                trace.config = parse_config(j.at("config").dump());
                trace.agent_ids = j.at("agent_ids").get<std::vector<AgentId>>();
            } catch (const json::exception& e) {
                line_error(line_no, std::string("bad header: ") + e.what());
            } catch (const ConfigError& e) {
                line_error(line_no, std::string("bad config: ") + e.what());
            }
            saw_header = true;
            continue;
        }
        TickRecord rec = record_from_json(j, trace.agent_ids, line_no);
        if (rec.tick != trace.records.size()) {
            line_error(line_no, "ticks must be contiguous from 0");
        }
        trace.records.push_back(std::move(rec));
    }
    if (!saw_header) throw UsageError("trace: empty input");
    return trace;
}

Trace read_trace(const std::string& text) {
    std::istringstream in(text);
    return read_trace(in);
}

Trace read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    return read_trace(in);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << std::nouppercase;
    for (int shift = 60; shift >= 0; shift -= 4) {
        out << "0123456789abcdef"[(hash >> shift) & 0xF];
    }
    return out.str();
}

}  // namespace turnsim::io
