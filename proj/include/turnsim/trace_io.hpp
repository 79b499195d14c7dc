#pragma once

#include <iosfwd>
#include <string>

#include "turnsim/engine.hpp"

namespace turnsim::io {

/// Write a trace as JSON Lines: a header line carrying the resolved config
/// and seed, then one record per tick with the fixed fields
/// tick, states, cues, attitudes, events.
void write_trace(const Trace& trace, std::ostream& out);
void write_trace_file(const Trace& trace, const std::string& path);
std::string write_trace(const Trace& trace);

/// Read a trace back; read(write(t)) == t field for field. A malformed or
/// truncated line raises UsageError naming the line number.
Trace read_trace(std::istream& in);
Trace read_trace_file(const std::string& path);
Trace read_trace(const std::string& text);

/// 64-bit FNV-1a digest, hex-encoded; used to fingerprint configs and
/// trace files in reports.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace turnsim::io
