#pragma once

// CSV traces: `timestamp_s,competition_pct,power_w`, one sample per line.
//
// Optional `# machine: <label>` and `# cores: <n>` lines may precede the
// header. Blank lines are ignored. Numbers are parsed and written with
// std::from_chars / std::to_chars, so the format is locale-independent and
// written values round-trip exactly.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "procwatt/fitting.hpp"

namespace procwatt {

struct TraceFile {
  std::string machine_label;
  std::optional<int> core_count;
  std::vector<TraceSample> samples;

  friend bool operator==(const TraceFile&, const TraceFile&) = default;
};

/// Names of the timestamp, competition and power columns.
struct ColumnMap {
  std::string timestamp = "timestamp_s";
  std::string competition = "competition_pct";
  std::string power = "power_w";
};

/// Parses "ts,cpu,watts" (three names, in timestamp/competition/power order).
ColumnMap parse_column_map(const std::string& names);

/// Reads a trace. Columns are located by name, so external files with extra
/// or reordered columns load through a ColumnMap. Errors carry the 1-based
/// line (and field, for parse errors): format for a bad header or field
/// count, parse for non-numeric fields, validation for out-of-range values
/// or decreasing timestamps.
TraceFile read_trace(std::istream& in, const ColumnMap& columns = {});
TraceFile read_trace_file(const std::string& path, const ColumnMap& columns = {});

/// Writes the canonical header and shortest round-trip numbers.
void write_trace(const TraceFile& trace, std::ostream& out);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace procwatt
