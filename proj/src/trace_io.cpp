#include "procwatt/trace_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "procwatt/error.hpp"

namespace procwatt {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc{} && res.ptr == field.data() + field.size() && std::isfinite(out);
}

// `# key: value` metadata before the header.
void read_metadata(std::string_view body, TraceFile& trace, std::size_t line_no) {
  const auto colon = body.find(':');
  if (colon == std::string_view::npos) return;
  const auto key = trim(body.substr(0, colon));
  const auto value = trim(body.substr(colon + 1));
  if (key == "machine") {
    trace.machine_label = std::string(value);
  } else if (key == "cores") {
    int cores = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), cores);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || cores < 1) {
      throw Error(ErrorCode::parse, "cores must be a positive integer", line_no, 1);
    }
    trace.core_count = cores;
  }
}

}  // namespace

ColumnMap parse_column_map(const std::string& names) {
  const auto fields = split(names);
  if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
    throw Error(ErrorCode::input, "--columns needs three names: timestamp,competition,power");
  }
  return ColumnMap{std::string(fields[0]), std::string(fields[1]), std::string(fields[2])};
}

TraceFile read_trace(std::istream& in, const ColumnMap& columns) {
  TraceFile trace;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::array<std::size_t, 3>> index;  // column of t, competition, power
  std::size_t field_count = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (!index) {
      if (text.front() == '#') {
        read_metadata(text.substr(1), trace, line_no);
        continue;
      }
      const auto header = split(text);
      std::array<std::size_t, 3> idx{};
      const std::array<const std::string*, 3> wanted{&columns.timestamp, &columns.competition, &columns.power};
      for (std::size_t k = 0; k < 3; ++k) {
        std::size_t found = header.size();
        for (std::size_t c = 0; c < header.size(); ++c) {
          if (header[c] == *wanted[k]) found = c;
        }
        if (found == header.size()) {
          throw Error(ErrorCode::format, "header lacks column '" + *wanted[k] + "'", line_no);
        }
        idx[k] = found;
      }
      index = idx;
      field_count = header.size();
      continue;
    }

    const auto fields = split(text);
    if (fields.size() != field_count) {
      throw Error(ErrorCode::format,
                  "expected " + std::to_string(field_count) + " fields, got " + std::to_string(fields.size()),
                  line_no);
    }
    std::array<double, 3> v{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (!parse_number(fields[(*index)[k]], v[k])) {
        throw Error(ErrorCode::parse, "'" + std::string(fields[(*index)[k]]) + "' is not a finite number",
                    line_no, (*index)[k] + 1);
      }
    }
    const TraceSample s{v[0], v[1], v[2]};
    if (!(s.competition >= 0.0 && s.competition <= 100.0)) {
      throw Error(ErrorCode::validation, "competition outside [0, 100]", line_no, (*index)[1] + 1);
    }
    if (s.power < 0.0) {
      throw Error(ErrorCode::validation, "negative power", line_no, (*index)[2] + 1);
    }
    if (!trace.samples.empty() && s.t < trace.samples.back().t) {
      throw Error(ErrorCode::validation, "timestamp decreases", line_no, (*index)[0] + 1);
    }
    trace.samples.push_back(s);
  }
  if (in.bad()) throw Error(ErrorCode::io, "read failure");
  if (!index) throw Error(ErrorCode::format, "missing header line", line_no + 1);
  return trace;
}

TraceFile read_trace_file(const std::string& path, const ColumnMap& columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::input, "cannot open '" + path + "'");
  return read_trace(in, columns);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_trace(const TraceFile& trace, std::ostream& out) {
  if (!trace.machine_label.empty()) out << "# machine: " << trace.machine_label << '\n';
  if (trace.core_count) out << "# cores: " << *trace.core_count << '\n';
  out << "timestamp_s,competition_pct,power_w\n";
  for (const auto& s : trace.samples) {
    out << format_double(s.t) << ',' << format_double(s.competition) << ',' << format_double(s.power) << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write failure");
}

}  // namespace procwatt
