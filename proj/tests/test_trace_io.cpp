#include <doctest.h>

#include <clocale>
#include <fstream>
#include <random>
#include <sstream>

#include "procwatt/error.hpp"
#include "procwatt/simulator.hpp"
#include "procwatt/trace_io.hpp"

using namespace procwatt;

namespace {

struct Failure {
  ErrorCode code;
  std::optional<std::size_t> line;
  std::optional<std::size_t> column;
};

Failure read_failure(const std::string& text) {
  std::istringstream in(text);
  try {
    read_trace(in);
  } catch (const Error& e) {
    return {e.code(), e.line(), e.column()};
  }
  FAIL("expected a read error");
  return {ErrorCode::io, {}, {}};
}

TraceFile read_text(const std::string& text, const ColumnMap& cols = {}) {
  std::istringstream in(text);
  return read_trace(in, cols);
}

std::string write_text(const TraceFile& t) {
  std::ostringstream out;
  write_trace(t, out);
  return out.str();
}

}  // namespace

TEST_CASE("read_trace examples") {
  const auto t = read_text("timestamp_s,competition_pct,power_w\n0.0,5,9.2\n");
  REQUIRE(t.samples.size() == 1);
  CHECK(t.samples[0] == TraceSample{0.0, 5.0, 9.2});

  const auto f = read_failure("timestamp_s,competition_pct,power_w\n0.0,abc,9.2\n");
  CHECK(f.code == ErrorCode::parse);
  CHECK(f.line == 2);
  CHECK(f.column == 2);

  CHECK(read_text("timestamp_s,competition_pct,power_w\n").samples.empty());
}

TEST_CASE("read_trace tolerates blank lines, CRLF and metadata") {
  const auto t = read_text(
      "# machine: node-a\r\n# cores: 8\r\ntimestamp_s,competition_pct,power_w\r\n\r\n0,0,9.75\r\n5,0,9.8\r\n\n");
  CHECK(t.machine_label == "node-a");
  CHECK(t.core_count == 8);
  CHECK(t.samples.size() == 2);
}

TEST_CASE("read_trace errors carry line numbers") {
  const std::string hdr = "timestamp_s,competition_pct,power_w\n";
  auto f = read_failure("");
  CHECK(f.code == ErrorCode::format);

  f = read_failure("time,cpu,watts\n0,1,2\n");
  CHECK(f.code == ErrorCode::format);
  CHECK(f.line == 1);

  f = read_failure(hdr + "0,1,2\n5,1\n");
  CHECK(f.code == ErrorCode::format);
  CHECK(f.line == 3);

  f = read_failure(hdr + "0,1,2\n5,101,2\n");
  CHECK(f.code == ErrorCode::validation);
  CHECK(f.line == 3);

  f = read_failure(hdr + "0,1,-2\n");
  CHECK(f.code == ErrorCode::validation);
  CHECK(f.line == 2);

  f = read_failure(hdr + "10,1,2\n\n5,1,2\n");
  CHECK(f.code == ErrorCode::validation);
  CHECK(f.line == 4);

  f = read_failure(hdr + "0,1,2\n5,1,nan\n");
  CHECK(f.code == ErrorCode::parse);
  CHECK(f.line == 3);
  CHECK(f.column == 3);

  f = read_failure(hdr + "0,1,2\n5,1,2.0x\n");
  CHECK(f.code == ErrorCode::parse);
  CHECK(f.column == 3);

  // Thousands separators and decimal commas are not numbers.
  f = read_failure(hdr + "1,000,5,2\n");
  CHECK(f.code == ErrorCode::format);
  f = read_failure(hdr + "\"1,5\",5,2\n");
  CHECK(f.line == 2);
}

TEST_CASE("write_trace shapes") {
  TraceFile t;
  CHECK(write_text(t) == "timestamp_s,competition_pct,power_w\n");
  t.samples.push_back({0.0, 5.0, 9.2});
  CHECK(write_text(t) == "timestamp_s,competition_pct,power_w\n0,5,9.2\n");
}

TEST_CASE("round trip of a 792-sample simulated trace") {
  ProtocolConfig cfg;
  cfg.baseline_load_q = 50;
  cfg.cycles = 1;
  cfg.noise_sigma = 0.3;
  cfg.seed = 77;
  auto t = generate_trace(cfg, PowerProfile::nroot(7, 1.5, 3));
  t.core_count = 4;
  REQUIRE(t.samples.size() == 792);
  CHECK(read_text(write_text(t)) == t);
}

TEST_CASE("round trip of random awkward doubles") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> comp(0, 100), pw(0, 1e3);
  std::uniform_real_distribution<double> dt(1e-9, 1e6);
  TraceFile t;
  t.machine_label = "rand";
  double ts = 0.0;
  for (int i = 0; i < 5000; ++i) {
    t.samples.push_back({ts, comp(rng), pw(rng) * (i % 7 == 0 ? 1e-300 : 1.0)});
    ts += dt(rng);
  }
  t.samples.push_back({ts, 100.0, 0.0});
  CHECK(read_text(write_text(t)) == t);
}

TEST_CASE("column remapping") {
  const ColumnMap cols = parse_column_map("ts,cpu,watts");
  const auto t = read_text("watts,extra,cpu,ts\n9.2,x,5,0\n9.4,y,10,5\n", cols);
  REQUIRE(t.samples.size() == 2);
  CHECK(t.samples[1] == TraceSample{5.0, 10.0, 9.4});
  CHECK_THROWS_AS(parse_column_map("a,b"), Error);
}

TEST_CASE("parsing ignores the process locale") {
  const char* chosen = nullptr;
  for (const char* name : {"de_DE.UTF-8", "de_DE.utf8", "fr_FR.UTF-8", "C.UTF-8"}) {
    if (std::setlocale(LC_ALL, name)) {
      chosen = name;
      break;
    }
  }
  const auto t = read_text("timestamp_s,competition_pct,power_w\n0.5,12.25,9.125\n");
  CHECK(t.samples[0] == TraceSample{0.5, 12.25, 9.125});
  CHECK(write_text(t) == "timestamp_s,competition_pct,power_w\n0.5,12.25,9.125\n");
  std::setlocale(LC_ALL, "C");
  INFO("locale used: " << (chosen ? chosen : "C"));
}

TEST_CASE("read_trace_file on a missing path") {
  try {
    read_trace_file("/nonexistent/definitely/missing.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::input);
  }
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(5.0) == "5");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::stod(format_double(2.0 / 3.0)) == 2.0 / 3.0);
}
