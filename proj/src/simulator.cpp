#include "procwatt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "procwatt/error.hpp"

namespace procwatt {

namespace {

// Absorbs rounding in level and dwell/interval arithmetic.
constexpr double kSlack = 1e-9;

}  // namespace

void validate(const ProtocolConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::config, msg); };
  if (!(c.step_pct > 0.0) || !std::isfinite(c.step_pct)) fail("step_pct must be > 0");
  if (!(c.sample_interval_seconds > 0.0) || !std::isfinite(c.sample_interval_seconds)) {
    fail("sample_interval_seconds must be > 0");
  }
  if (!(c.dwell_seconds >= c.sample_interval_seconds) || !std::isfinite(c.dwell_seconds)) {
    fail("dwell_seconds must be >= sample_interval_seconds");
  }
  if (c.cycles < 1) fail("cycles must be >= 1");
  if (!(c.baseline_load_q > 0.0 && c.baseline_load_q < 100.0)) fail("baseline_load_q must be in (0, 100)");
  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) fail("noise_sigma must be >= 0");
  if (!(c.start_pct >= 0.0) || c.start_pct > 100.0 - c.baseline_load_q + kSlack) {
    fail("start_pct must lie in [0, 100 - q]");
  }
}

std::vector<double> protocol_levels(const ProtocolConfig& c) {
  validate(c);
  const double ceiling = 100.0 - c.baseline_load_q;
  std::vector<double> levels;
  for (std::size_t k = 0;; ++k) {
    const double level = c.start_pct + static_cast<double>(k) * c.step_pct;
    if (level > ceiling + kSlack) break;
    levels.push_back(std::min(level, ceiling));
  }
  return levels;
}

std::size_t samples_per_level(const ProtocolConfig& c) {
  validate(c);
  return static_cast<std::size_t>(std::floor(c.dwell_seconds / c.sample_interval_seconds + kSlack));
}

TraceFile generate_trace(const ProtocolConfig& config, const PowerProfile& truth, kernels::Backend backend) {
  kernels::SynthesisPlan plan;
  plan.levels = protocol_levels(config);
  for (double level : plan.levels) plan.level_power.push_back(evaluate(truth, level));
  plan.samples_per_level = samples_per_level(config);
  plan.cycles = config.cycles;
  plan.sample_interval = config.sample_interval_seconds;
  plan.noise_sigma = config.noise_sigma;
  plan.seed = config.seed;

  TraceFile trace;
  trace.machine_label = "simulated";
  trace.samples.resize(plan.sample_count());
  kernels::synthesize(plan, trace.samples, backend);
  return trace;
}

ProtocolConfig protocol_config_from_json(const nlohmann::json& j, ProtocolConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::config, "protocol config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto number = [&]() {
      if (!value.is_number()) throw Error(ErrorCode::config, "'" + key + "' must be a number");
      return value.get<double>();
    };
    auto count = [&]() {
      if (!value.is_number_unsigned()) {
        throw Error(ErrorCode::config, "'" + key + "' must be a non-negative integer");
      }
      return value.get<std::uint64_t>();
    };
    if (key == "start_pct") c.start_pct = number();
    else if (key == "step_pct") c.step_pct = number();
    else if (key == "dwell_seconds") c.dwell_seconds = number();
    else if (key == "sample_interval_seconds") c.sample_interval_seconds = number();
    else if (key == "cycles") c.cycles = static_cast<std::size_t>(count());
    else if (key == "baseline_load_q") c.baseline_load_q = number();
    else if (key == "noise_sigma") c.noise_sigma = number();
    else if (key == "seed") c.seed = count();
    else throw Error(ErrorCode::config, "unknown protocol key '" + key + "'");
  }
  return c;
}

void to_json(nlohmann::json& j, const ProtocolConfig& c) {
  j = nlohmann::json{{"start_pct", c.start_pct},
                     {"step_pct", c.step_pct},
                     {"dwell_seconds", c.dwell_seconds},
                     {"sample_interval_seconds", c.sample_interval_seconds},
                     {"cycles", c.cycles},
                     {"baseline_load_q", c.baseline_load_q},
                     {"noise_sigma", c.noise_sigma},
                     {"seed", c.seed}};
}

}  // namespace procwatt
