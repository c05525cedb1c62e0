#pragma once

// Synthetic traces for the gradual-increase protocol: competition starts at
// start_pct and rises by step_pct, each level held for dwell_seconds while
// sampling every sample_interval_seconds, up to the highest level that
// leaves room for the observed process's own load q. The ramp is repeated
// for the configured number of cycles with continuous timestamps.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "procwatt/kernels.hpp"
#include "procwatt/power_model.hpp"
#include "procwatt/trace_io.hpp"

namespace procwatt {

struct ProtocolConfig {
  double start_pct = 0.0;
  double step_pct = 5.0;
  double dwell_seconds = 360.0;
  double sample_interval_seconds = 5.0;
  std::size_t cycles = 8;
  double baseline_load_q = 5.0;
  double noise_sigma = 0.0;  // W, additive Gaussian per sample
  std::uint64_t seed = 1;
};

/// Throws Error(config) on invalid settings.
void validate(const ProtocolConfig& config);

/// Competition levels of one cycle: start + k·step for every k with
/// start + k·step <= 100 - q.
std::vector<double> protocol_levels(const ProtocolConfig& config);

/// floor(dwell / interval).
std::size_t samples_per_level(const ProtocolConfig& config);

/// Sample power is evaluate(truth, level) plus N(0, sigma²) noise, clamped
/// at zero. Deterministic in the seed; the noise for sample i depends only
/// on (seed, i).
TraceFile generate_trace(const ProtocolConfig& config, const PowerProfile& truth,
                         kernels::Backend backend = kernels::Backend::openmp);

/// Missing keys keep their defaults; unknown keys are rejected.
ProtocolConfig protocol_config_from_json(const nlohmann::json& j, ProtocolConfig base = {});
void to_json(nlohmann::json& j, const ProtocolConfig& config);

}  // namespace procwatt
