#pragma once

// Comparative analysis of a linear and an n-root machine profile:
// D(p) = W_lin(p) - W_rt(p), the point past which D is increasing, and the
// competition levels where the two machines draw equal power.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "procwatt/power_model.hpp"

namespace procwatt {

enum class ScanBackend { serial, openmp };

/// D(p) = W_lin(p) - W_rt(p). Positive D means the n-root machine draws less.
double difference(const LinearProfile& lin, const NRootProfile& root, double p);

/// dD/dp = b - d / (n·p^k), k = 1 - 1/n. Singular at p = 0.
double difference_derivative(const LinearProfile& lin, const NRootProfile& root, double p);

/// p* = (d / (n·b))^(1/k): dD/dp > 0 for every p > p*. Returns 0 when d <= 0
/// and throws Error(no_threshold) when b <= 0.
double derivative_threshold(const LinearProfile& lin, const NRootProfile& root);

struct SignInterval {
  double lo = 0.0;
  double hi = 0.0;
  int sign = 0;  // sign of D inside (lo, hi)
};

struct CrossoverResult {
  std::vector<double> crossovers;               // ascending, in (0, p_max]
  std::optional<double> derivative_threshold;   // empty when b <= 0
  std::vector<SignInterval> sign_intervals;     // partition of [0, p_max]
  double p_max = 0.0;
};

struct CrossoverOptions {
  std::size_t cells = 1024;
  double tolerance = 1e-6;  // bracket width at which bisection stops
  ScanBackend backend = ScanBackend::openmp;
};

/// Sign changes of D on (0, p_max]: uniform grid scan plus bisection. The
/// grid also contains p = 0 and the critical point of D (when it lies inside
/// the domain), so each scanned cell holds at most one root.
CrossoverResult find_crossovers(const LinearProfile& lin, const NRootProfile& root, double p_max,
                                const CrossoverOptions& options = {});

struct CrossoverPlotRow {
  double p = 0.0;
  double w_lin = 0.0;
  double w_rt = 0.0;
  double d = 0.0;
};

/// (p, W_lin, W_rt, D) at p = p_max·i/cells, i = 0..cells.
std::vector<CrossoverPlotRow> crossover_plot(const LinearProfile& lin, const NRootProfile& root,
                                             double p_max, std::size_t cells = 1024);

/// Machine id minimizing evaluate(profile, competition); ties go to the
/// smallest id. Key sets must match and be non-empty.
std::string best_machine(const std::map<std::string, PowerProfile>& profiles,
                         const std::map<std::string, double>& competition);

void to_json(nlohmann::json& j, const CrossoverResult& result);

}  // namespace procwatt
