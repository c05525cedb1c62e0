#pragma once

// Least-squares fitting of the linear and n-root competition profiles to
// measured or simulated traces, with slope t-tests and model selection.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "procwatt/power_model.hpp"

namespace procwatt {

struct TraceSample {
  double t = 0.0;            // s
  double competition = 0.0;  // % of total CPU used by competing processes
  double power = 0.0;        // W drawn by the observed process

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct AggregatedPoint {
  double competition = 0.0;  // mean competition of the bin's samples
  double power = 0.0;        // median power of the bin
  std::size_t count = 0;
  double dispersion = 0.0;   // sample standard deviation of power within the bin

  friend bool operator==(const AggregatedPoint&, const AggregatedPoint&) = default;
};

inline constexpr double kDefaultBinWidth = 5.0;
inline constexpr double kDefaultTieTolerance = 0.02;
inline constexpr int kDefaultMinRoot = 2;
inline constexpr int kDefaultMaxRoot = 8;

/// Groups samples into bins floor(competition / bin_width) and reduces each
/// bin to (mean competition, median power, count, stddev). Output is sorted
/// by competition and does not depend on input order.
std::vector<AggregatedPoint> aggregate(std::span<const TraceSample> samples,
                                       double bin_width = kDefaultBinWidth);

/// One point per sample, for fitting raw data without binning.
std::vector<AggregatedPoint> raw_points(std::span<const TraceSample> samples);

/// Per-parameter arrays are ordered {intercept, slope}, i.e. {a, b} for a
/// linear profile and {c, d} for an n-root profile. t statistics and
/// p-values are empty ("degenerate") when the standard error is zero.
struct FitReport {
  PowerProfile profile = LinearProfile{};
  std::array<double, 2> std_errors{};
  std::array<std::optional<double>, 2> t_statistics{};
  std::array<std::optional<double>, 2> p_values{};
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  double sse = 0.0;
  std::size_t n_points = 0;
  /// FNV-1a over the fitted points, used to check two reports share data.
  std::uint64_t points_digest = 0;

  double slope() const noexcept;
  double slope_std_error() const noexcept { return std_errors[1]; }
};

/// OLS fit of W = a + b·p. Needs >= 3 points spanning >= 2 distinct
/// competition values.
FitReport fit_linear(std::span<const AggregatedPoint> points);

/// OLS fit of W = c + d·p^(1/n) at a fixed root degree.
FitReport fit_nroot_fixed(std::span<const AggregatedPoint> points, int n);

/// Fits every n in the grid and returns the one with the smallest SSE
/// (smallest n on ties).
FitReport fit_nroot(std::span<const AggregatedPoint> points, std::span<const int> n_grid);
FitReport fit_nroot(std::span<const AggregatedPoint> points);

std::vector<int> root_grid(int n_min = kDefaultMinRoot, int n_max = kDefaultMaxRoot);

struct SlopeTest {
  double t = 0.0;
  double p_value = 1.0;  // two-sided
  double df = 0.0;
};

/// Slope significance test, t = slope / SE(slope) with n_points - 2 degrees
/// of freedom. Throws Error(degenerate_statistics) when df <= 0 or SE = 0.
SlopeTest t_test_slope(const FitReport& report);

enum class ModelChoice { linear, nroot, mixed };

std::string_view to_string(ModelChoice choice) noexcept;

struct ModelSelection {
  ModelChoice chosen = ModelChoice::mixed;
  FitReport linear_report;
  FitReport nroot_report;
  double margin = 0.0;  // linear adj-R² minus n-root adj-R²
};

/// Picks the report with the higher adjusted R², or Mixed when the two are
/// within tie_tolerance of each other.
ModelSelection select_model(const FitReport& linear, const FitReport& nroot,
                            double tie_tolerance = kDefaultTieTolerance);

void to_json(nlohmann::json& j, const AggregatedPoint& point);
void to_json(nlohmann::json& j, const FitReport& report);
void to_json(nlohmann::json& j, const ModelSelection& selection);
FitReport fit_report_from_json(const nlohmann::json& j);
ModelSelection model_selection_from_json(const nlohmann::json& j);

}  // namespace procwatt
