#pragma once

// Process power as a function of CPU competition, plus the machine-level
// reference model and trapezoidal energy integration.
//
// Units throughout: watts, seconds, joules, CPU percent in [0, 100].

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace procwatt {

/// W(p) = a + b·p
struct LinearProfile {
  double a = 0.0;  // W at p = 0
  double b = 0.0;  // W per percentage point

  friend bool operator==(const LinearProfile&, const LinearProfile&) = default;
};

/// W(p) = c + d·p^(1/n)
struct NRootProfile {
  double c = 0.0;  // W at p = 0
  double d = 0.0;  // W per percent^(1/n)
  int n = 2;       // root degree, >= 2

  /// k = 1 - 1/n, the exponent of p in the derivative's denominator.
  double k() const noexcept { return 1.0 - 1.0 / n; }

  friend bool operator==(const NRootProfile&, const NRootProfile&) = default;
};

enum class ProfileKind { linear, nroot };

std::string_view to_string(ProfileKind kind) noexcept;

/// Tagged union of the two competition profiles. Construction validates the
/// parameters (finite, n >= 2), so a PowerProfile is always evaluable.
class PowerProfile {
 public:
  PowerProfile(LinearProfile linear);  // NOLINT(google-explicit-constructor)
  PowerProfile(NRootProfile nroot);    // NOLINT(google-explicit-constructor)

  static PowerProfile linear(double a, double b) { return LinearProfile{a, b}; }
  static PowerProfile nroot(double c, double d, int n) { return NRootProfile{c, d, n}; }

  ProfileKind kind() const noexcept;
  bool is_linear() const noexcept { return kind() == ProfileKind::linear; }
  bool is_nroot() const noexcept { return kind() == ProfileKind::nroot; }

  /// Throws Error(profile_kind) when the profile holds the other alternative.
  const LinearProfile& as_linear() const;
  const NRootProfile& as_nroot() const;

  /// a for linear, c for n-root.
  double intercept() const noexcept;

  const std::variant<LinearProfile, NRootProfile>& get() const noexcept { return model_; }

  friend bool operator==(const PowerProfile&, const PowerProfile&) = default;

 private:
  std::variant<LinearProfile, NRootProfile> model_;
};

/// p^(1/n) for p >= 0. Uses sqrt/cbrt for n = 2, 3 so perfect powers are exact.
double nth_root(double p, int n);

double evaluate(const LinearProfile& profile, double p);
double evaluate(const NRootProfile& profile, double p);
/// Power drawn by the process at competition p >= 0. Negative p is a domain
/// error; p = 0 returns the intercept.
double evaluate(const PowerProfile& profile, double p);

double derivative(const LinearProfile& profile, double p);
double derivative(const NRootProfile& profile, double p);
/// dW/dp. Constant b for linear; d / (n·p^(1-1/n)) for n-root, which is
/// singular at p = 0.
double derivative(const PowerProfile& profile, double p);

struct EnergySample {
  double t = 0.0;      // s
  double power = 0.0;  // W

  friend bool operator==(const EnergySample&, const EnergySample&) = default;
};

struct EnergyTrace {
  std::vector<EnergySample> samples;
};

/// Trapezoidal ∫P(t)dt over the trace span, in joules. Requires at least two
/// samples with strictly increasing timestamps and non-negative power.
double integrate_energy(std::span<const EnergySample> samples);
inline double integrate_energy(const EnergyTrace& trace) { return integrate_energy(trace.samples); }

/// Classic whole-server model P(u) = (P_max - P_idle)·u + P_idle.
class ReferenceMachineModel {
 public:
  ReferenceMachineModel(double p_idle, double p_max);

  double p_idle() const noexcept { return p_idle_; }
  double p_max() const noexcept { return p_max_; }

 private:
  double p_idle_;
  double p_max_;
};

/// u is a utilization fraction in [0, 1], not a percentage.
double machine_power(const ReferenceMachineModel& model, double u);

// JSON: {"kind":"linear","a":…,"b":…} or {"kind":"nroot","c":…,"d":…,"n":…}
void to_json(nlohmann::json& j, const PowerProfile& profile);
/// Throws Error(format) on a malformed document.
PowerProfile profile_from_json(const nlohmann::json& j);

}  // namespace procwatt
