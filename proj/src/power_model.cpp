#include "procwatt/power_model.hpp"

#include <cmath>
#include <string>

#include "procwatt/error.hpp"

namespace procwatt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::domain, std::string("profile parameter ") + name + " must be finite");
  }
}

void require_competition(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::domain, "competition must be a finite value >= 0, got " + std::to_string(p));
  }
}

}  // namespace

std::string_view to_string(ProfileKind kind) noexcept {
  return kind == ProfileKind::linear ? "linear" : "nroot";
}

PowerProfile::PowerProfile(LinearProfile linear) : model_(linear) {
  require_finite(linear.a, "a");
  require_finite(linear.b, "b");
}

PowerProfile::PowerProfile(NRootProfile nroot) : model_(nroot) {
  require_finite(nroot.c, "c");
  require_finite(nroot.d, "d");
  if (nroot.n < 2) {
    throw Error(ErrorCode::domain, "n-root degree must be >= 2, got " + std::to_string(nroot.n));
  }
}

ProfileKind PowerProfile::kind() const noexcept {
  return std::holds_alternative<LinearProfile>(model_) ? ProfileKind::linear : ProfileKind::nroot;
}

const LinearProfile& PowerProfile::as_linear() const {
  if (const auto* lin = std::get_if<LinearProfile>(&model_)) return *lin;
  throw Error(ErrorCode::profile_kind, "expected a linear profile, got nroot");
}

const NRootProfile& PowerProfile::as_nroot() const {
  if (const auto* root = std::get_if<NRootProfile>(&model_)) return *root;
  throw Error(ErrorCode::profile_kind, "expected an nroot profile, got linear");
}

double PowerProfile::intercept() const noexcept {
  return std::visit(overloaded{[](const LinearProfile& m) { return m.a; },
                               [](const NRootProfile& m) { return m.c; }},
                    model_);
}

double nth_root(double p, int n) {
  switch (n) {
    case 2: return std::sqrt(p);
    case 3: return std::cbrt(p);
    default: return std::pow(p, 1.0 / n);
  }
}

double evaluate(const LinearProfile& profile, double p) {
  require_competition(p);
  return profile.a + profile.b * p;
}

double evaluate(const NRootProfile& profile, double p) {
  require_competition(p);
  return profile.c + profile.d * nth_root(p, profile.n);
}

double evaluate(const PowerProfile& profile, double p) {
  return std::visit([p](const auto& m) { return evaluate(m, p); }, profile.get());
}

double derivative(const LinearProfile& profile, double p) {
  require_competition(p);
  return profile.b;
}

double derivative(const NRootProfile& profile, double p) {
  require_competition(p);
  if (p == 0.0) {
    throw Error(ErrorCode::singularity, "n-root derivative is unbounded at p = 0");
  }
  return profile.d / (profile.n * std::pow(p, profile.k()));
}

double derivative(const PowerProfile& profile, double p) {
  return std::visit([p](const auto& m) { return derivative(m, p); }, profile.get());
}

double integrate_energy(std::span<const EnergySample> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::insufficient_data,
                "energy integration needs at least 2 samples, got " + std::to_string(samples.size()));
  }
  double energy = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.power) || s.power < 0.0) {
      throw Error(ErrorCode::validation, "sample " + std::to_string(i) + " has invalid time or power");
    }
    if (i == 0) continue;
    const auto& prev = samples[i - 1];
    if (!(s.t > prev.t)) {
      throw Error(ErrorCode::ordering,
                  "timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
    }
    energy += 0.5 * (prev.power + s.power) * (s.t - prev.t);
  }
  return energy;
}

ReferenceMachineModel::ReferenceMachineModel(double p_idle, double p_max)
    : p_idle_(p_idle), p_max_(p_max) {
  if (!std::isfinite(p_idle) || !std::isfinite(p_max) || p_idle < 0.0 || p_idle > p_max) {
    throw Error(ErrorCode::domain, "reference model needs 0 <= p_idle <= p_max");
  }
}

double machine_power(const ReferenceMachineModel& model, double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw Error(ErrorCode::domain, "utilization must be a fraction in [0, 1], got " + std::to_string(u));
  }
  return (model.p_max() - model.p_idle()) * u + model.p_idle();
}

void to_json(nlohmann::json& j, const PowerProfile& profile) {
  std::visit(overloaded{[&j](const LinearProfile& m) {
                          j = nlohmann::json{{"kind", "linear"}, {"a", m.a}, {"b", m.b}};
                        },
                        [&j](const NRootProfile& m) {
                          j = nlohmann::json{{"kind", "nroot"}, {"c", m.c}, {"d", m.d}, {"n", m.n}};
                        }},
             profile.get());
}

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorCode::format, std::string("profile field '") + key + "' missing or not a number");
  }
  return j.at(key).get<double>();
}

}  // namespace

PowerProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(ErrorCode::format, "profile must be an object with a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "linear") {
      return LinearProfile{number_field(j, "a"), number_field(j, "b")};
    }
    if (kind == "nroot") {
      if (!j.contains("n") || !j.at("n").is_number_integer()) {
        throw Error(ErrorCode::format, "profile field 'n' missing or not an integer");
      }
      return NRootProfile{number_field(j, "c"), number_field(j, "d"), j.at("n").get<int>()};
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::domain) throw Error(ErrorCode::format, e.what());
    throw;
  }
  throw Error(ErrorCode::format, "unknown profile kind '" + kind + "'");
}

}  // namespace procwatt
