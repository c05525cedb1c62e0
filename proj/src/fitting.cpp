#include "procwatt/fitting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <string>
#include <tuple>

#include "procwatt/error.hpp"
#include "procwatt/stats.hpp"

namespace procwatt {

namespace {

void validate_samples(std::span<const TraceSample> samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.t) || !(s.competition >= 0.0 && s.competition <= 100.0) ||
        !(s.power >= 0.0) || !std::isfinite(s.power)) {
      throw Error(ErrorCode::validation, "sample " + std::to_string(i) +
                                             " outside competition [0,100] / power >= 0");
    }
  }
}

std::vector<TraceSample> sorted_copy(std::span<const TraceSample> samples) {
  std::vector<TraceSample> out(samples.begin(), samples.end());
  std::sort(out.begin(), out.end(), [](const TraceSample& l, const TraceSample& r) {
    return std::tie(l.competition, l.power, l.t) < std::tie(r.competition, r.power, r.t);
  });
  return out;
}

// Mean shifted by the first element: identical inputs give the exact value.
template <class Get>
double shifted_mean(std::size_t n, Get get) {
  const double origin = get(0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += get(i) - origin;
  return origin + acc / static_cast<double>(n);
}

std::uint64_t digest(std::span<const AggregatedPoint> points) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& p : points) {
    mix(p.competition);
    mix(p.power);
  }
  return h;
}

struct OlsResult {
  double intercept = 0.0;
  double slope = 0.0;
  double se_intercept = 0.0;
  double se_slope = 0.0;
  double sse = 0.0;
  double sst = 0.0;
};

OlsResult ols(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  const double x_bar = shifted_mean(n, [&](std::size_t i) { return xs[i]; });
  const double y_bar = shifted_mean(n, [&](std::size_t i) { return ys[i]; });
  double sxx = 0.0, sxy = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - x_bar;
    const double dy = ys[i] - y_bar;
    sxx += dx * dx;
    sxy += dx * dy;
    sst += dy * dy;
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::degenerate_design, "all competition values are equal");
  }
  OlsResult r;
  r.slope = sxy / sxx;
  r.intercept = y_bar - r.slope * x_bar;
  for (std::size_t i = 0; i < n; ++i) {
    const double residual = ys[i] - (r.intercept + r.slope * xs[i]);
    r.sse += residual * residual;
  }
  r.sst = sst;
  const double dof = static_cast<double>(n) - 2.0;
  const double s2 = r.sse / dof;
  r.se_slope = std::sqrt(s2 / sxx);
  r.se_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + x_bar * x_bar / sxx));
  return r;
}

void check_points(std::span<const AggregatedPoint> points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::insufficient_data,
                "fitting needs at least 3 points, got " + std::to_string(points.size()));
  }
  const double first = points.front().competition;
  const bool distinct = std::any_of(points.begin(), points.end(),
                                    [first](const AggregatedPoint& p) { return p.competition != first; });
  if (!distinct) {
    throw Error(ErrorCode::degenerate_design, "all competition values are equal");
  }
  for (const auto& p : points) {
    if (!(p.competition >= 0.0) || !std::isfinite(p.competition) || !std::isfinite(p.power)) {
      throw Error(ErrorCode::validation, "points need finite power and competition >= 0");
    }
  }
}

std::optional<double> safe_t(double estimate, double se) {
  if (!(se > 0.0) || !std::isfinite(se)) return std::nullopt;
  return estimate / se;
}

FitReport make_report(PowerProfile profile, const OlsResult& r, std::span<const AggregatedPoint> points) {
  FitReport rep;
  rep.profile = std::move(profile);
  rep.std_errors = {r.se_intercept, r.se_slope};
  const double df = static_cast<double>(points.size()) - 2.0;
  const std::array<double, 2> estimates{r.intercept, r.slope};
  for (std::size_t k = 0; k < 2; ++k) {
    rep.t_statistics[k] = safe_t(estimates[k], rep.std_errors[k]);
    if (rep.t_statistics[k]) rep.p_values[k] = stats::student_t_two_sided_p(*rep.t_statistics[k], df);
  }
  rep.sse = r.sse;
  double r2 = r.sst > 0.0 ? 1.0 - r.sse / r.sst : (r.sse == 0.0 ? 1.0 : 0.0);
  rep.r_squared = std::clamp(r2, 0.0, 1.0);
  const double n = static_cast<double>(points.size());
  rep.adj_r_squared = 1.0 - (1.0 - rep.r_squared) * (n - 1.0) / (n - 2.0);
  rep.n_points = points.size();
  rep.points_digest = digest(points);
  return rep;
}

std::vector<double> powers_of(std::span<const AggregatedPoint> points) {
  std::vector<double> ys(points.size());
  std::transform(points.begin(), points.end(), ys.begin(), [](const auto& p) { return p.power; });
  return ys;
}

}  // namespace

std::vector<AggregatedPoint> aggregate(std::span<const TraceSample> samples, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw Error(ErrorCode::domain, "bin width must be positive");
  }
  if (samples.empty()) {
    throw Error(ErrorCode::insufficient_data, "cannot aggregate an empty trace");
  }
  validate_samples(samples);
  const auto sorted = sorted_copy(samples);

  std::vector<AggregatedPoint> out;
  std::vector<double> powers;
  std::size_t begin = 0;
  while (begin < sorted.size()) {
    const double bin = std::floor(sorted[begin].competition / bin_width);
    std::size_t end = begin + 1;
    while (end < sorted.size() && std::floor(sorted[end].competition / bin_width) == bin) ++end;
    const std::size_t count = end - begin;

    AggregatedPoint pt;
    pt.count = count;
    pt.competition = shifted_mean(count, [&](std::size_t i) { return sorted[begin + i].competition; });

    powers.clear();
    for (std::size_t i = begin; i < end; ++i) powers.push_back(sorted[i].power);
    std::sort(powers.begin(), powers.end());
    pt.power = count % 2 == 1 ? powers[count / 2]
                              : 0.5 * (powers[count / 2 - 1] + powers[count / 2]);
    if (count > 1) {
      const double mean = shifted_mean(count, [&](std::size_t i) { return powers[i]; });
      double ss = 0.0;
      for (double p : powers) ss += (p - mean) * (p - mean);
      pt.dispersion = std::sqrt(ss / static_cast<double>(count - 1));
    }
    out.push_back(pt);
    begin = end;
  }
  return out;
}

std::vector<AggregatedPoint> raw_points(std::span<const TraceSample> samples) {
  validate_samples(samples);
  const auto sorted = sorted_copy(samples);
  std::vector<AggregatedPoint> out;
  out.reserve(sorted.size());
  for (const auto& s : sorted) out.push_back({s.competition, s.power, 1, 0.0});
  return out;
}

double FitReport::slope() const noexcept {
  return profile.is_linear() ? std::get<LinearProfile>(profile.get()).b
                             : std::get<NRootProfile>(profile.get()).d;
}

FitReport fit_linear(std::span<const AggregatedPoint> points) {
  check_points(points);
  std::vector<double> xs(points.size());
  std::transform(points.begin(), points.end(), xs.begin(), [](const auto& p) { return p.competition; });
  const auto ys = powers_of(points);
  const auto r = ols(xs, ys);
  return make_report(LinearProfile{r.intercept, r.slope}, r, points);
}

FitReport fit_nroot_fixed(std::span<const AggregatedPoint> points, int n) {
  if (n < 2) throw Error(ErrorCode::domain, "root degree must be >= 2");
  check_points(points);
  std::vector<double> xs(points.size());
  std::transform(points.begin(), points.end(), xs.begin(),
                 [n](const auto& p) { return nth_root(p.competition, n); });
  const auto ys = powers_of(points);
  const auto r = ols(xs, ys);
  return make_report(NRootProfile{r.intercept, r.slope, n}, r, points);
}

FitReport fit_nroot(std::span<const AggregatedPoint> points, std::span<const int> n_grid) {
  if (n_grid.empty()) throw Error(ErrorCode::domain, "root grid is empty");
  if (std::any_of(n_grid.begin(), n_grid.end(), [](int n) { return n < 2; })) {
    throw Error(ErrorCode::domain, "root grid entries must be >= 2");
  }
  std::optional<FitReport> best;
  for (int n : n_grid) {
    auto candidate = fit_nroot_fixed(points, n);
    const bool better = !best || candidate.sse < best->sse ||
                        (candidate.sse == best->sse && n < best->profile.as_nroot().n);
    if (better) best = std::move(candidate);
  }
  return *best;
}

FitReport fit_nroot(std::span<const AggregatedPoint> points) {
  const auto grid = root_grid();
  return fit_nroot(points, grid);
}

std::vector<int> root_grid(int n_min, int n_max) {
  if (n_min < 2 || n_max < n_min) {
    throw Error(ErrorCode::domain, "root grid needs 2 <= n_min <= n_max");
  }
  std::vector<int> grid;
  for (int n = n_min; n <= n_max; ++n) grid.push_back(n);
  return grid;
}

SlopeTest t_test_slope(const FitReport& report) {
  const double df = static_cast<double>(report.n_points) - 2.0;
  const double se = report.slope_std_error();
  if (!(df >= 1.0)) {
    throw Error(ErrorCode::degenerate_statistics, "slope test needs at least 1 degree of freedom");
  }
  if (!(se > 0.0) || !std::isfinite(se)) {
    throw Error(ErrorCode::degenerate_statistics, "slope standard error is zero (perfect fit)");
  }
  SlopeTest out;
  out.df = df;
  out.t = report.slope() / se;
  out.p_value = stats::student_t_two_sided_p(out.t, df);
  return out;
}

std::string_view to_string(ModelChoice choice) noexcept {
  switch (choice) {
    case ModelChoice::linear: return "linear";
    case ModelChoice::nroot: return "nroot";
    case ModelChoice::mixed: return "mixed";
  }
  return "mixed";
}

ModelSelection select_model(const FitReport& linear, const FitReport& nroot, double tie_tolerance) {
  if (!linear.profile.is_linear() || !nroot.profile.is_nroot()) {
    throw Error(ErrorCode::profile_kind, "select_model expects a linear and an nroot report");
  }
  if (linear.n_points != nroot.n_points || linear.points_digest != nroot.points_digest) {
    throw Error(ErrorCode::mismatch, "reports were fitted on different point sets");
  }
  if (!(tie_tolerance >= 0.0)) throw Error(ErrorCode::domain, "tie tolerance must be >= 0");
  ModelSelection sel{ModelChoice::mixed, linear, nroot, linear.adj_r_squared - nroot.adj_r_squared};
  if (std::fabs(sel.margin) > tie_tolerance) {
    sel.chosen = sel.margin > 0.0 ? ModelChoice::linear : ModelChoice::nroot;
  }
  return sel;
}

// --- JSON ------------------------------------------------------------------

namespace {

constexpr const char* kDegenerate = "degenerate";

std::array<const char*, 2> param_names(const PowerProfile& p) {
  return p.is_linear() ? std::array<const char*, 2>{"a", "b"} : std::array<const char*, 2>{"c", "d"};
}

nlohmann::json optional_pair(const std::array<std::optional<double>, 2>& v,
                             const std::array<const char*, 2>& names) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t k = 0; k < 2; ++k) {
    j[names[k]] = v[k] ? nlohmann::json(*v[k]) : nlohmann::json(kDegenerate);
  }
  return j;
}

const nlohmann::json& member(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::format, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

double number(const nlohmann::json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_number()) throw Error(ErrorCode::format, std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

std::optional<double> optional_number(const nlohmann::json& v) {
  if (v.is_string() && v.get<std::string>() == kDegenerate) return std::nullopt;
  if (!v.is_number()) throw Error(ErrorCode::format, "expected a number or \"degenerate\"");
  return v.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const AggregatedPoint& point) {
  j = nlohmann::json{{"competition", point.competition},
                     {"power", point.power},
                     {"count", point.count},
                     {"dispersion", point.dispersion}};
}

void to_json(nlohmann::json& j, const FitReport& report) {
  const auto names = param_names(report.profile);
  char digest_hex[17];
  std::snprintf(digest_hex, sizeof digest_hex, "%016llx",
                static_cast<unsigned long long>(report.points_digest));
  j = nlohmann::json{{"profile", report.profile},
                     {"std_errors", {{names[0], report.std_errors[0]}, {names[1], report.std_errors[1]}}},
                     {"t_statistics", optional_pair(report.t_statistics, names)},
                     {"p_values", optional_pair(report.p_values, names)},
                     {"r_squared", report.r_squared},
                     {"adj_r_squared", report.adj_r_squared},
                     {"sse", report.sse},
                     {"n_points", report.n_points},
                     {"points_digest", digest_hex}};
}

void to_json(nlohmann::json& j, const ModelSelection& selection) {
  j = nlohmann::json{{"chosen", to_string(selection.chosen)},
                     {"linear_report", selection.linear_report},
                     {"nroot_report", selection.nroot_report},
                     {"margin", selection.margin}};
}

FitReport fit_report_from_json(const nlohmann::json& j) {
  FitReport r;
  r.profile = profile_from_json(member(j, "profile"));
  const auto names = param_names(r.profile);
  const auto& se = member(j, "std_errors");
  const auto& ts = member(j, "t_statistics");
  const auto& ps = member(j, "p_values");
  for (std::size_t k = 0; k < 2; ++k) {
    r.std_errors[k] = number(se, names[k]);
    r.t_statistics[k] = optional_number(member(ts, names[k]));
    r.p_values[k] = optional_number(member(ps, names[k]));
  }
  r.r_squared = number(j, "r_squared");
  r.adj_r_squared = number(j, "adj_r_squared");
  r.sse = number(j, "sse");
  const auto& n = member(j, "n_points");
  if (!n.is_number_unsigned()) throw Error(ErrorCode::format, "n_points must be a non-negative integer");
  r.n_points = n.get<std::size_t>();
  const auto& dg = member(j, "points_digest");
  if (!dg.is_string()) throw Error(ErrorCode::format, "points_digest must be a hex string");
  try {
    r.points_digest = std::stoull(dg.get<std::string>(), nullptr, 16);
  } catch (const std::exception&) {
    throw Error(ErrorCode::format, "points_digest is not valid hex");
  }
  return r;
}

ModelSelection model_selection_from_json(const nlohmann::json& j) {
  ModelSelection s;
  const auto& chosen = member(j, "chosen");
  const auto name = chosen.is_string() ? chosen.get<std::string>() : std::string{};
  if (name == "linear") s.chosen = ModelChoice::linear;
  else if (name == "nroot") s.chosen = ModelChoice::nroot;
  else if (name == "mixed") s.chosen = ModelChoice::mixed;
  else throw Error(ErrorCode::format, "chosen must be linear, nroot or mixed");
  s.linear_report = fit_report_from_json(member(j, "linear_report"));
  s.nroot_report = fit_report_from_json(member(j, "nroot_report"));
  s.margin = number(j, "margin");
  return s;
}

}  // namespace procwatt
