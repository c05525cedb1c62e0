#include "procwatt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "procwatt/error.hpp"
#include "procwatt/kernels.hpp"

namespace procwatt {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Zero of D' on p > 0, when D has one (d / (n·b) > 0).
std::optional<double> critical_point(const LinearProfile& lin, const NRootProfile& root) {
  const double ratio = root.d / (root.n * lin.b);
  if (!(ratio > 0.0) || !std::isfinite(ratio)) return std::nullopt;
  return std::pow(ratio, 1.0 / root.k());
}

double bisect(const LinearProfile& lin, const NRootProfile& root, double lo, double hi,
              double tolerance, double value_tolerance) {
  const int s_lo = sign_of(difference(lin, root, lo));
  double mid = 0.5 * (lo + hi);
  double d_mid = difference(lin, root, mid);
  const double eps = 4.0 * std::numeric_limits<double>::epsilon();
  while ((hi - lo > tolerance || std::fabs(d_mid) > value_tolerance) && hi - lo > eps * hi) {
    if (d_mid == 0.0) return mid;
    if (sign_of(d_mid) == s_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
    mid = 0.5 * (lo + hi);
    d_mid = difference(lin, root, mid);
  }
  return mid;
}

}  // namespace

double difference(const LinearProfile& lin, const NRootProfile& root, double p) {
  return evaluate(lin, p) - evaluate(root, p);
}

double difference_derivative(const LinearProfile& lin, const NRootProfile& root, double p) {
  return derivative(lin, p) - derivative(root, p);
}

double derivative_threshold(const LinearProfile& lin, const NRootProfile& root) {
  if (!(lin.b > 0.0)) {
    throw Error(ErrorCode::no_threshold, "linear slope b <= 0: dD/dp is never positive");
  }
  if (!(root.d > 0.0)) return 0.0;
  return std::pow(root.d / (root.n * lin.b), 1.0 / root.k());
}

CrossoverResult find_crossovers(const LinearProfile& lin, const NRootProfile& root, double p_max,
                                const CrossoverOptions& options) {
  if (!(p_max >= 0.0) || !std::isfinite(p_max)) {
    throw Error(ErrorCode::domain, "p_max must be a finite value >= 0");
  }
  if (options.cells == 0 || !(options.tolerance > 0.0)) {
    throw Error(ErrorCode::domain, "crossover scan needs cells > 0 and tolerance > 0");
  }
  CrossoverResult result;
  result.p_max = p_max;
  if (lin.b > 0.0) result.derivative_threshold = derivative_threshold(lin, root);
  if (p_max == 0.0) return result;

  std::vector<double> grid;
  grid.reserve(options.cells + 2);
  for (std::size_t i = 0; i <= options.cells; ++i) {
    grid.push_back(p_max * static_cast<double>(i) / static_cast<double>(options.cells));
  }
  if (auto pc = critical_point(lin, root); pc && *pc > 0.0 && *pc < p_max) {
    grid.insert(std::upper_bound(grid.begin(), grid.end(), *pc), *pc);
  }
  const auto values = kernels::difference_on_grid(
      lin, root, grid,
      options.backend == ScanBackend::serial ? kernels::Backend::serial : kernels::Backend::openmp);

  const double value_tolerance = 1e-7 * std::max(1.0, std::fabs(lin.a) + std::fabs(root.c));
  std::optional<std::size_t> last_signed;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int s = sign_of(values[i]);
    if (s == 0) continue;
    if (last_signed && sign_of(values[*last_signed]) != s) {
      result.crossovers.push_back(
          bisect(lin, root, grid[*last_signed], grid[i], options.tolerance, value_tolerance));
    }
    last_signed = i;
  }

  double lo = 0.0;
  auto push_interval = [&](double hi) {
    result.sign_intervals.push_back({lo, hi, sign_of(difference(lin, root, 0.5 * (lo + hi)))});
    lo = hi;
  };
  for (double c : result.crossovers) push_interval(c);
  push_interval(p_max);
  return result;
}

std::vector<CrossoverPlotRow> crossover_plot(const LinearProfile& lin, const NRootProfile& root,
                                             double p_max, std::size_t cells) {
  if (!(p_max >= 0.0) || !std::isfinite(p_max) || cells == 0) {
    throw Error(ErrorCode::domain, "plot needs p_max >= 0 and cells > 0");
  }
  std::vector<CrossoverPlotRow> rows;
  rows.reserve(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    const double p = p_max * static_cast<double>(i) / static_cast<double>(cells);
    const double wl = evaluate(lin, p);
    const double wr = evaluate(root, p);
    rows.push_back({p, wl, wr, wl - wr});
  }
  return rows;
}

std::string best_machine(const std::map<std::string, PowerProfile>& profiles,
                         const std::map<std::string, double>& competition) {
  if (profiles.empty()) throw Error(ErrorCode::input, "best_machine needs at least one machine");
  if (profiles.size() != competition.size() ||
      !std::equal(profiles.begin(), profiles.end(), competition.begin(),
                  [](const auto& l, const auto& r) { return l.first == r.first; })) {
    throw Error(ErrorCode::input, "profile and competition maps have different machine ids");
  }
  const std::string* best_id = nullptr;
  double best_power = 0.0;
  auto comp = competition.begin();
  for (const auto& [id, profile] : profiles) {
    const double w = evaluate(profile, (comp++)->second);
    if (!best_id || w < best_power) {
      best_id = &id;
      best_power = w;
    }
  }
  return *best_id;
}

void to_json(nlohmann::json& j, const CrossoverResult& result) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : result.sign_intervals) {
    intervals.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"sign", iv.sign}});
  }
  j = nlohmann::json{{"crossovers", result.crossovers},
                     {"derivative_threshold", result.derivative_threshold
                                                  ? nlohmann::json(*result.derivative_threshold)
                                                  : nlohmann::json(nullptr)},
                     {"sign_intervals", intervals},
                     {"p_max", result.p_max}};
}

}  // namespace procwatt
