#include <cmath>
#include <limits>
#include <numbers>

#include "procwatt/analysis.hpp"
#include "procwatt/error.hpp"
#include "procwatt/kernels.hpp"

namespace procwatt::kernels {

double faced_competition(const PlacementInstance& inst, std::span<const std::size_t> machine_of,
                         std::size_t j) {
  const std::size_t m = machine_of[j];
  double competition = inst.base_competition[m];
  for (std::size_t k = 0; k < machine_of.size(); ++k) {
    if (k != j && machine_of[k] == m) competition += inst.shares[k];
  }
  return competition;
}

ConfigurationPower configuration_power(const PlacementInstance& inst,
                                       std::span<const std::size_t> machine_of,
                                       std::span<double> per_vnf, std::span<double> per_slice) {
  ConfigurationPower out;
  for (auto& s : per_slice) s = 0.0;
  for (std::size_t j = 0; j < inst.vnf_count(); ++j) {
    const double p = faced_competition(inst, machine_of, j);
    if (p + inst.shares[j] > 100.0 + kCapacitySlack) out.feasible = false;
    per_vnf[j] = evaluate(inst.profiles[machine_of[j]], p);
    per_slice[inst.slice_of[j]] += per_vnf[j];
  }
  for (double s : per_slice) out.total += s;
  return out;
}

void decode_assignment(std::uint64_t index, std::size_t machines, std::span<std::size_t> machine_of) {
  for (std::size_t j = machine_of.size(); j-- > 0;) {
    machine_of[j] = static_cast<std::size_t>(index % machines);
    index /= machines;
  }
}

std::uint64_t configuration_count(std::size_t machines, std::size_t vnfs) {
  std::uint64_t count = 1;
  for (std::size_t j = 0; j < vnfs; ++j) {
    if (machines != 0 && count > std::numeric_limits<std::uint64_t>::max() / machines) return 0;
    count *= machines;
  }
  return count;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t counter) noexcept {
  const std::uint64_t key = splitmix64(seed);
  const std::uint64_t r1 = splitmix64(key ^ (2 * counter));
  const std::uint64_t r2 = splitmix64(key ^ (2 * counter + 1));
  constexpr double kScale = 0x1.0p-53;
  const double u1 = static_cast<double>((r1 >> 11) + 1) * kScale;  // (0, 1]
  const double u2 = static_cast<double>(r2 >> 11) * kScale;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace serial {

SearchOutcome exhaustive_search(const PlacementInstance& inst) {
  const std::uint64_t count = configuration_count(inst.machine_count(), inst.vnf_count());
  std::vector<std::size_t> machine_of(inst.vnf_count());
  std::vector<double> per_vnf(inst.vnf_count());
  std::vector<double> per_slice(inst.slice_count);

  SearchOutcome best_feasible{0, std::numeric_limits<double>::infinity(), false};
  SearchOutcome best_any{0, std::numeric_limits<double>::infinity(), false};
  bool have_feasible = false;
  bool have_any = false;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    decode_assignment(idx, inst.machine_count(), machine_of);
    const auto cp = configuration_power(inst, machine_of, per_vnf, per_slice);
    if (cp.feasible && (!have_feasible || cp.total < best_feasible.total)) {
      best_feasible = {idx, cp.total, true};
      have_feasible = true;
    }
    if (!have_any || cp.total < best_any.total) {
      best_any = {idx, cp.total, cp.feasible};
      have_any = true;
    }
  }
  return have_feasible ? best_feasible : best_any;
}

DifferenceGrid difference_on_grid(const LinearProfile& lin, const NRootProfile& root,
                                  std::span<const double> grid) {
  DifferenceGrid out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = difference(lin, root, grid[i]);
  return out;
}

void synthesize(const SynthesisPlan& plan, std::span<TraceSample> out) {
  const std::size_t per_cycle = plan.levels.size() * plan.samples_per_level;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t level = (i % per_cycle) / plan.samples_per_level;
    double power = plan.level_power[level];
    if (plan.noise_sigma > 0.0) power += plan.noise_sigma * counter_normal(plan.seed, i);
    out[i] = TraceSample{static_cast<double>(i) * plan.sample_interval, plan.levels[level],
                         power > 0.0 ? power : 0.0};
  }
}

}  // namespace serial

SearchOutcome exhaustive_search(const PlacementInstance& inst, Backend backend) {
  return backend == Backend::serial ? serial::exhaustive_search(inst) : omp::exhaustive_search(inst);
}

DifferenceGrid difference_on_grid(const LinearProfile& lin, const NRootProfile& root,
                                  std::span<const double> grid, Backend backend) {
  return backend == Backend::serial ? serial::difference_on_grid(lin, root, grid)
                                    : omp::difference_on_grid(lin, root, grid);
}

void synthesize(const SynthesisPlan& plan, std::span<TraceSample> out, Backend backend) {
  if (backend == Backend::serial) {
    serial::synthesize(plan, out);
  } else {
    omp::synthesize(plan, out);
  }
}

}  // namespace procwatt::kernels
