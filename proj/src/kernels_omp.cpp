#include <omp.h>

#include <cstdint>
#include <limits>

#include "procwatt/analysis.hpp"
#include "procwatt/kernels.hpp"

namespace procwatt::kernels::omp {

namespace {

struct Candidate {
  std::uint64_t index = 0;
  double total = std::numeric_limits<double>::infinity();
  bool valid = false;
  bool feasible = false;
};

// Strict (total, index) order; the enumeration index encodes the
// lexicographic assignment order, so the reduction is schedule-independent.
bool better(const Candidate& a, const Candidate& b) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  return a.total < b.total || (a.total == b.total && a.index < b.index);
}

}  // namespace

SearchOutcome exhaustive_search(const PlacementInstance& inst) {
  const std::uint64_t count = configuration_count(inst.machine_count(), inst.vnf_count());
  Candidate best_feasible;
  Candidate best_any;

#pragma omp parallel
  {
    std::vector<std::size_t> machine_of(inst.vnf_count());
    std::vector<double> per_vnf(inst.vnf_count());
    std::vector<double> per_slice(inst.slice_count);
    Candidate local_feasible;
    Candidate local_any;

#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      decode_assignment(idx, inst.machine_count(), machine_of);
      const auto cp = configuration_power(inst, machine_of, per_vnf, per_slice);
      const Candidate c{idx, cp.total, true, cp.feasible};
      if (cp.feasible && better(c, local_feasible)) local_feasible = c;
      if (better(c, local_any)) local_any = c;
    }

#pragma omp critical(procwatt_exhaustive_reduce)
    {
      if (better(local_feasible, best_feasible)) best_feasible = local_feasible;
      if (better(local_any, best_any)) best_any = local_any;
    }
  }

  const Candidate& pick = best_feasible.valid ? best_feasible : best_any;
  return SearchOutcome{pick.index, pick.total, pick.feasible};
}

DifferenceGrid difference_on_grid(const LinearProfile& lin, const NRootProfile& root,
                                  std::span<const double> grid) {
  DifferenceGrid out(grid.size());
  const auto n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = difference(lin, root, grid[static_cast<std::size_t>(i)]);
  }
  return out;
}

void synthesize(const SynthesisPlan& plan, std::span<TraceSample> out) {
  const std::size_t per_cycle = plan.levels.size() * plan.samples_per_level;
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const std::size_t level = (i % per_cycle) / plan.samples_per_level;
    double power = plan.level_power[level];
    if (plan.noise_sigma > 0.0) power += plan.noise_sigma * counter_normal(plan.seed, i);
    out[i] = TraceSample{static_cast<double>(i) * plan.sample_interval, plan.levels[level],
                         power > 0.0 ? power : 0.0};
  }
}

}  // namespace procwatt::kernels::omp
