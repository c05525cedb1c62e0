#pragma once

// Data-parallel inner loops. Each kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp; both produce
// bit-identical results, which tests/test_kernels.cpp checks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "procwatt/fitting.hpp"
#include "procwatt/power_model.hpp"

namespace procwatt::kernels {

enum class Backend { serial, openmp };

// --- placement --------------------------------------------------------------

/// Index-based placement instance. Machines, VNFs and slices are in
/// canonical id order.
struct PlacementInstance {
  std::vector<PowerProfile> profiles;       // per machine
  std::vector<double> base_competition;     // per machine, %
  std::vector<double> shares;               // per VNF, %
  std::vector<std::size_t> slice_of;        // per VNF, slice index
  std::size_t slice_count = 0;

  std::size_t machine_count() const noexcept { return profiles.size(); }
  std::size_t vnf_count() const noexcept { return shares.size(); }
};

/// Slack on the 100 % capacity bound, absorbing rounding in share sums.
inline constexpr double kCapacitySlack = 1e-9;

struct ConfigurationPower {
  double total = 0.0;
  bool feasible = true;
};

/// Competition faced by VNF j when placed per machine_of: base load of its
/// machine plus the shares of the other co-located VNFs, summed in VNF order.
double faced_competition(const PlacementInstance& inst, std::span<const std::size_t> machine_of,
                         std::size_t j);

/// Per-VNF power W(f_j), per-slice power P(s_i) (VNF order) and the total
/// P'(S) as the sum of slice powers (slice order). The scratch spans must be
/// sized vnf_count() and slice_count.
ConfigurationPower configuration_power(const PlacementInstance& inst,
                                       std::span<const std::size_t> machine_of,
                                       std::span<double> per_vnf, std::span<double> per_slice);

struct SearchOutcome {
  std::uint64_t index = 0;  // assignment encoded base-M, VNF 0 most significant
  double total = 0.0;
  bool feasible = false;
};

/// Decodes an enumeration index into per-VNF machine indices.
void decode_assignment(std::uint64_t index, std::size_t machines, std::span<std::size_t> machine_of);

/// Number of configurations machines^vnfs, or 0 if it does not fit in 64 bits.
std::uint64_t configuration_count(std::size_t machines, std::size_t vnfs);

// --- crossover scan ---------------------------------------------------------

/// D(p) = W_lin(p) - W_rt(p) at every grid point.
using DifferenceGrid = std::vector<double>;

// --- trace synthesis --------------------------------------------------------

struct SynthesisPlan {
  std::vector<double> levels;       // competition per level, one cycle
  std::vector<double> level_power;  // noiseless W at each level
  std::size_t samples_per_level = 0;
  std::size_t cycles = 0;
  double sample_interval = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  std::size_t sample_count() const noexcept { return cycles * levels.size() * samples_per_level; }
};

/// Standard normal variate for (seed, counter), via SplitMix64 + Box-Muller.
/// Depends only on its arguments, so samples can be generated in any order.
double counter_normal(std::uint64_t seed, std::uint64_t counter) noexcept;

namespace serial {
/// Best feasible configuration by (total, index); if none is feasible, the
/// best infeasible one with feasible = false.
SearchOutcome exhaustive_search(const PlacementInstance& inst);
DifferenceGrid difference_on_grid(const LinearProfile& lin, const NRootProfile& root,
                                  std::span<const double> grid);
void synthesize(const SynthesisPlan& plan, std::span<TraceSample> out);
}  // namespace serial

namespace omp {
SearchOutcome exhaustive_search(const PlacementInstance& inst);
DifferenceGrid difference_on_grid(const LinearProfile& lin, const NRootProfile& root,
                                  std::span<const double> grid);
void synthesize(const SynthesisPlan& plan, std::span<TraceSample> out);
}  // namespace omp

SearchOutcome exhaustive_search(const PlacementInstance& inst, Backend backend);
DifferenceGrid difference_on_grid(const LinearProfile& lin, const NRootProfile& root,
                                  std::span<const double> grid, Backend backend);
void synthesize(const SynthesisPlan& plan, std::span<TraceSample> out, Backend backend);

}  // namespace procwatt::kernels
