#pragma once

// Energy-aware VNF placement. A VNF's power is its machine's profile
// evaluated at the competition it faces there; slice power is the sum over
// member VNFs and the objective is the total over all slices.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "procwatt/kernels.hpp"
#include "procwatt/power_model.hpp"

namespace procwatt {

struct Machine {
  std::string id;
  int core_count = 1;
  PowerProfile profile = LinearProfile{};
  double base_competition = 0.0;  // pre-existing load on the machine, %
};

struct Vnf {
  std::string id;
  double cpu_share = 0.0;  // CPU % the VNF itself consumes
  std::string slice_id;
};

/// Validated problem. Machines, VNFs and slices are stored sorted by id;
/// this canonical order drives greedy processing, enumeration order and
/// tie-breaking.
class PlacementProblem {
 public:
  PlacementProblem(std::vector<Machine> machines, std::vector<Vnf> vnfs,
                   std::vector<std::string> slices);

  const std::vector<Machine>& machines() const noexcept { return machines_; }
  const std::vector<Vnf>& vnfs() const noexcept { return vnfs_; }
  const std::vector<std::string>& slices() const noexcept { return slices_; }

  std::size_t machine_index(std::string_view id) const;
  std::size_t vnf_index(std::string_view id) const;

  /// Index-based form used by the kernels.
  const kernels::PlacementInstance& instance() const noexcept { return instance_; }

 private:
  std::vector<Machine> machines_;
  std::vector<Vnf> vnfs_;
  std::vector<std::string> slices_;
  kernels::PlacementInstance instance_;
};

/// vnf-id -> machine-id
using Assignment = std::map<std::string, std::string>;

struct PlacementResult {
  Assignment assignment;
  std::map<std::string, std::string> vnf_slice;      // vnf-id -> slice-id
  std::map<std::string, double> per_vnf_power;       // W(f_j)
  std::map<std::string, double> per_slice_power;     // P(s_i)
  double total_power = 0.0;                          // P'(S)
  bool feasible = true;
};

struct VnfPower {
  double competition = 0.0;  // base load + shares of co-located VNFs
  double watts = 0.0;
  bool within_capacity = true;  // competition + own share <= 100
};

/// Power of one VNF under a complete assignment.
VnfPower vnf_power(const PlacementProblem& problem, const Assignment& assignment,
                   std::string_view vnf_id);

/// Evaluates a complete assignment: per-VNF, per-slice and total power.
PlacementResult evaluate_assignment(const PlacementProblem& problem, const Assignment& assignment);

/// Sum of per-VNF power over the slice's members. Throws Error(input) for a
/// slice the result does not know.
double slice_power(const PlacementResult& result, std::string_view slice_id);

/// q[i][j] = 1 when VNF j (canonical order) belongs to slice i.
std::vector<std::vector<int>> membership_matrix(const PlacementProblem& problem);

/// VNFs in id order, each sent to the machine where it would draw least
/// power given the VNFs placed so far, preferring machines with capacity
/// left. Powers are then recomputed on the final configuration.
PlacementResult place_greedy(const PlacementProblem& problem);

struct ExhaustiveLimits {
  std::size_t max_vnfs = 8;
  std::size_t max_machines = 4;
};

/// Minimum-total assignment over all machines^vnfs configurations,
/// skipping capacity violations; ties go to the lexicographically first
/// assignment. Throws Error(size_limit) when the instance exceeds limits.
PlacementResult place_exhaustive(const PlacementProblem& problem, const ExhaustiveLimits& limits = {},
                                 kernels::Backend backend = kernels::Backend::openmp);

PlacementProblem placement_problem_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const PlacementProblem& problem);
void to_json(nlohmann::json& j, const PlacementResult& result);

}  // namespace procwatt
