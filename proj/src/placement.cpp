#include "procwatt/placement.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "procwatt/analysis.hpp"
#include "procwatt/error.hpp"

namespace procwatt {

namespace {

template <class T>
void require_unique_ids(const std::vector<T>& items, const char* what) {
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i - 1].id == items[i].id) {
      throw Error(ErrorCode::input, std::string("duplicate ") + what + " id '" + items[i].id + "'");
    }
  }
}

PlacementResult build_result(const PlacementProblem& problem, std::span<const std::size_t> machine_of) {
  const auto& inst = problem.instance();
  std::vector<double> per_vnf(inst.vnf_count());
  std::vector<double> per_slice(inst.slice_count);
  const auto cp = kernels::configuration_power(inst, machine_of, per_vnf, per_slice);

  PlacementResult r;
  r.total_power = cp.total;
  r.feasible = cp.feasible;
  for (std::size_t j = 0; j < inst.vnf_count(); ++j) {
    const auto& vnf = problem.vnfs()[j];
    r.assignment[vnf.id] = problem.machines()[machine_of[j]].id;
    r.vnf_slice[vnf.id] = vnf.slice_id;
    r.per_vnf_power[vnf.id] = per_vnf[j];
  }
  for (std::size_t i = 0; i < inst.slice_count; ++i) r.per_slice_power[problem.slices()[i]] = per_slice[i];
  return r;
}

std::vector<std::size_t> resolve(const PlacementProblem& problem, const Assignment& assignment) {
  std::vector<std::size_t> machine_of(problem.vnfs().size());
  if (assignment.size() != problem.vnfs().size()) {
    throw Error(ErrorCode::input, "assignment must place every VNF exactly once");
  }
  for (const auto& [vnf_id, machine_id] : assignment) {
    machine_of[problem.vnf_index(vnf_id)] = problem.machine_index(machine_id);
  }
  return machine_of;
}

}  // namespace

PlacementProblem::PlacementProblem(std::vector<Machine> machines, std::vector<Vnf> vnfs,
                                   std::vector<std::string> slices)
    : machines_(std::move(machines)), vnfs_(std::move(vnfs)), slices_(std::move(slices)) {
  auto by_id = [](const auto& l, const auto& r) { return l.id < r.id; };
  std::sort(machines_.begin(), machines_.end(), by_id);
  std::sort(vnfs_.begin(), vnfs_.end(), by_id);
  std::sort(slices_.begin(), slices_.end());
  require_unique_ids(machines_, "machine");
  require_unique_ids(vnfs_, "vnf");
  if (std::adjacent_find(slices_.begin(), slices_.end()) != slices_.end()) {
    throw Error(ErrorCode::input, "duplicate slice id");
  }
  if (machines_.empty() && !vnfs_.empty()) {
    throw Error(ErrorCode::input, "VNFs to place but no machines");
  }
  for (const auto& m : machines_) {
    if (m.core_count < 1) throw Error(ErrorCode::validation, "machine '" + m.id + "' needs core_count >= 1");
    if (!(m.base_competition >= 0.0 && m.base_competition <= 100.0)) {
      throw Error(ErrorCode::validation, "machine '" + m.id + "' base_competition outside [0, 100]");
    }
    instance_.profiles.push_back(m.profile);
    instance_.base_competition.push_back(m.base_competition);
  }
  for (const auto& f : vnfs_) {
    if (!(f.cpu_share > 0.0 && f.cpu_share <= 100.0)) {
      throw Error(ErrorCode::validation, "vnf '" + f.id + "' cpu_share outside (0, 100]");
    }
    const auto it = std::lower_bound(slices_.begin(), slices_.end(), f.slice_id);
    if (it == slices_.end() || *it != f.slice_id) {
      throw Error(ErrorCode::input, "vnf '" + f.id + "' references unknown slice '" + f.slice_id + "'");
    }
    instance_.shares.push_back(f.cpu_share);
    instance_.slice_of.push_back(static_cast<std::size_t>(it - slices_.begin()));
  }
  instance_.slice_count = slices_.size();
}

std::size_t PlacementProblem::machine_index(std::string_view id) const {
  const auto it = std::lower_bound(machines_.begin(), machines_.end(), id,
                                   [](const Machine& m, std::string_view v) { return m.id < v; });
  if (it == machines_.end() || it->id != id) {
    throw Error(ErrorCode::input, "unknown machine '" + std::string(id) + "'");
  }
  return static_cast<std::size_t>(it - machines_.begin());
}

std::size_t PlacementProblem::vnf_index(std::string_view id) const {
  const auto it = std::lower_bound(vnfs_.begin(), vnfs_.end(), id,
                                   [](const Vnf& f, std::string_view v) { return f.id < v; });
  if (it == vnfs_.end() || it->id != id) {
    throw Error(ErrorCode::input, "unknown vnf '" + std::string(id) + "'");
  }
  return static_cast<std::size_t>(it - vnfs_.begin());
}

VnfPower vnf_power(const PlacementProblem& problem, const Assignment& assignment, std::string_view vnf_id) {
  const auto machine_of = resolve(problem, assignment);
  const std::size_t j = problem.vnf_index(vnf_id);
  const auto& inst = problem.instance();
  VnfPower out;
  out.competition = kernels::faced_competition(inst, machine_of, j);
  out.watts = evaluate(inst.profiles[machine_of[j]], out.competition);
  out.within_capacity = out.competition + inst.shares[j] <= 100.0 + kernels::kCapacitySlack;
  return out;
}

PlacementResult evaluate_assignment(const PlacementProblem& problem, const Assignment& assignment) {
  return build_result(problem, resolve(problem, assignment));
}

double slice_power(const PlacementResult& result, std::string_view slice_id) {
  if (result.per_slice_power.find(std::string(slice_id)) == result.per_slice_power.end()) {
    throw Error(ErrorCode::input, "unknown slice '" + std::string(slice_id) + "'");
  }
  double total = 0.0;
  for (const auto& [vnf_id, slice] : result.vnf_slice) {
    if (slice == slice_id) total += result.per_vnf_power.at(vnf_id);
  }
  return total;
}

std::vector<std::vector<int>> membership_matrix(const PlacementProblem& problem) {
  const auto& inst = problem.instance();
  std::vector<std::vector<int>> q(inst.slice_count, std::vector<int>(inst.vnf_count(), 0));
  for (std::size_t j = 0; j < inst.vnf_count(); ++j) q[inst.slice_of[j]][j] = 1;
  return q;
}

PlacementResult place_greedy(const PlacementProblem& problem) {
  const auto& inst = problem.instance();
  const auto& machines = problem.machines();
  std::vector<double> load(inst.machine_count(), 0.0);  // shares already placed per machine
  std::vector<std::size_t> machine_of(inst.vnf_count(), 0);

  for (std::size_t j = 0; j < inst.vnf_count(); ++j) {
    std::map<std::string, PowerProfile> profiles;
    std::map<std::string, double> competition;
    for (int pass = 0; pass < 2 && profiles.empty(); ++pass) {
      for (std::size_t m = 0; m < inst.machine_count(); ++m) {
        const double p = inst.base_competition[m] + load[m];
        const bool fits = p + inst.shares[j] <= 100.0 + kernels::kCapacitySlack;
        if (pass == 0 && !fits) continue;
        profiles.emplace(machines[m].id, inst.profiles[m]);
        competition.emplace(machines[m].id, p);
      }
    }
    const std::size_t chosen = problem.machine_index(best_machine(profiles, competition));
    machine_of[j] = chosen;
    load[chosen] += inst.shares[j];
  }
  return build_result(problem, machine_of);
}

PlacementResult place_exhaustive(const PlacementProblem& problem, const ExhaustiveLimits& limits,
                                 kernels::Backend backend) {
  const auto& inst = problem.instance();
  if (inst.vnf_count() > limits.max_vnfs || inst.machine_count() > limits.max_machines) {
    throw Error(ErrorCode::size_limit,
                "exhaustive search limited to " + std::to_string(limits.max_vnfs) + " VNFs x " +
                    std::to_string(limits.max_machines) + " machines, instance has " +
                    std::to_string(inst.vnf_count()) + " x " + std::to_string(inst.machine_count()));
  }
  if (kernels::configuration_count(inst.machine_count(), inst.vnf_count()) == 0) {
    throw Error(ErrorCode::size_limit, "configuration count overflows 64 bits");
  }
  const auto best = kernels::exhaustive_search(inst, backend);
  std::vector<std::size_t> machine_of(inst.vnf_count());
  kernels::decode_assignment(best.index, inst.machine_count(), machine_of);
  return build_result(problem, machine_of);
}

// --- JSON ------------------------------------------------------------------

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::format, where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

std::string string_field(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_string()) throw Error(ErrorCode::format, where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

double number_field(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number()) throw Error(ErrorCode::format, where + ": '" + key + "' must be a number");
  return v.get<double>();
}

const nlohmann::json& array_field(const nlohmann::json& j, const char* key) {
  const auto& v = field(j, key, "problem");
  if (!v.is_array()) throw Error(ErrorCode::format, std::string("problem: '") + key + "' must be an array");
  return v;
}

}  // namespace

PlacementProblem placement_problem_from_json(const nlohmann::json& j) {
  std::vector<Machine> machines;
  for (const auto& m : array_field(j, "machines")) {
    Machine machine;
    machine.id = string_field(m, "id", "machine");
    const std::string where = "machine '" + machine.id + "'";
    if (m.contains("core_count")) {
      if (!m.at("core_count").is_number_integer()) {
        throw Error(ErrorCode::format, where + ": core_count must be an integer");
      }
      machine.core_count = m.at("core_count").get<int>();
    }
    machine.profile = profile_from_json(field(m, "profile", where));
    if (m.contains("base_competition")) machine.base_competition = number_field(m, "base_competition", where);
    machines.push_back(std::move(machine));
  }
  std::vector<Vnf> vnfs;
  for (const auto& f : array_field(j, "vnfs")) {
    Vnf vnf;
    vnf.id = string_field(f, "id", "vnf");
    const std::string where = "vnf '" + vnf.id + "'";
    vnf.cpu_share = number_field(f, "cpu_share", where);
    vnf.slice_id = string_field(f, "slice_id", where);
    vnfs.push_back(std::move(vnf));
  }
  std::vector<std::string> slices;
  for (const auto& s : array_field(j, "slices")) {
    if (!s.is_string()) throw Error(ErrorCode::format, "problem: slice ids must be strings");
    slices.push_back(s.get<std::string>());
  }
  return PlacementProblem(std::move(machines), std::move(vnfs), std::move(slices));
}

void to_json(nlohmann::json& j, const PlacementProblem& problem) {
  nlohmann::json machines = nlohmann::json::array();
  for (const auto& m : problem.machines()) {
    machines.push_back({{"id", m.id},
                        {"core_count", m.core_count},
                        {"profile", m.profile},
                        {"base_competition", m.base_competition}});
  }
  nlohmann::json vnfs = nlohmann::json::array();
  for (const auto& f : problem.vnfs()) {
    vnfs.push_back({{"id", f.id}, {"cpu_share", f.cpu_share}, {"slice_id", f.slice_id}});
  }
  j = nlohmann::json{{"machines", machines}, {"vnfs", vnfs}, {"slices", problem.slices()}};
}

void to_json(nlohmann::json& j, const PlacementResult& result) {
  j = nlohmann::json{{"assignment", result.assignment},
                     {"per_vnf_power", result.per_vnf_power},
                     {"per_slice_power", result.per_slice_power},
                     {"total_power", result.total_power},
                     {"feasible", result.feasible}};
}

}  // namespace procwatt
