#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "procwatt/error.hpp"
#include "procwatt/placement.hpp"

using namespace procwatt;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected procwatt::Error");
  return ErrorCode::io;
}

PlacementProblem worked_problem() {
  return PlacementProblem({{"m1", 1, PowerProfile::linear(9, 0.05), 0.0}, {"m2", 1, PowerProfile::nroot(8, 0.5, 2), 0.0}},
                          {{"f1", 20, "s1"}, {"f2", 20, "s1"}}, {"s1"});
}

PlacementProblem random_problem(std::mt19937_64& rng, std::size_t machines, std::size_t vnfs,
                                std::size_t slices) {
  std::uniform_real_distribution<double> par(1, 12), slope(0.005, 0.2), base(0, 40), share(1, 35);
  std::uniform_int_distribution<int> deg(2, 6);
  std::vector<Machine> ms;
  for (std::size_t m = 0; m < machines; ++m) {
    const PowerProfile prof = (rng() & 1) ? PowerProfile::linear(par(rng), slope(rng))
                                          : PowerProfile::nroot(par(rng), par(rng) * 0.2, deg(rng));
    ms.push_back({"m" + std::to_string(m), 1, prof, base(rng)});
  }
  std::vector<std::string> ss;
  for (std::size_t s = 0; s < slices; ++s) ss.push_back("s" + std::to_string(s));
  std::vector<Vnf> vs;
  for (std::size_t j = 0; j < vnfs; ++j) {
    vs.push_back({"f" + std::to_string(j), share(rng), ss[rng() % slices]});
  }
  return PlacementProblem(ms, vs, ss);
}

oracle::BfResult brute_force(const PlacementProblem& prob) {
  std::vector<oracle::BfMachine> ms;
  for (const auto& m : prob.machines()) ms.push_back({m.profile, m.base_competition});
  std::vector<oracle::BfVnf> vs;
  for (const auto& v : prob.vnfs()) {
    const auto it = std::find(prob.slices().begin(), prob.slices().end(), v.slice_id);
    vs.push_back({v.cpu_share, static_cast<std::size_t>(it - prob.slices().begin())});
  }
  return oracle::BruteForcePlacement(ms, vs, prob.slices().size()).solve();
}

double double_sum(const PlacementProblem& prob, const PlacementResult& res) {
  const auto q = membership_matrix(prob);
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j < prob.vnfs().size(); ++j) {
      total += q[i][j] * res.per_vnf_power.at(prob.vnfs()[j].id);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("vnf_power examples") {
  const auto prob = worked_problem();
  CHECK(vnf_power(prob, {{"f1", "m1"}, {"f2", "m2"}}, "f1").watts == 9.0);
  const auto both = vnf_power(prob, {{"f1", "m2"}, {"f2", "m2"}}, "f2");
  CHECK(both.competition == 20.0);
  CHECK(both.watts == doctest::Approx(10.23606797749979).epsilon(1e-14));
  CHECK(both.within_capacity);

  const PlacementProblem crowded({{"m", 1, PowerProfile::linear(1, 1), 30.0}},
                                 {{"a", 40, "s"}, {"b", 40, "s"}}, {"s"});
  const auto res = evaluate_assignment(crowded, {{"a", "m"}, {"b", "m"}});
  CHECK_FALSE(res.feasible);
  CHECK_FALSE(vnf_power(crowded, {{"a", "m"}, {"b", "m"}}, "a").within_capacity);
}

TEST_CASE("slice_power examples") {
  const PlacementProblem prob({{"m", 1, PowerProfile::linear(0, 0), 0.0}},
                              {{"f1", 1, "slice1"}, {"f2", 1, "slice2"}, {"f3", 1, "slice1"}},
                              {"slice1", "slice2", "slice3"});
  PlacementResult res;
  res.per_vnf_power = {{"f1", 3}, {"f2", 4}, {"f3", 5}};
  res.vnf_slice = {{"f1", "slice1"}, {"f2", "slice2"}, {"f3", "slice1"}};
  res.per_slice_power = {{"slice1", 8}, {"slice2", 4}, {"slice3", 0}};
  res.total_power = 12;
  CHECK(slice_power(res, "slice1") == 8.0);
  CHECK(slice_power(res, "slice3") == 0.0);
  CHECK(code_of([&] { slice_power(res, "nope"); }) == ErrorCode::input);

  const auto p = worked_problem();
  const auto full = place_greedy(p);
  CHECK(slice_power(full, "s1") == full.total_power);
}

TEST_CASE("greedy on the worked instance") {
  const auto res = place_greedy(worked_problem());
  CHECK(res.assignment.at("f1") == "m2");
  CHECK(res.assignment.at("f2") == "m1");
  CHECK(res.total_power == 17.0);
  CHECK(res.feasible);
}

TEST_CASE("exhaustive on the worked instance") {
  const auto prob = worked_problem();
  const auto res = place_exhaustive(prob);
  CHECK(res.total_power == 17.0);
  // Both split assignments cost 17 W; the lexicographically first wins.
  CHECK(res.assignment.at("f1") == "m1");
  CHECK(res.assignment.at("f2") == "m2");
  CHECK(evaluate_assignment(prob, {{"f1", "m1"}, {"f2", "m1"}}).total_power == 20.0);
  CHECK(evaluate_assignment(prob, {{"f1", "m2"}, {"f2", "m2"}}).total_power ==
        doctest::Approx(20.47213595499958).epsilon(1e-14));
}

TEST_CASE("degenerate sizes") {
  const PlacementProblem one({{"only", 1, PowerProfile::nroot(3, 1, 2), 0.0}},
                             {{"a", 10, "s"}, {"b", 10, "s"}, {"c", 10, "s"}}, {"s"});
  for (const auto& res : {place_greedy(one), place_exhaustive(one)}) {
    for (const auto& [v, m] : res.assignment) CHECK(m == "only");
  }
  const PlacementProblem none({{"m", 1, PowerProfile::linear(3, 1), 0.0}}, {}, {"s"});
  const auto g = place_greedy(none);
  CHECK(g.assignment.empty());
  CHECK(g.total_power == 0.0);
  CHECK(place_exhaustive(none).total_power == 0.0);
}

TEST_CASE("exhaustive size limit") {
  std::vector<Vnf> vnfs;
  for (int j = 0; j < 10; ++j) vnfs.push_back({"f" + std::to_string(j), 1, "s"});
  const PlacementProblem big({{"m", 1, PowerProfile::linear(1, 1), 0.0}}, vnfs, {"s"});
  CHECK(code_of([&] { place_exhaustive(big); }) == ErrorCode::size_limit);
  CHECK_NOTHROW(place_exhaustive(big, {.max_vnfs = 10, .max_machines = 4}));
}

TEST_CASE("problem validation") {
  const auto lin = PowerProfile::linear(1, 1);
  CHECK(code_of([&] { PlacementProblem({{"m", 1, lin, 0}, {"m", 1, lin, 0}}, {}, {"s"}); }) == ErrorCode::input);
  CHECK(code_of([&] { PlacementProblem({{"m", 1, lin, 0}}, {{"f", 5, "x"}}, {"s"}); }) == ErrorCode::input);
  CHECK(code_of([&] { PlacementProblem({}, {{"f", 5, "s"}}, {"s"}); }) == ErrorCode::input);
  CHECK(code_of([&] { PlacementProblem({{"m", 0, lin, 0}}, {}, {"s"}); }) == ErrorCode::validation);
  CHECK(code_of([&] { PlacementProblem({{"m", 1, lin, 120}}, {}, {"s"}); }) == ErrorCode::validation);
  CHECK(code_of([&] { PlacementProblem({{"m", 1, lin, 0}}, {{"f", 0, "s"}}, {"s"}); }) == ErrorCode::validation);
}

TEST_CASE("exhaustive matches the brute-force oracle and dominates greedy") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const auto prob = random_problem(rng, 1 + rng() % 3, rng() % 7, 1 + rng() % 3);
    const auto ex = place_exhaustive(prob);
    const auto bf = brute_force(prob);
    CHECK(ex.total_power == bf.total);
    CHECK(ex.feasible == bf.feasible);
    for (std::size_t j = 0; j < prob.vnfs().size(); ++j) {
      CHECK(ex.assignment.at(prob.vnfs()[j].id) == prob.machines()[bf.machine_of[j]].id);
    }
    const auto gr = place_greedy(prob);
    if (gr.feasible) {
      CHECK(ex.feasible);
      CHECK(ex.total_power <= gr.total_power);
    }
    for (const auto* res : {&ex, &gr}) {
      CHECK(oracle::rel_err(double_sum(prob, *res), res->total_power) <= 1e-9);
      double vnf_sum = 0.0;
      for (const auto& [id, w] : res->per_vnf_power) vnf_sum += w;
      CHECK(std::fabs(vnf_sum - res->total_power) <= 1e-9 * std::max(1.0, res->total_power));
      CHECK(res->assignment.size() == prob.vnfs().size());
    }
  }
}

TEST_CASE("exhaustive backends agree") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto prob = random_problem(rng, 4, 7, 2);
    const auto s = place_exhaustive(prob, {}, kernels::Backend::serial);
    const auto o = place_exhaustive(prob, {}, kernels::Backend::openmp);
    CHECK(s.assignment == o.assignment);
    CHECK(s.total_power == o.total_power);
  }
}

TEST_CASE("renaming machines or VNFs keeps the optimum") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto prob = random_problem(rng, 3, 5, 2);
    const double best = place_exhaustive(prob).total_power;

    auto machines = prob.machines();
    auto vnfs = prob.vnfs();
    std::vector<std::string> names{"zeta", "alpha", "mu"};
    std::shuffle(names.begin(), names.end(), rng);
    for (std::size_t m = 0; m < machines.size(); ++m) machines[m].id = names[m];
    for (std::size_t j = 0; j < vnfs.size(); ++j) vnfs[j].id = "v" + std::to_string(9 - j);
    const PlacementProblem renamed(machines, vnfs, prob.slices());
    CHECK(oracle::rel_err(place_exhaustive(renamed).total_power, best) <= 1e-12);
  }
}

TEST_CASE("adding a machine never raises the optimum") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto prob = random_problem(rng, 2, 5, 2);
    const auto before = place_exhaustive(prob);
    auto machines = prob.machines();
    machines.push_back({"zz", 1, PowerProfile::nroot(5, 0.8, 3), 10.0});
    const PlacementProblem more(machines, prob.vnfs(), prob.slices());
    const auto after = place_exhaustive(more);
    if (before.feasible) {
      CHECK(after.feasible);
      CHECK(after.total_power <= before.total_power);
    }
  }
}

TEST_CASE("identical linear machines: total depends only on per-machine share sums") {
  const auto lin = PowerProfile::linear(4.0, 0.125);
  std::vector<Machine> ms{{"m0", 1, lin, 0}, {"m1", 1, lin, 0}, {"m2", 1, lin, 0}};
  // Shares chosen so that several assignments produce the same multiset of sums.
  const std::vector<Vnf> vs{{"a", 8, "s"}, {"b", 8, "s"}, {"c", 16, "s"}, {"d", 4, "s"}, {"e", 12, "s"}};
  const PlacementProblem prob(ms, vs, {"s"});
  std::map<std::multiset<double>, double> seen;
  const std::size_t combos = 3 * 3 * 3 * 3 * 3;
  for (std::size_t idx = 0; idx < combos; ++idx) {
    Assignment asg;
    std::array<double, 3> sums{};
    std::array<int, 3> counts{};
    std::size_t rest = idx;
    for (const auto& v : vs) {
      const std::size_t m = rest % 3;
      rest /= 3;
      asg[v.id] = ms[m].id;
      sums[m] += v.cpu_share;
      ++counts[m];
    }
    // A machine's VNFs pay (k - 1) times its share sum plus k intercepts, so
    // the key is the multiset of (sum, count) pairs folded into one number.
    std::multiset<double> key;
    for (int m = 0; m < 3; ++m) key.insert(sums[m] * 1000.0 + counts[m]);
    const double total = evaluate_assignment(prob, asg).total_power;
    const auto [it, fresh] = seen.emplace(key, total);
    if (!fresh) CHECK(it->second == total);
  }
  CHECK(seen.size() > 1);
}

TEST_CASE("problem and result JSON") {
  const auto prob = worked_problem();
  const nlohmann::json j = prob;
  const auto back = placement_problem_from_json(nlohmann::json::parse(j.dump()));
  CHECK(nlohmann::json(back).dump() == j.dump());
  const nlohmann::json r = place_exhaustive(prob);
  for (const char* key : {"assignment", "per_vnf_power", "per_slice_power", "total_power", "feasible"}) {
    CHECK(r.contains(key));
  }
  CHECK(code_of([] { placement_problem_from_json(nlohmann::json::parse(R"({"machines":[]})")); }) ==
        ErrorCode::format);
}
