#include "cli_app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "procwatt/analysis.hpp"
#include "procwatt/error.hpp"
#include "procwatt/fitting.hpp"
#include "procwatt/placement.hpp"
#include "procwatt/power_model.hpp"
#include "procwatt/simulator.hpp"
#include "procwatt/trace_io.hpp"

namespace procwatt::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
};

// Write-to-temp then rename, so a failed command never leaves a partial file.
void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-procwatt";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io, "cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::io, "write failure on '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot move report into '" + path + "'");
  }
}

void emit(const Globals& g, const std::string& content, std::ostream& out) {
  if (g.out_path.empty()) {
    out << content;
  } else {
    write_file_atomic(g.out_path, content);
  }
}

std::ostream& info_stream(const Globals& g, std::ostream& out, std::ostream& err) {
  return g.out_path.empty() ? err : out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::input, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::format, path + ": " + e.what());
  }
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// --- fit ----------------------------------------------------------------------

struct FitOptions {
  std::string trace_path;
  double bin_width = kDefaultBinWidth;
  int n_min = kDefaultMinRoot;
  int n_max = kDefaultMaxRoot;
  double tie_tolerance = kDefaultTieTolerance;
  bool raw = false;
  std::string columns;
  std::string plot_path;
};

std::string fit_plot_csv(const std::vector<AggregatedPoint>& points, const ModelSelection& sel) {
  std::ostringstream csv;
  csv << "competition,observed_median,fitted_linear,fitted_nroot\n";
  for (const auto& pt : points) {
    csv << format_double(pt.competition) << ',' << format_double(pt.power) << ','
        << format_double(evaluate(sel.linear_report.profile, pt.competition)) << ','
        << format_double(evaluate(sel.nroot_report.profile, pt.competition)) << '\n';
  }
  return csv.str();
}

int cmd_fit(const Globals& g, const FitOptions& o, std::ostream& out) {
  const ColumnMap columns = o.columns.empty() ? ColumnMap{} : parse_column_map(o.columns);
  const auto trace = read_trace_file(o.trace_path, columns);
  if (trace.samples.empty()) throw Error(ErrorCode::insufficient_data, "trace has no samples");
  const auto points = o.raw ? raw_points(trace.samples) : aggregate(trace.samples, o.bin_width);
  const auto grid = root_grid(o.n_min, o.n_max);
  const auto selection = select_model(fit_linear(points), fit_nroot(points, grid), o.tie_tolerance);
  const auto csv = fit_plot_csv(points, selection);
  if (!o.plot_path.empty()) write_file_atomic(o.plot_path, csv);
  emit(g, g.format == "csv" ? csv : dump(selection), out);
  return 0;
}

// --- crossover ------------------------------------------------------------------

struct CrossoverOptionsCli {
  std::string profile_a;
  std::string profile_b;
  double p_max = 100.0;
  std::size_t cells = 1024;
  std::string plot_path;
};

int cmd_crossover(const Globals& g, const CrossoverOptionsCli& o, std::ostream& out) {
  const auto a = profile_from_json(read_json_file(o.profile_a));
  const auto b = profile_from_json(read_json_file(o.profile_b));
  if (!a.is_linear() || !b.is_nroot()) {
    throw Error(ErrorCode::profile_kind, "crossover needs profile A linear and profile B nroot");
  }
  const auto& lin = a.as_linear();
  const auto& root = b.as_nroot();
  CrossoverOptions opts;
  opts.cells = o.cells;
  const auto result = find_crossovers(lin, root, o.p_max, opts);

  std::ostringstream csv;
  csv << "p,w_lin,w_rt,d\n";
  for (const auto& row : crossover_plot(lin, root, o.p_max, o.cells)) {
    csv << format_double(row.p) << ',' << format_double(row.w_lin) << ',' << format_double(row.w_rt)
        << ',' << format_double(row.d) << '\n';
  }
  if (!o.plot_path.empty()) write_file_atomic(o.plot_path, csv.str());
  emit(g, g.format == "csv" ? csv.str() : dump(result), out);
  return 0;
}

// --- place -------------------------------------------------------------------------

struct PlaceOptions {
  std::string problem_path;
  std::string strategy = "greedy";
  std::size_t max_vnfs = 8;
  std::size_t max_machines = 4;
};

int cmd_place(const Globals& g, const PlaceOptions& o, std::ostream& out, std::ostream& err) {
  const auto problem = placement_problem_from_json(read_json_file(o.problem_path));
  const auto result = o.strategy == "exhaustive"
                          ? place_exhaustive(problem, ExhaustiveLimits{o.max_vnfs, o.max_machines})
                          : place_greedy(problem);
  if (g.format == "csv") {
    std::ostringstream csv;
    csv << "vnf_id,machine_id,slice_id,power_w\n";
    for (const auto& [vnf, machine] : result.assignment) {
      csv << vnf << ',' << machine << ',' << result.vnf_slice.at(vnf) << ','
          << format_double(result.per_vnf_power.at(vnf)) << '\n';
    }
    emit(g, csv.str(), out);
  } else {
    emit(g, dump(result), out);
  }
  auto& info = info_stream(g, out, err);
  for (const auto& [slice, watts] : result.per_slice_power) {
    info << "slice " << slice << ": " << format_double(watts) << " W\n";
  }
  info << "total: " << format_double(result.total_power) << " W"
       << (result.feasible ? "" : " (capacity exceeded)") << '\n';
  return 0;
}

// --- simulate ---------------------------------------------------------------------

struct SimulateOptions {
  std::string profile_path;
  std::string config_path;
  std::optional<double> start, step, dwell, interval, q, sigma;
  std::optional<std::size_t> cycles;
};

int cmd_simulate(const Globals& g, const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const auto truth = profile_from_json(read_json_file(o.profile_path));
  ProtocolConfig config;
  if (!o.config_path.empty()) config = protocol_config_from_json(read_json_file(o.config_path));
  if (o.start) config.start_pct = *o.start;
  if (o.step) config.step_pct = *o.step;
  if (o.dwell) config.dwell_seconds = *o.dwell;
  if (o.interval) config.sample_interval_seconds = *o.interval;
  if (o.q) config.baseline_load_q = *o.q;
  if (o.sigma) config.noise_sigma = *o.sigma;
  if (o.cycles) config.cycles = *o.cycles;
  if (g.seed) config.seed = *g.seed;

  const auto trace = generate_trace(config, truth);
  std::ostringstream csv;
  write_trace(trace, csv);
  emit(g, csv.str(), out);
  info_stream(g, out, err) << "samples: " << trace.samples.size() << '\n';
  return 0;
}

// --- energy ------------------------------------------------------------------------

int cmd_energy(const Globals& g, const std::string& trace_path, const std::string& columns_spec,
               std::ostream& out) {
  const ColumnMap columns = columns_spec.empty() ? ColumnMap{} : parse_column_map(columns_spec);
  const auto trace = read_trace_file(trace_path, columns);
  std::vector<EnergySample> samples;
  samples.reserve(trace.samples.size());
  for (const auto& s : trace.samples) samples.push_back({s.t, s.power});
  const double joules = integrate_energy(samples);
  const double duration = samples.back().t - samples.front().t;
  const double mean_watts = joules / duration;
  if (g.format == "csv") {
    emit(g,
         "energy_j,mean_power_w,duration_s,samples\n" + format_double(joules) + ',' +
             format_double(mean_watts) + ',' + format_double(duration) + ',' +
             std::to_string(samples.size()) + '\n',
         out);
  } else {
    emit(g,
         dump({{"energy_j", joules},
               {"mean_power_w", mean_watts},
               {"duration_s", duration},
               {"samples", samples.size()}}),
         out);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Process power under CPU competition: simulate, fit, analyze, place", "procwatt"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--out", g.out_path, "Write the report to this file instead of stdout");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (simulate)");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit linear and n-root profiles to a trace");
  fit_cmd->add_option("trace", fit.trace_path, "Trace CSV")->required();
  fit_cmd->add_option("--bin-width", fit.bin_width, "Competition bin width, %");
  fit_cmd->add_option("--n-min", fit.n_min, "Smallest root degree tried");
  fit_cmd->add_option("--n-max", fit.n_max, "Largest root degree tried");
  fit_cmd->add_option("--tie-tolerance", fit.tie_tolerance, "Adjusted R² margin reported as mixed");
  fit_cmd->add_flag("--raw", fit.raw, "Fit raw samples instead of binned medians");
  fit_cmd->add_option("--columns", fit.columns, "Column names: timestamp,competition,power");
  fit_cmd->add_option("--plot", fit.plot_path, "Also write plot CSV here");

  CrossoverOptionsCli cross;
  auto* cross_cmd = app.add_subcommand("crossover", "Crossovers between a linear and an n-root profile");
  cross_cmd->add_option("profile_a", cross.profile_a, "Linear profile JSON")->required();
  cross_cmd->add_option("profile_b", cross.profile_b, "N-root profile JSON")->required();
  cross_cmd->add_option("--p-max", cross.p_max, "Upper end of the competition domain, %");
  cross_cmd->add_option("--cells", cross.cells, "Scan grid cells");
  cross_cmd->add_option("--plot", cross.plot_path, "Also write plot CSV here");

  PlaceOptions place;
  auto* place_cmd = app.add_subcommand("place", "Place VNFs on machines minimizing total power");
  place_cmd->add_option("problem", place.problem_path, "Placement problem JSON")->required();
  place_cmd->add_option("--strategy", place.strategy, "greedy or exhaustive")
      ->check(CLI::IsMember({"greedy", "exhaustive"}));
  place_cmd->add_option("--max-vnfs", place.max_vnfs, "Exhaustive search VNF limit");
  place_cmd->add_option("--max-machines", place.max_machines, "Exhaustive search machine limit");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic gradual-increase trace");
  sim_cmd->add_option("--profile", sim.profile_path, "Ground-truth profile JSON")->required();
  sim_cmd->add_option("--config", sim.config_path, "Protocol config JSON");
  sim_cmd->add_option("--start", sim.start, "First competition level, %");
  sim_cmd->add_option("--step", sim.step, "Competition step, %");
  sim_cmd->add_option("--dwell", sim.dwell, "Seconds per level");
  sim_cmd->add_option("--interval", sim.interval, "Seconds between samples");
  sim_cmd->add_option("--cycles", sim.cycles, "Ramp repetitions");
  sim_cmd->add_option("--q", sim.q, "Load of the observed process, %");
  sim_cmd->add_option("--sigma", sim.sigma, "Noise standard deviation, W");

  std::string energy_trace;
  std::string energy_columns;
  auto* energy_cmd = app.add_subcommand("energy", "Integrate a trace's power over time");
  energy_cmd->add_option("trace", energy_trace, "Trace CSV")->required();
  energy_cmd->add_option("--columns", energy_columns, "Column names: timestamp,competition,power");

  for (auto* sub : {fit_cmd, cross_cmd, place_cmd, sim_cmd, energy_cmd}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*fit_cmd) return cmd_fit(g, fit, out);
    if (*cross_cmd) return cmd_crossover(g, cross, out);
    if (*place_cmd) return cmd_place(g, place, out, err);
    if (*sim_cmd) return cmd_simulate(g, sim, out, err);
    if (*energy_cmd) return cmd_energy(g, energy_trace, energy_columns, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error (format): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace procwatt::cli
