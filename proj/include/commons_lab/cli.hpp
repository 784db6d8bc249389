#pragma once

// Command-line front end: experiment configuration (JSON file + flag
// overrides), subcommand dispatch, and artifact output.
//
// Exit codes: 0 success, 2 validation error (bad flags, config, or state),
// 3 numerical failure during integration.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commons_lab/commons_lab.hpp"

namespace commons_lab::cli {

struct SweepAxis {
  std::string param;
  double from = 0.0;
  double to = 0.0;
  long long count = 1;
};

struct ExperimentConfig {
  IncentiveKind kind = IncentiveKind::Reward;
  ModelParams params;
  SystemState initial{0.5, 500.0};
  IntegratorConfig integrator;

  struct Cycle {
    double transient = 500.0;
    double observe = 5000.0;
    double step_size = 0.01;
  } cycle;

  struct Basin {
    int x_resolution = 21;
    int y_resolution = 21;
  } basin;

  struct Abm {
    double noise = 1.0;
    std::uint64_t seed = 1;
    long long steps = 10000;
    int initial_cooperators = 500;
    double initial_resource = 500.0;
  } abm;

  std::vector<SweepAxis> sweep_axes;

  struct Output {
    std::string path;
    std::string format = "both";  // csv | json | both
  } output;
};

namespace detail {

inline void require_keys(const json& j, const std::string& section,
                         const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw std::invalid_argument("config section '" + section + "' must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw std::invalid_argument("unknown config field '" + item.key() + "' in " + section);
}

inline IncentiveKind parse_kind(const std::string& s) {
  if (s == "reward") return IncentiveKind::Reward;
  if (s == "punishment") return IncentiveKind::Punishment;
  throw std::invalid_argument("kind must be 'reward' or 'punishment', got '" + s + "'");
}

}  // namespace detail

inline void from_json_document(const json& j, ExperimentConfig& cfg) {
  detail::require_keys(j, "config",
                       {"kind", "params", "initial", "integrator", "cycle", "basin", "abm",
                        "sweep", "output"});
  if (j.contains("kind")) cfg.kind = detail::parse_kind(j.at("kind").get<std::string>());
  if (j.contains("params")) {
    const json& p = j.at("params");
    detail::require_keys(p, "params",
                         {"group_size", "growth_rate", "tax", "defection_rate", "max_quota",
                          "capacity"});
    if (p.contains("group_size")) cfg.params.group_size = p.at("group_size").get<int>();
    if (p.contains("growth_rate")) cfg.params.growth_rate = p.at("growth_rate").get<double>();
    if (p.contains("tax")) cfg.params.tax = p.at("tax").get<double>();
    if (p.contains("defection_rate"))
      cfg.params.defection_rate = p.at("defection_rate").get<double>();
    if (p.contains("max_quota")) cfg.params.max_quota = p.at("max_quota").get<double>();
    if (p.contains("capacity")) cfg.params.capacity = p.at("capacity").get<double>();
  }
  if (j.contains("initial")) {
    const json& s = j.at("initial");
    detail::require_keys(s, "initial", {"x", "y"});
    if (s.contains("x")) cfg.initial.coop_fraction = s.at("x").get<double>();
    if (s.contains("y")) cfg.initial.resource = s.at("y").get<double>();
  }
  if (j.contains("integrator")) {
    const json& s = j.at("integrator");
    detail::require_keys(s, "integrator",
                         {"step_size", "t_end", "record_every", "convergence_tol"});
    if (s.contains("step_size")) cfg.integrator.step_size = s.at("step_size").get<double>();
    if (s.contains("t_end")) cfg.integrator.t_end = s.at("t_end").get<double>();
    if (s.contains("record_every"))
      cfg.integrator.record_every = s.at("record_every").get<long long>();
    if (s.contains("convergence_tol"))
      cfg.integrator.convergence_tol = s.at("convergence_tol").get<double>();
  }
  if (j.contains("cycle")) {
    const json& s = j.at("cycle");
    detail::require_keys(s, "cycle", {"transient", "observe", "step_size"});
    if (s.contains("transient")) cfg.cycle.transient = s.at("transient").get<double>();
    if (s.contains("observe")) cfg.cycle.observe = s.at("observe").get<double>();
    if (s.contains("step_size")) cfg.cycle.step_size = s.at("step_size").get<double>();
  }
  if (j.contains("basin")) {
    const json& s = j.at("basin");
    detail::require_keys(s, "basin", {"x_resolution", "y_resolution"});
    if (s.contains("x_resolution")) cfg.basin.x_resolution = s.at("x_resolution").get<int>();
    if (s.contains("y_resolution")) cfg.basin.y_resolution = s.at("y_resolution").get<int>();
  }
  if (j.contains("abm")) {
    const json& s = j.at("abm");
    detail::require_keys(s, "abm",
                         {"noise", "seed", "steps", "initial_cooperators", "initial_resource"});
    if (s.contains("noise")) cfg.abm.noise = s.at("noise").get<double>();
    if (s.contains("seed")) cfg.abm.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("steps")) cfg.abm.steps = s.at("steps").get<long long>();
    if (s.contains("initial_cooperators"))
      cfg.abm.initial_cooperators = s.at("initial_cooperators").get<int>();
    if (s.contains("initial_resource"))
      cfg.abm.initial_resource = s.at("initial_resource").get<double>();
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    detail::require_keys(s, "sweep", {"axes"});
    cfg.sweep_axes.clear();
    if (s.contains("axes")) {
      for (const json& a : s.at("axes")) {
        detail::require_keys(a, "sweep.axes[]", {"param", "from", "to", "count"});
        SweepAxis axis;
        axis.param = a.at("param").get<std::string>();
        axis.from = a.at("from").get<double>();
        axis.to = a.contains("to") ? a.at("to").get<double>() : axis.from;
        axis.count = a.contains("count") ? a.at("count").get<long long>() : 1;
        cfg.sweep_axes.push_back(axis);
      }
    }
  }
  if (j.contains("output")) {
    const json& s = j.at("output");
    detail::require_keys(s, "output", {"path", "format"});
    if (s.contains("path")) cfg.output.path = s.at("path").get<std::string>();
    if (s.contains("format")) cfg.output.format = s.at("format").get<std::string>();
  }
}

inline json to_json_document(const ExperimentConfig& cfg) {
  json axes = json::array();
  for (const SweepAxis& a : cfg.sweep_axes)
    axes.push_back({{"param", a.param}, {"from", a.from}, {"to", a.to}, {"count", a.count}});
  return {{"kind", to_string(cfg.kind)},
          {"params", params_to_json(cfg.params)},
          {"initial", {{"x", cfg.initial.coop_fraction}, {"y", cfg.initial.resource}}},
          {"integrator",
           {{"step_size", cfg.integrator.step_size},
            {"t_end", cfg.integrator.t_end},
            {"record_every", cfg.integrator.record_every},
            {"convergence_tol", cfg.integrator.convergence_tol}}},
          {"cycle",
           {{"transient", cfg.cycle.transient},
            {"observe", cfg.cycle.observe},
            {"step_size", cfg.cycle.step_size}}},
          {"basin",
           {{"x_resolution", cfg.basin.x_resolution},
            {"y_resolution", cfg.basin.y_resolution}}},
          {"abm",
           {{"noise", cfg.abm.noise},
            {"seed", cfg.abm.seed},
            {"steps", cfg.abm.steps},
            {"initial_cooperators", cfg.abm.initial_cooperators},
            {"initial_resource", cfg.abm.initial_resource}}},
          {"sweep", {{"axes", axes}}},
          {"output", {{"path", cfg.output.path}, {"format", cfg.output.format}}}};
}

namespace detail {

inline void set_swept_param(ModelParams& params, const std::string& name, double value) {
  if (name == "growth_rate" || name == "r") {
    params.growth_rate = value;
  } else if (name == "tax" || name == "delta") {
    params.tax = value;
  } else if (name == "defection_rate" || name == "alpha") {
    params.defection_rate = value;
  } else if (name == "max_quota" || name == "bm") {
    params.max_quota = value;
  } else if (name == "capacity" || name == "rm") {
    params.capacity = value;
  } else if (name == "group_size" || name == "N") {
    params.group_size = static_cast<int>(std::llround(value));
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
  }
}

inline std::vector<double> axis_values(const SweepAxis& axis) {
  if (axis.count < 1) throw std::invalid_argument("sweep axis count must be at least 1");
  std::vector<double> values;
  if (axis.count == 1) {
    values.push_back(axis.from);
    return values;
  }
  for (long long i = 0; i < axis.count; ++i)
    values.push_back(axis.from +
                     (axis.to - axis.from) * static_cast<double>(i) /
                         static_cast<double>(axis.count - 1));
  return values;
}

inline bool wants_csv(const std::string& format) { return format == "csv" || format == "both"; }
inline bool wants_json(const std::string& format) { return format == "json" || format == "both"; }

inline void check_format(const std::string& format) {
  if (format != "csv" && format != "json" && format != "both")
    throw std::invalid_argument("format must be csv, json, or both");
}

inline std::string stable_points_field(const std::vector<FixedPoint>& report) {
  std::string out;
  for (const FixedPoint& fp : report) {
    if (fp.stability != Stability::Stable) continue;
    if (!out.empty()) out += '|';
    out += format_num(fp.location.coop_fraction) + ':' + format_num(fp.location.resource);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the one-line summary it printed.

inline void run_simulate(const ExperimentConfig& cfg) {
  const std::string stem = cfg.output.path.empty() ? "simulate_output" : cfg.output.path;
  const Trajectory traj = integrate(cfg.kind, cfg.params, cfg.initial, cfg.integrator);
  const auto attractors = stable_points(equilibrium_report(cfg.kind, cfg.params));
  if (detail::wants_csv(cfg.output.format)) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text_file(stem + ".csv", csv.str());
  }
  if (detail::wants_json(cfg.output.format))
    write_json_file(stem + ".json",
                    run_summary_to_json(traj, attractors, cfg.params.capacity));
  std::cout << "simulate[" << to_string(cfg.kind) << "]: terminal=("
            << format_num(traj.terminal().coop_fraction) << ", "
            << format_num(traj.terminal().resource) << ") flag=" << to_string(traj.terminal_flag)
            << " t=" << format_num(traj.terminal_time()) << " -> " << stem << ".{csv,json}"
            << std::endl;
}

inline void run_equilibria(const ExperimentConfig& cfg) {
  const std::string stem = cfg.output.path.empty() ? "equilibria_output" : cfg.output.path;
  const auto report = equilibrium_report(cfg.kind, cfg.params);
  write_json_file(stem + ".json", equilibrium_report_to_json(cfg.kind, cfg.params, report));
  int stable = 0;
  for (const auto& fp : report)
    if (fp.stability == Stability::Stable) ++stable;
  std::cout << "equilibria[" << to_string(cfg.kind) << "]: " << report.size()
            << " fixed points, " << stable << " stable -> " << stem << ".json" << std::endl;
}

inline void run_cycle(const ExperimentConfig& cfg) {
  const std::string stem = cfg.output.path.empty() ? "cycle_output" : cfg.output.path;
  const CycleReport rep =
      detect_limit_cycle(cfg.kind, cfg.params, cfg.initial, cfg.cycle.transient,
                         cfg.cycle.observe, cfg.cycle.step_size);
  write_json_file(stem + ".json", cycle_report_to_json(rep));
  std::cout << "cycle[" << to_string(cfg.kind) << "]: found=" << (rep.found ? "true" : "false");
  if (rep.found)
    std::cout << " period=" << format_num(rep.period_estimate);
  else
    std::cout << " (" << rep.diagnostic << ")";
  std::cout << " -> " << stem << ".json" << std::endl;
}

inline void run_basin(const ExperimentConfig& cfg) {
  const std::string stem = cfg.output.path.empty() ? "basin_output" : cfg.output.path;
  const BasinGrid grid = basin_map(cfg.kind, cfg.params, cfg.basin.x_resolution,
                                   cfg.basin.y_resolution, cfg.integrator);
  if (detail::wants_csv(cfg.output.format)) {
    std::ostringstream csv;
    write_basin_csv(csv, grid);
    write_text_file(stem + ".csv", csv.str());
  }
  if (detail::wants_json(cfg.output.format)) write_json_file(stem + ".json", basin_to_json(grid));
  int unresolved = 0;
  for (int l : grid.labels)
    if (l == BasinGrid::kUnresolved) ++unresolved;
  std::cout << "basin[" << to_string(cfg.kind) << "]: " << grid.x_resolution << "x"
            << grid.y_resolution << " grid, " << grid.attractors.size() << " attractors, "
            << unresolved << " unresolved -> " << stem << ".{csv,json}" << std::endl;
}

inline void run_abm_command(const ExperimentConfig& cfg) {
  const std::string stem = cfg.output.path.empty() ? "abm_output" : cfg.output.path;
  AgentRunConfig ac;
  ac.params = cfg.params;
  ac.kind = cfg.kind;
  ac.noise = cfg.abm.noise;
  ac.seed = cfg.abm.seed;
  ac.steps = cfg.abm.steps;
  ac.initial_cooperators = cfg.abm.initial_cooperators;
  ac.initial_resource = cfg.abm.initial_resource;
  const Trajectory traj = run_abm(ac);
  const auto attractors = stable_points(equilibrium_report(cfg.kind, cfg.params));
  if (detail::wants_csv(cfg.output.format)) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text_file(stem + ".csv", csv.str());
  }
  json summary = run_summary_to_json(traj, attractors, cfg.params.capacity);
  summary["seed"] = ac.seed;
  summary["steps"] = ac.steps;
  summary["noise"] = ac.noise;
  if (detail::wants_json(cfg.output.format)) write_json_file(stem + ".json", summary);
  std::cout << "abm[" << to_string(cfg.kind) << "]: seed=" << ac.seed << " final_mean=("
            << format_num(summary["final_window_mean"]["x"].get<double>()) << ", "
            << format_num(summary["final_window_mean"]["y"].get<double>()) << ") attractor="
            << summary["attractor_label"].get<std::string>() << " -> " << stem << ".{csv,json}"
            << std::endl;
}

inline void run_sweep(const ExperimentConfig& cfg) {
  const std::string stem = cfg.output.path.empty() ? "sweep_output" : cfg.output.path;
  if (cfg.sweep_axes.empty() || cfg.sweep_axes.size() > 2)
    throw std::invalid_argument("sweep needs 1 or 2 axes");
  for (const SweepAxis& a : cfg.sweep_axes) {
    if (!std::isfinite(a.from) || !std::isfinite(a.to))
      throw std::invalid_argument("sweep axis range must be finite");
  }
  const std::vector<double> first = detail::axis_values(cfg.sweep_axes[0]);
  const std::vector<double> second = cfg.sweep_axes.size() == 2
                                         ? detail::axis_values(cfg.sweep_axes[1])
                                         : std::vector<double>{0.0};
  const bool two_axes = cfg.sweep_axes.size() == 2;

  struct Row {
    double v1 = 0.0, v2 = 0.0;
    std::string text;
  };
  const long long n_rows = static_cast<long long>(first.size()) * second.size();
  std::vector<Row> rows(static_cast<std::size_t>(n_rows));

  parallel_for(n_rows, [&](long long idx) {
    const std::size_t i = static_cast<std::size_t>(idx) / second.size();
    const std::size_t k = static_cast<std::size_t>(idx) % second.size();
    ModelParams params = cfg.params;
    detail::set_swept_param(params, cfg.sweep_axes[0].param, first[i]);
    if (two_axes) detail::set_swept_param(params, cfg.sweep_axes[1].param, second[k]);
    const Regime regime = classify_regime(params);
    const auto report = equilibrium_report(cfg.kind, params);
    int stable = 0, interior = 0;
    for (const auto& fp : report) {
      if (fp.stability == Stability::Stable) ++stable;
      if (fp.kind == FixedPointKind::Interior) ++interior;
    }
    std::string predicate;
    if (cfg.kind == IncentiveKind::Reward && params.growth_rate > 0.0)
      predicate = reward_interior_exists(params) ? "true" : "false";
    std::string line;
    line += format_num(first[i]);
    if (two_axes) line += ',' + format_num(second[k]);
    line += ',' + std::string(to_string(regime.kind));
    line += ',' + format_num(regime.coop_extraction);
    line += ',' + format_num(regime.defect_extraction);
    line += ',' + std::to_string(report.size());
    line += ',' + std::to_string(stable);
    line += ',' + std::to_string(interior);
    line += ',' + predicate;
    line += ',' + detail::stable_points_field(report);
    rows[static_cast<std::size_t>(idx)] = {first[i], second[k], line};
  });

  std::ostringstream csv;
  csv << cfg.sweep_axes[0].param;
  if (two_axes) csv << ',' << cfg.sweep_axes[1].param;
  csv << ",regime,e_coop,e_defect,n_fixed_points,n_stable,n_interior,"
         "reward_interior_predicate,stable_points\n";
  for (const Row& row : rows) csv << row.text << '\n';
  write_text_file(stem + ".csv", csv.str());
  std::cout << "sweep[" << to_string(cfg.kind) << "]: " << n_rows << " rows -> " << stem
            << ".csv" << std::endl;
}

inline void run_preset(const FigurePreset& preset, const std::string& out_dir,
                       std::uint64_t seed) {
  namespace fs = std::filesystem;
  if (!out_dir.empty() && out_dir != ".") fs::create_directories(out_dir);
  const auto path = [&](const std::string& name) {
    return (fs::path(out_dir.empty() ? "." : out_dir) / name).string();
  };

  const auto report = equilibrium_report(preset.kind, preset.params);
  write_json_file(path(preset.id + "_equilibria.json"),
                  equilibrium_report_to_json(preset.kind, preset.params, report));
  const auto attractors = stable_points(report);

  int n_files = 1;
  if (preset.is_abm) {
    for (std::size_t i = 0; i < preset.initial_conditions.size(); ++i) {
      const SystemState& ic = preset.initial_conditions[i];
      AgentRunConfig ac;
      ac.params = preset.params;
      ac.kind = preset.kind;
      ac.noise = preset.noise;
      ac.seed = seed;
      ac.steps = preset.abm_steps;
      ac.initial_cooperators =
          static_cast<int>(std::llround(ic.coop_fraction * preset.params.group_size));
      ac.initial_resource = ic.resource;
      const Trajectory traj = run_abm(ac);
      std::ostringstream csv;
      write_trajectory_csv(csv, traj);
      const std::string tag = preset.id + "_abm_ic" + std::to_string(i);
      write_text_file(path(tag + ".csv"), csv.str());
      json summary = run_summary_to_json(traj, attractors, preset.params.capacity);
      summary["seed"] = ac.seed;
      summary["noise"] = ac.noise;
      write_json_file(path(tag + ".json"), summary);
      n_files += 2;
    }
  } else {
    IntegratorConfig cfg;
    cfg.t_end = preset.t_end;
    cfg.convergence_tol = preset.convergence_tol;
    const long long steps = static_cast<long long>(cfg.t_end / cfg.step_size);
    cfg.record_every = std::max<long long>(1, steps / 5000);
    for (std::size_t i = 0; i < preset.initial_conditions.size(); ++i) {
      const Trajectory traj =
          integrate(preset.kind, preset.params, preset.initial_conditions[i], cfg);
      std::ostringstream csv;
      write_trajectory_csv(csv, traj);
      write_text_file(path(preset.id + "_trajectory_ic" + std::to_string(i) + ".csv"),
                      csv.str());
      ++n_files;
    }
    if (preset.has_cycle) {
      const CycleReport rep = detect_limit_cycle(
          preset.kind, preset.params, preset.initial_conditions.front(),
          preset.cycle_transient, preset.cycle_observe, preset.cycle_step);
      write_json_file(path(preset.id + "_cycle.json"), cycle_report_to_json(rep));
      ++n_files;
    }
  }
  std::cout << "preset " << preset.id << ": wrote " << n_files << " artifacts to "
            << (out_dir.empty() ? "." : out_dir) << std::endl;
}

// ---------------------------------------------------------------------------

inline int run_command(const std::vector<std::string>& args) {
  CLI::App app{"coupled evolutionary-game / resource dynamics laboratory"};
  app.require_subcommand(1);

  std::string config_path, dump_path;
  app.add_option("--config", config_path, "JSON experiment configuration file");
  app.add_option("--dump-config", dump_path,
                 "write the effective configuration to this file and exit");

  ExperimentConfig cfg;
  struct Override {
    CLI::Option* opt = nullptr;
    std::function<void(ExperimentConfig&)> apply;
  };
  std::vector<Override> overrides;

  // Flag carriers; applied over the config file only when actually given.
  std::string kind_flag = "reward", format_flag = "both", out_flag;
  ModelParams params_flag;
  SystemState initial_flag;
  IntegratorConfig integrator_flag;
  ExperimentConfig::Cycle cycle_flag;
  ExperimentConfig::Basin basin_flag;
  ExperimentConfig::Abm abm_flag;
  std::vector<std::string> axis_flags;

  const auto add_common = [&](CLI::App* cmd) {
    overrides.push_back({cmd->add_option("--kind", kind_flag, "reward | punishment"),
                         [&](ExperimentConfig& c) { c.kind = detail::parse_kind(kind_flag); }});
    overrides.push_back({cmd->add_option("-N,--group-size", params_flag.group_size),
                         [&](ExperimentConfig& c) { c.params.group_size = params_flag.group_size; }});
    overrides.push_back({cmd->add_option("-r,--growth-rate", params_flag.growth_rate),
                         [&](ExperimentConfig& c) { c.params.growth_rate = params_flag.growth_rate; }});
    overrides.push_back({cmd->add_option("-d,--tax", params_flag.tax),
                         [&](ExperimentConfig& c) { c.params.tax = params_flag.tax; }});
    overrides.push_back({cmd->add_option("-a,--defection-rate", params_flag.defection_rate),
                         [&](ExperimentConfig& c) { c.params.defection_rate = params_flag.defection_rate; }});
    overrides.push_back({cmd->add_option("--max-quota", params_flag.max_quota),
                         [&](ExperimentConfig& c) { c.params.max_quota = params_flag.max_quota; }});
    overrides.push_back({cmd->add_option("--capacity", params_flag.capacity),
                         [&](ExperimentConfig& c) { c.params.capacity = params_flag.capacity; }});
    overrides.push_back({cmd->add_option("-o,--out", out_flag, "output path stem"),
                         [&](ExperimentConfig& c) { c.output.path = out_flag; }});
    overrides.push_back({cmd->add_option("--format", format_flag, "csv | json | both"),
                         [&](ExperimentConfig& c) { c.output.format = format_flag; }});
  };
  const auto add_initial = [&](CLI::App* cmd) {
    overrides.push_back({cmd->add_option("--x0", initial_flag.coop_fraction),
                         [&](ExperimentConfig& c) { c.initial.coop_fraction = initial_flag.coop_fraction; }});
    overrides.push_back({cmd->add_option("--y0", initial_flag.resource),
                         [&](ExperimentConfig& c) { c.initial.resource = initial_flag.resource; }});
  };
  const auto add_integrator = [&](CLI::App* cmd) {
    overrides.push_back({cmd->add_option("--step-size", integrator_flag.step_size),
                         [&](ExperimentConfig& c) { c.integrator.step_size = integrator_flag.step_size; }});
    overrides.push_back({cmd->add_option("--t-end", integrator_flag.t_end),
                         [&](ExperimentConfig& c) { c.integrator.t_end = integrator_flag.t_end; }});
    overrides.push_back({cmd->add_option("--record-every", integrator_flag.record_every),
                         [&](ExperimentConfig& c) { c.integrator.record_every = integrator_flag.record_every; }});
    overrides.push_back({cmd->add_option("--convergence-tol", integrator_flag.convergence_tol),
                         [&](ExperimentConfig& c) { c.integrator.convergence_tol = integrator_flag.convergence_tol; }});
  };

  CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(simulate);
  add_initial(simulate);
  add_integrator(simulate);

  CLI::App* equilibria_cmd = app.add_subcommand("equilibria", "find and classify fixed points");
  add_common(equilibria_cmd);

  CLI::App* cycle_cmd = app.add_subcommand("cycle", "limit-cycle detection");
  add_common(cycle_cmd);
  add_initial(cycle_cmd);
  overrides.push_back({cycle_cmd->add_option("--transient", cycle_flag.transient),
                       [&](ExperimentConfig& c) { c.cycle.transient = cycle_flag.transient; }});
  overrides.push_back({cycle_cmd->add_option("--observe", cycle_flag.observe),
                       [&](ExperimentConfig& c) { c.cycle.observe = cycle_flag.observe; }});
  overrides.push_back({cycle_cmd->add_option("--cycle-step", cycle_flag.step_size),
                       [&](ExperimentConfig& c) { c.cycle.step_size = cycle_flag.step_size; }});

  CLI::App* basin_cmd = app.add_subcommand("basin", "basin-of-attraction map");
  add_common(basin_cmd);
  add_integrator(basin_cmd);
  overrides.push_back({basin_cmd->add_option("--nx", basin_flag.x_resolution),
                       [&](ExperimentConfig& c) { c.basin.x_resolution = basin_flag.x_resolution; }});
  overrides.push_back({basin_cmd->add_option("--ny", basin_flag.y_resolution),
                       [&](ExperimentConfig& c) { c.basin.y_resolution = basin_flag.y_resolution; }});

  CLI::App* abm_cmd = app.add_subcommand("abm", "agent-based Monte Carlo run");
  add_common(abm_cmd);
  overrides.push_back({abm_cmd->add_option("-M,--noise", abm_flag.noise),
                       [&](ExperimentConfig& c) { c.abm.noise = abm_flag.noise; }});
  overrides.push_back({abm_cmd->add_option("--seed", abm_flag.seed),
                       [&](ExperimentConfig& c) { c.abm.seed = abm_flag.seed; }});
  overrides.push_back({abm_cmd->add_option("--steps", abm_flag.steps),
                       [&](ExperimentConfig& c) { c.abm.steps = abm_flag.steps; }});
  overrides.push_back({abm_cmd->add_option("--nc0", abm_flag.initial_cooperators),
                       [&](ExperimentConfig& c) { c.abm.initial_cooperators = abm_flag.initial_cooperators; }});
  overrides.push_back({abm_cmd->add_option("--resource0", abm_flag.initial_resource),
                       [&](ExperimentConfig& c) { c.abm.initial_resource = abm_flag.initial_resource; }});

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep of regimes and equilibria");
  add_common(sweep_cmd);
  overrides.push_back({sweep_cmd->add_option("--axis", axis_flags,
                                             "param:from:to:count (repeat for a second axis)"),
                       [&](ExperimentConfig& c) {
                         c.sweep_axes.clear();
                         for (const std::string& spec : axis_flags) {
                           SweepAxis axis;
                           std::istringstream in(spec);
                           std::string field;
                           if (!std::getline(in, axis.param, ':'))
                             throw std::invalid_argument("bad axis spec: " + spec);
                           if (std::getline(in, field, ':')) axis.from = std::stod(field);
                           else throw std::invalid_argument("bad axis spec: " + spec);
                           axis.to = axis.from;
                           if (std::getline(in, field, ':')) axis.to = std::stod(field);
                           if (std::getline(in, field, ':')) axis.count = std::stoll(field);
                           else axis.count = 1;
                           c.sweep_axes.push_back(axis);
                         }
                       }});

  CLI::App* preset_cmd = app.add_subcommand("preset", "run a bundled experiment preset");
  std::string preset_id, preset_dir = ".";
  std::uint64_t preset_seed = 1;
  preset_cmd->add_option("id", preset_id, "preset identifier (fig1 .. fig8c)")->required();
  preset_cmd->add_option("-o,--out", preset_dir, "output directory");
  preset_cmd->add_option("--seed", preset_seed, "seed for ABM presets");

  std::vector<std::string> cli_args(args.rbegin(), args.rend());  // CLI11 wants reversed
  try {
    app.parse(cli_args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw std::invalid_argument("malformed config file: " + std::string(e.what()));
      }
      from_json_document(doc, cfg);
    }
    for (const Override& o : overrides)
      if (o.opt->count() > 0) o.apply(cfg);
    detail::check_format(cfg.output.format);

    if (!dump_path.empty()) {
      if (preset_cmd->parsed())
        throw std::invalid_argument("--dump-config is not available for preset runs");
      write_json_file(dump_path, to_json_document(cfg));
      std::cout << "wrote effective config to " << dump_path << std::endl;
      return 0;
    }

    if (simulate->parsed()) {
      run_simulate(cfg);
    } else if (equilibria_cmd->parsed()) {
      run_equilibria(cfg);
    } else if (cycle_cmd->parsed()) {
      run_cycle(cfg);
    } else if (basin_cmd->parsed()) {
      run_basin(cfg);
    } else if (abm_cmd->parsed()) {
      run_abm_command(cfg);
    } else if (sweep_cmd->parsed()) {
      run_sweep(cfg);
    } else if (preset_cmd->parsed()) {
      const FigurePreset* preset = find_preset(preset_id);
      if (!preset) throw std::invalid_argument("unknown preset id: " + preset_id);
      run_preset(*preset, preset_dir, preset_seed);
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << " (last state x="
              << format_num(e.last_state().coop_fraction)
              << " y=" << format_num(e.last_state().resource) << ")" << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}

inline int run_command(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args);
}

}  // namespace commons_lab::cli
