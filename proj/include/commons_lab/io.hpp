#pragma once

// Serialization of trajectories, equilibrium reports, cycle reports, basin
// grids and run summaries. CSV files are UTF-8 with LF line ends and a
// header row; every floating-point value is printed with 12 significant
// digits so independent implementations can be compared digit-for-digit.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "commons_lab/abm.hpp"
#include "commons_lab/basins.hpp"
#include "commons_lab/cycles.hpp"
#include "commons_lab/dynamics.hpp"
#include "commons_lab/equilibria.hpp"
#include "commons_lab/model.hpp"

namespace commons_lab {

using json = nlohmann::json;

inline std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Basin cell labels in files: A<index> into the legend, or Unresolved.
inline std::string basin_label_name(int label) {
  return label == BasinGrid::kUnresolved ? "Unresolved" : "A" + std::to_string(label);
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,x,y\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    out << format_num(traj.times[i]) << ',' << format_num(traj.states[i].coop_fraction)
        << ',' << format_num(traj.states[i].resource) << '\n';
}

inline json params_to_json(const ModelParams& p) {
  return {{"group_size", p.group_size},   {"growth_rate", p.growth_rate},
          {"tax", p.tax},                 {"defection_rate", p.defection_rate},
          {"max_quota", p.max_quota},     {"capacity", p.capacity}};
}

inline json state_to_json(const SystemState& s) {
  return {{"x", s.coop_fraction}, {"y", s.resource}};
}

inline json fixed_point_to_json(const FixedPoint& fp) {
  return {{"x", fp.location.coop_fraction},
          {"y", fp.location.resource},
          {"kind", to_string(fp.kind)},
          {"stability", to_string(fp.stability)},
          {"eigenvalues",
           {{{"re", fp.eigenvalues[0].real()}, {"im", fp.eigenvalues[0].imag()}},
            {{"re", fp.eigenvalues[1].real()}, {"im", fp.eigenvalues[1].imag()}}}}};
}

inline json equilibrium_report_to_json(IncentiveKind kind, const ModelParams& params,
                                       const std::vector<FixedPoint>& report) {
  const Regime regime = classify_regime(params);
  json points = json::array();
  int stable = 0;
  for (const FixedPoint& fp : report) {
    points.push_back(fixed_point_to_json(fp));
    if (fp.stability == Stability::Stable) ++stable;
  }
  return {{"kind", to_string(kind)},
          {"params", params_to_json(params)},
          {"regime", to_string(regime.kind)},
          {"e_coop", regime.coop_extraction},
          {"e_defect", regime.defect_extraction},
          {"n_fixed_points", report.size()},
          {"n_stable", stable},
          {"fixed_points", points}};
}

inline json cycle_report_to_json(const CycleReport& rep) {
  return {{"found", rep.found},
          {"period_estimate", rep.period_estimate},
          {"x_range", {{"min", rep.x_range.min}, {"max", rep.x_range.max}}},
          {"y_range", {{"min", rep.y_range.min}, {"max", rep.y_range.max}}},
          {"section_crossings", rep.section_crossings},
          {"diagnostic", rep.diagnostic}};
}

inline void write_basin_csv(std::ostream& out, const BasinGrid& grid) {
  out << "x0,y0,label\n";
  for (int iy = 0; iy < grid.y_resolution; ++iy)
    for (int ix = 0; ix < grid.x_resolution; ++ix)
      out << format_num(grid.cell_x(ix)) << ',' << format_num(grid.cell_y(iy)) << ','
          << basin_label_name(grid.label_at(ix, iy)) << '\n';
}

inline json basin_to_json(const BasinGrid& grid) {
  json legend = json::object();
  for (std::size_t i = 0; i < grid.attractors.size(); ++i)
    legend[basin_label_name(static_cast<int>(i))] = fixed_point_to_json(grid.attractors[i]);
  json labels = json::array();
  for (int iy = 0; iy < grid.y_resolution; ++iy) {
    json row = json::array();
    for (int ix = 0; ix < grid.x_resolution; ++ix)
      row.push_back(basin_label_name(grid.label_at(ix, iy)));
    labels.push_back(row);
  }
  int unresolved = 0;
  for (int l : grid.labels)
    if (l == BasinGrid::kUnresolved) ++unresolved;
  return {{"x_resolution", grid.x_resolution},
          {"y_resolution", grid.y_resolution},
          {"capacity", grid.capacity},
          {"legend", legend},
          {"labels", labels},
          {"unresolved_cells", unresolved}};
}

// Mean state over the trailing window_fraction of a run, plus the attractor
// it settled on (if any).
inline json run_summary_to_json(const Trajectory& traj,
                                const std::vector<FixedPoint>& attractors,
                                double capacity, double window_fraction = 0.1,
                                double outcome_tol = 5e-2) {
  const std::size_t n = traj.states.size();
  const std::size_t window = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                          window_fraction * n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = n - window; i < n; ++i) {
    mx += traj.states[i].coop_fraction;
    my += traj.states[i].resource;
  }
  mx /= static_cast<double>(window);
  my /= static_cast<double>(window);

  Trajectory mean_point;
  mean_point.times.push_back(traj.times.back());
  mean_point.states.push_back({mx, my});
  const auto outcome = detect_outcome(mean_point, attractors, outcome_tol, capacity);

  json j = {{"terminal", state_to_json(traj.terminal())},
            {"terminal_time", traj.terminal_time()},
            {"terminal_flag", to_string(traj.terminal_flag)},
            {"clamp_events", traj.clamp_events},
            {"final_window_fraction", window_fraction},
            {"final_window_mean", {{"x", mx}, {"y", my}}}};
  if (outcome) {
    j["attractor"] = fixed_point_to_json(attractors[*outcome]);
    j["attractor_label"] = basin_label_name(static_cast<int>(*outcome));
  } else {
    j["attractor_label"] = "NonConvergent";
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace commons_lab
