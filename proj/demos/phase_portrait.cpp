// Minimal library usage: integrate a handful of starts for one parameter set
// and print phase-portrait polylines as CSV to stdout.

#include <iostream>

#include "commons_lab/commons_lab.hpp"

using namespace commons_lab;

int main() {
  ModelParams params;
  params.group_size = 1000;
  params.growth_rate = 0.6;
  params.tax = 0.02;
  params.defection_rate = 0.5;
  params.max_quota = 0.5;
  params.capacity = 1000.0;

  IntegratorConfig config;
  config.t_end = 2000.0;
  config.record_every = 500;

  std::cout << "start,t,x,y\n";
  int id = 0;
  for (SystemState start : {SystemState{0.1, 900.0}, SystemState{0.9, 900.0},
                            SystemState{0.5, 100.0}, SystemState{0.95, 50.0}}) {
    const Trajectory traj = integrate(IncentiveKind::Reward, params, start, config);
    for (std::size_t i = 0; i < traj.times.size(); ++i)
      std::cout << id << ',' << format_num(traj.times[i]) << ','
                << format_num(traj.states[i].coop_fraction) << ','
                << format_num(traj.states[i].resource) << '\n';
    ++id;
  }

  for (const FixedPoint& fp : equilibrium_report(IncentiveKind::Reward, params))
    std::cerr << to_string(fp.kind) << " (" << format_num(fp.location.coop_fraction) << ", "
              << format_num(fp.location.resource) << ") " << to_string(fp.stability) << '\n';
  return 0;
}
