#pragma once

// Basin-of-attraction mapping: integrate from every cell center of a uniform
// grid over the state box and label each cell by the stable fixed point its
// trajectory lands on.

#include <stdexcept>
#include <vector>

#include "commons_lab/dynamics.hpp"
#include "commons_lab/equilibria.hpp"
#include "commons_lab/model.hpp"
#include "commons_lab/parallel.hpp"

namespace commons_lab {

inline constexpr double kBasinOutcomeTol = 1e-2;  // scaled distance to an attractor

struct BasinGrid {
  static constexpr int kUnresolved = -1;

  int x_resolution = 0;
  int y_resolution = 0;
  std::vector<int> labels;             // cell (ix, iy) at iy * x_resolution + ix
  std::vector<FixedPoint> attractors;  // legend; stable points only
  double capacity = 0.0;

  double cell_x(int ix) const { return (ix + 0.5) / x_resolution; }
  double cell_y(int iy) const { return (iy + 0.5) * capacity / y_resolution; }
  int label_at(int ix, int iy) const { return labels[static_cast<std::size_t>(iy) * x_resolution + ix]; }
};

// Labels every cell center of an x_res-by-y_res grid over (0,1)x(0,capacity)
// by the attractor its trajectory converges to within the scaled tolerance
// kBasinOutcomeTol; cells that do not converge by t_end stay Unresolved.
// Cells evaluate independently and are merged by index, so any worker count
// produces the same grid. Throws when the system has no stable fixed point
// (limit-cycle regimes belong to detect_limit_cycle instead).
inline BasinGrid basin_map(IncentiveKind kind, const ModelParams& params,
                           int x_resolution, int y_resolution,
                           const IntegratorConfig& config) {
  params.validate();
  config.validate();
  if (x_resolution < 2 || y_resolution < 2)
    throw std::invalid_argument("basin_map: resolution must be at least 2 per axis");

  BasinGrid grid;
  grid.x_resolution = x_resolution;
  grid.y_resolution = y_resolution;
  grid.capacity = params.capacity;
  grid.attractors = stable_points(equilibrium_report(kind, params));
  if (grid.attractors.empty())
    throw std::invalid_argument(
        "basin_map: no stable fixed point exists for these parameters; "
        "use detect_limit_cycle for oscillatory regimes");

  const long long n_cells = static_cast<long long>(x_resolution) * y_resolution;
  grid.labels.assign(static_cast<std::size_t>(n_cells), BasinGrid::kUnresolved);

  // Cells only need the terminal state; suppress intermediate recording.
  IntegratorConfig cell_config = config;
  cell_config.record_every = std::numeric_limits<long long>::max();

  parallel_for(n_cells, [&](long long cell) {
    const int ix = static_cast<int>(cell % x_resolution);
    const int iy = static_cast<int>(cell / x_resolution);
    const SystemState start{grid.cell_x(ix), grid.cell_y(iy)};
    const Trajectory traj = integrate(kind, params, start, cell_config);
    const auto outcome =
        detect_outcome(traj, grid.attractors, kBasinOutcomeTol, params.capacity);
    if (outcome) grid.labels[static_cast<std::size_t>(cell)] = static_cast<int>(*outcome);
  });
  return grid;
}

}  // namespace commons_lab
