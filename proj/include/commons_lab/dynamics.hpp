#pragma once

// Deterministic time integration of the coupled system: classical
// fixed-step 4th-order Runge-Kutta with trajectory recording, box clamping,
// convergence detection, and terminal-state outcome labeling.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "commons_lab/model.hpp"

namespace commons_lab {

struct IntegratorConfig {
  double step_size = 0.01;
  double t_end = 1e4;
  long long record_every = 1;     // record stride in steps
  double convergence_tol = 1e-9;  // on max(|dx/dt|, |dy/dt| / capacity)

  void validate() const {
    if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (record_every < 1) throw std::invalid_argument("record_every must be at least 1");
    if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be positive");
  }
};

enum class TerminalFlag {
  ReachedTEnd,  // ran to t_end with no boundary clamping
  Converged,    // field norm fell below convergence_tol
  Clamped,      // ran to t_end and the box boundary clamped the state en route
};

inline const char* to_string(TerminalFlag f) {
  switch (f) {
    case TerminalFlag::ReachedTEnd: return "reached_t_end";
    case TerminalFlag::Converged: return "converged";
    case TerminalFlag::Clamped: return "clamped";
  }
  return "?";
}

struct Trajectory {
  std::vector<double> times;
  std::vector<SystemState> states;
  TerminalFlag terminal_flag = TerminalFlag::ReachedTEnd;
  long long clamp_events = 0;

  const SystemState& terminal() const { return states.back(); }
  double terminal_time() const { return times.back(); }
};

// Thrown when a step produces a non-finite state; carries the last valid
// point so callers can report where the integration blew up.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(double time, SystemState last)
      : std::runtime_error("integration produced a non-finite state after t=" +
                           std::to_string(time)),
        time_(time),
        last_state_(last) {}
  double time() const { return time_; }
  const SystemState& last_state() const { return last_state_; }

 private:
  double time_;
  SystemState last_state_;
};

namespace detail {

inline SystemState rk4_step(IncentiveKind kind, const ModelParams& params,
                            const SystemState& s, double h, const Rates& k1) {
  const auto at = [&](double cx, double cy, double w) {
    return SystemState{s.coop_fraction + w * cx, s.resource + w * cy};
  };
  const Rates k2 = vector_field(kind, params, at(k1.dx_dt, k1.dy_dt, h / 2));
  const Rates k3 = vector_field(kind, params, at(k2.dx_dt, k2.dy_dt, h / 2));
  const Rates k4 = vector_field(kind, params, at(k3.dx_dt, k3.dy_dt, h));
  return {s.coop_fraction +
              h / 6.0 * (k1.dx_dt + 2.0 * k2.dx_dt + 2.0 * k3.dx_dt + k4.dx_dt),
          s.resource + h / 6.0 * (k1.dy_dt + 2.0 * k2.dy_dt + 2.0 * k3.dy_dt + k4.dy_dt)};
}

inline bool field_converged(const Rates& f, double capacity, double tol) {
  return std::max(std::abs(f.dx_dt), std::abs(f.dy_dt) / capacity) < tol;
}

// Clamp to [0,1] x [0,capacity]; returns whether anything moved.
inline bool clamp_to_box(SystemState& s, double capacity) {
  bool clamped = false;
  if (s.coop_fraction < 0.0) { s.coop_fraction = 0.0; clamped = true; }
  if (s.coop_fraction > 1.0) { s.coop_fraction = 1.0; clamped = true; }
  if (s.resource < 0.0) { s.resource = 0.0; clamped = true; }
  if (s.resource > capacity) { s.resource = capacity; clamped = true; }
  return clamped;
}

}  // namespace detail

inline Trajectory integrate(IncentiveKind kind, const ModelParams& params,
                            const SystemState& initial, const IntegratorConfig& config) {
  params.validate();
  config.validate();
  validate_state(params, initial);

  const double h = config.step_size;
  const long long n_steps =
      static_cast<long long>(std::ceil(config.t_end / h - 1e-9));

  Trajectory traj;
  SystemState s = initial;
  Rates f = vector_field(kind, params, s);
  traj.times.push_back(0.0);
  traj.states.push_back(s);
  if (detail::field_converged(f, params.capacity, config.convergence_tol)) {
    traj.terminal_flag = TerminalFlag::Converged;
    return traj;
  }

  long long last_recorded = 0;
  for (long long k = 1; k <= n_steps; ++k) {
    SystemState next = detail::rk4_step(kind, params, s, h, f);
    if (!std::isfinite(next.coop_fraction) || !std::isfinite(next.resource))
      throw NumericalFailure((k - 1) * h, s);
    if (detail::clamp_to_box(next, params.capacity)) ++traj.clamp_events;
    s = next;
    f = vector_field(kind, params, s);

    const bool converged =
        detail::field_converged(f, params.capacity, config.convergence_tol);
    if (k % config.record_every == 0 || k == n_steps || converged) {
      traj.times.push_back(k * h);
      traj.states.push_back(s);
      last_recorded = k;
    }
    if (converged) {
      traj.terminal_flag = TerminalFlag::Converged;
      return traj;
    }
  }
  (void)last_recorded;
  traj.terminal_flag =
      traj.clamp_events > 0 ? TerminalFlag::Clamped : TerminalFlag::ReachedTEnd;
  return traj;
}

// Index of the fixed point within scaled Euclidean distance tol of the
// trajectory's terminal state (x weighted 1, y weighted 1/capacity), or
// nullopt when no point is that close ("non-convergent"). Works with any
// range of objects exposing a .location SystemState.
template <class FixedPointRange>
std::optional<std::size_t> detect_outcome(const Trajectory& traj,
                                          const FixedPointRange& points, double tol,
                                          double capacity) {
  if (traj.states.empty()) throw std::invalid_argument("detect_outcome: empty trajectory");
  const SystemState& end = traj.terminal();
  std::optional<std::size_t> best;
  double best_dist = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  for (const auto& p : points) {
    const double dx = end.coop_fraction - p.location.coop_fraction;
    const double dy = (end.resource - p.location.resource) / capacity;
    const double dist = std::hypot(dx, dy);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
    ++i;
  }
  if (best && best_dist <= tol) return best;
  return std::nullopt;
}

}  // namespace commons_lab
