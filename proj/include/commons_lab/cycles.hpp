#pragma once

// Limit-cycle detection by Poincare-section return analysis: integrate
// through a transient, anchor a section at the observed mean cooperation
// level, and test whether successive upward-crossing return times settle.

#include <cmath>
#include <string>
#include <vector>

#include "commons_lab/dynamics.hpp"
#include "commons_lab/equilibria.hpp"
#include "commons_lab/model.hpp"

namespace commons_lab {

struct Range {
  double min = 0.0;
  double max = 0.0;
  double width() const { return max - min; }
};

struct CycleReport {
  bool found = false;
  double period_estimate = 0.0;  // mean of the settled return times
  Range x_range, y_range;        // extremes over the last completed cycle
  long section_crossings = 0;
  std::string diagnostic;        // set when found is false
};

inline constexpr int kCycleReturnsRequired = 5;
inline constexpr double kCycleReturnSpread = 0.01;   // CV bound on return times
inline constexpr double kCycleFixedPointGap = 1e-3;  // scaled exclusion distance

namespace detail {

struct CycleSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

inline double scaled_distance(const SystemState& a, const SystemState& b, double capacity) {
  return std::hypot(a.coop_fraction - b.coop_fraction, (a.resource - b.resource) / capacity);
}

}  // namespace detail

// Integrates through `transient`, then observes for `observe` time units and
// analyses returns to the section {x = mean of observed x, dx/dt > 0}.
//
// found requires: at least kCycleReturnsRequired successive return times
// whose coefficient of variation stays below 1%, every section crossing at
// least kCycleFixedPointGap (scaled) away from every fixed point, and a
// cycle of macroscopic extent. The crossing points characterise where the
// orbit settles; transient passes near boundary saddles are legitimate for
// relaxation-type cycles and do not disqualify. An orbit entering the
// exclusion distance of a *stable* fixed point is reported as converged.
inline CycleReport detect_limit_cycle(IncentiveKind kind, const ModelParams& params,
                                      const SystemState& initial, double transient,
                                      double observe, double step_size = 0.01) {
  params.validate();
  validate_state(params, initial);
  if (!(transient > 0.0) || !(observe > 0.0))
    throw std::invalid_argument("detect_limit_cycle: transient and observe must be positive");
  if (!(step_size > 0.0))
    throw std::invalid_argument("detect_limit_cycle: step_size must be positive");

  const std::vector<FixedPoint> fps = equilibrium_report(kind, params);
  const std::vector<FixedPoint> sinks = stable_points(fps);
  const double capacity = params.capacity;

  CycleReport report;
  SystemState s = initial;
  Rates f = vector_field(kind, params, s);

  const auto absorbed = [&]() -> const FixedPoint* {
    for (const FixedPoint& fp : sinks)
      if (detail::scaled_distance(s, fp.location, capacity) < kCycleFixedPointGap) return &fp;
    return nullptr;
  };
  const auto converged_diagnostic = [&](const FixedPoint& fp, double t) {
    return "trajectory converged to the stable fixed point (" +
           std::to_string(fp.location.coop_fraction) + ", " +
           std::to_string(fp.location.resource) + ") by t=" + std::to_string(t);
  };

  if (const FixedPoint* fp = absorbed()) {
    report.diagnostic = converged_diagnostic(*fp, 0.0);
    return report;
  }

  // Transient phase: march without recording.
  const long long transient_steps =
      static_cast<long long>(std::ceil(transient / step_size - 1e-9));
  for (long long k = 1; k <= transient_steps; ++k) {
    SystemState next = detail::rk4_step(kind, params, s, step_size, f);
    if (!std::isfinite(next.coop_fraction) || !std::isfinite(next.resource))
      throw NumericalFailure((k - 1) * step_size, s);
    detail::clamp_to_box(next, capacity);
    s = next;
    f = vector_field(kind, params, s);
    if (const FixedPoint* fp = absorbed()) {
      report.diagnostic = converged_diagnostic(*fp, k * step_size);
      return report;
    }
  }

  // Observation phase: sampled states for the section analysis.
  const long long observe_steps =
      static_cast<long long>(std::ceil(observe / step_size - 1e-9));
  const long long stride = std::max<long long>(1, observe_steps / 400000);
  std::vector<detail::CycleSample> samples;
  samples.reserve(static_cast<std::size_t>(observe_steps / stride) + 2);
  samples.push_back({0.0, s.coop_fraction, s.resource});
  for (long long k = 1; k <= observe_steps; ++k) {
    SystemState next = detail::rk4_step(kind, params, s, step_size, f);
    if (!std::isfinite(next.coop_fraction) || !std::isfinite(next.resource))
      throw NumericalFailure(transient + (k - 1) * step_size, s);
    detail::clamp_to_box(next, capacity);
    s = next;
    f = vector_field(kind, params, s);
    if (k % stride == 0 || k == observe_steps)
      samples.push_back({k * step_size, s.coop_fraction, s.resource});
    if (const FixedPoint* fp = absorbed()) {
      report.diagnostic = converged_diagnostic(*fp, transient + k * step_size);
      return report;
    }
  }

  // Section anchor: time-average of the observed cooperation level.
  double x_mean = 0.0;
  for (const auto& p : samples) x_mean += p.x;
  x_mean /= static_cast<double>(samples.size());

  // Upward crossings of x = x_mean, with per-cycle extreme tracking.
  std::vector<double> crossing_times;
  bool crossing_clear_of_fps = true;
  Range cycle_x{samples.front().x, samples.front().x};
  Range cycle_y{samples.front().y, samples.front().y};
  Range last_x, last_y;
  bool have_cycle = false;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    cycle_x.min = std::min(cycle_x.min, b.x);
    cycle_x.max = std::max(cycle_x.max, b.x);
    cycle_y.min = std::min(cycle_y.min, b.y);
    cycle_y.max = std::max(cycle_y.max, b.y);
    if (a.x < x_mean && b.x >= x_mean) {
      const double frac = (x_mean - a.x) / (b.x - a.x);
      crossing_times.push_back(a.t + frac * (b.t - a.t));
      const SystemState cross{x_mean, a.y + frac * (b.y - a.y)};
      for (const FixedPoint& fp : fps)
        if (detail::scaled_distance(cross, fp.location, capacity) < kCycleFixedPointGap)
          crossing_clear_of_fps = false;
      if (crossing_times.size() >= 2) {
        // Extremes since the previous crossing span one full cycle.
        last_x = cycle_x;
        last_y = cycle_y;
        have_cycle = true;
      }
      cycle_x = {b.x, b.x};
      cycle_y = {b.y, b.y};
    }
  }
  report.section_crossings = static_cast<long>(crossing_times.size());

  if (crossing_times.size() < static_cast<std::size_t>(kCycleReturnsRequired) + 1) {
    report.diagnostic = "only " + std::to_string(crossing_times.size()) +
                        " section crossings observed";
    return report;
  }

  std::vector<double> returns;
  for (std::size_t i = 1; i < crossing_times.size(); ++i)
    returns.push_back(crossing_times[i] - crossing_times[i - 1]);

  // Spread of the last kCycleReturnsRequired return times.
  const std::size_t m = kCycleReturnsRequired;
  double mean = 0.0;
  for (std::size_t i = returns.size() - m; i < returns.size(); ++i) mean += returns[i];
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (std::size_t i = returns.size() - m; i < returns.size(); ++i) {
    const double d = returns[i] - mean;
    var += d * d;
  }
  const double cv = mean > 0.0 ? std::sqrt(var / static_cast<double>(m)) / mean : 1.0;

  const double extent = have_cycle ? std::hypot(last_x.width(), last_y.width() / capacity) : 0.0;
  if (cv < kCycleReturnSpread && crossing_clear_of_fps && have_cycle &&
      extent > kCycleFixedPointGap) {
    report.found = true;
    report.period_estimate = mean;
    report.x_range = last_x;
    report.y_range = last_y;
  } else if (!crossing_clear_of_fps) {
    report.diagnostic = "section crossings fall within the fixed-point exclusion distance";
  } else {
    report.diagnostic = "return times did not settle (cv=" + std::to_string(cv) + ")";
  }
  return report;
}

}  // namespace commons_lab
