#pragma once

// Canonical experiment presets: one audited table of parameter sets covering
// the three growth regimes for both incentive schemes, the bistable
// punishment cases, the slow oscillatory case, and the matching agent-based
// runs. Bistable presets carry one start per basin so a single run
// demonstrates both attractors.

#include <optional>
#include <string>
#include <vector>

#include "commons_lab/model.hpp"

namespace commons_lab {

struct FigurePreset {
  std::string id;
  IncentiveKind kind = IncentiveKind::Reward;
  ModelParams params;
  bool is_abm = false;
  double noise = 1.0;                            // ABM presets only
  std::vector<SystemState> initial_conditions;   // ABM: coop_fraction * N rounds to N_C0
  double t_end = 1e4;                            // deterministic presets
  // The oscillatory preset disables the field-norm exit: its orbit crawls
  // past saddles with a vanishing field and must run the full horizon.
  double convergence_tol = 1e-9;
  long long abm_steps = 10000;
  bool has_cycle = false;                        // adds a cycle report to the bundle
  double cycle_transient = 0.0;
  double cycle_observe = 0.0;
  double cycle_step = 0.01;
};

namespace detail {

inline ModelParams standard_params(double r, double delta, int n = 1000) {
  ModelParams p;
  p.group_size = n;
  p.growth_rate = r;
  p.tax = delta;
  p.defection_rate = 0.5;
  p.max_quota = 0.5;
  p.capacity = 1000.0;
  return p;
}

}  // namespace detail

inline const std::vector<FigurePreset>& figure_presets() {
  static const std::vector<FigurePreset> presets = [] {
    using detail::standard_params;
    constexpr auto R = IncentiveKind::Reward;
    constexpr auto P = IncentiveKind::Punishment;
    std::vector<FigurePreset> v;

    const auto ode = [&](std::string id, IncentiveKind k, ModelParams p,
                         std::vector<SystemState> ics, double t_end = 1e4) {
      FigurePreset f;
      f.id = std::move(id);
      f.kind = k;
      f.params = p;
      f.initial_conditions = std::move(ics);
      f.t_end = t_end;
      v.push_back(std::move(f));
    };
    const auto abm = [&](std::string id, IncentiveKind k, ModelParams p, double noise,
                         std::vector<SystemState> ics) {
      FigurePreset f;
      f.id = std::move(id);
      f.kind = k;
      f.params = p;
      f.is_abm = true;
      f.noise = noise;
      f.initial_conditions = std::move(ics);
      v.push_back(std::move(f));
    };

    ode("fig1", R, standard_params(0.25, 0.2), {{0.5, 500.0}});
    ode("fig2a", R, standard_params(0.6, 0.2), {{0.5, 500.0}});
    ode("fig2b", R, standard_params(0.6, 0.02), {{0.9, 900.0}});
    ode("fig3a", R, standard_params(1.0, 0.00002), {{0.5, 500.0}});
    ode("fig3b", R, standard_params(1.0, 0.2), {{0.5, 500.0}});
    ode("fig3c", R, standard_params(1.0, 0.04), {{0.5, 500.0}});
    ode("fig4", P, standard_params(0.25, 0.2), {{0.5, 500.0}});
    // Bistable: one start per basin.
    ode("fig5r1", P, standard_params(0.6, 0.004), {{0.70, 100.0}, {0.95, 500.0}});
    ode("fig5r2", P, standard_params(0.9, 0.003), {{0.10, 500.0}, {0.99, 500.0}});
    // Slow oscillatory system: long horizon and a return-map analysis.
    {
      FigurePreset f;
      f.id = "fig6";
      f.kind = P;
      f.params = standard_params(0.006, 0.0001, 10);
      f.initial_conditions = {{0.9, 200.0}};
      f.t_end = 1e6;
      f.convergence_tol = 1e-300;
      f.has_cycle = true;
      f.cycle_transient = 1e6;
      f.cycle_observe = 2.1e6;
      f.cycle_step = 0.05;
      v.push_back(std::move(f));
    }

    abm("fig7a", R, standard_params(0.25, 0.2), 1.0, {{0.5, 500.0}});
    abm("fig7b", R, standard_params(0.6, 0.2), 1.0, {{0.5, 500.0}});
    abm("fig7c", R, standard_params(0.6, 0.02), 0.1, {{0.5, 500.0}});
    abm("fig7d", R, standard_params(1.0, 0.00002), 1.0, {{0.5, 500.0}});
    abm("fig7e", R, standard_params(1.0, 0.2), 1.0, {{0.5, 500.0}});
    abm("fig7f", R, standard_params(1.0, 0.04), 1.0, {{0.5, 500.0}});
    abm("fig8a", P, standard_params(0.25, 0.2), 1.0, {{0.5, 500.0}});
    abm("fig8b", P, standard_params(0.6, 0.004), 2.0, {{0.70, 100.0}, {0.95, 500.0}});
    abm("fig8c", P, standard_params(0.9, 0.003), 1.0, {{0.10, 500.0}, {0.99, 500.0}});
    return v;
  }();
  return presets;
}

inline const FigurePreset* find_preset(const std::string& id) {
  for (const FigurePreset& p : figure_presets())
    if (p.id == id) return &p;
  return nullptr;
}

inline std::vector<std::string> preset_ids() {
  std::vector<std::string> ids;
  for (const FigurePreset& p : figure_presets()) ids.push_back(p.id);
  return ids;
}

}  // namespace commons_lab
