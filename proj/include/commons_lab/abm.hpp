#pragma once

// Agent-based Monte Carlo counterpart of the mean-field model: explicit
// per-agent strategies, the discrete resource update, and pairwise
// payoff-proportional imitation.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "commons_lab/dynamics.hpp"
#include "commons_lab/model.hpp"

namespace commons_lab {

struct AgentRunConfig {
  ModelParams params;
  IncentiveKind kind = IncentiveKind::Reward;
  double noise = 1.0;           // payoff-gap scale of the adoption probability
  std::uint64_t seed = 1;
  long long steps = 10000;
  int initial_cooperators = 0;  // in [0, group_size]
  double initial_resource = 0.0;

  void validate() const {
    params.validate();
    if (!(noise > 0.0)) throw std::invalid_argument("noise must be positive");
    if (steps < 0) throw std::invalid_argument("steps must be nonnegative");
    if (initial_cooperators < 0 || initial_cooperators > params.group_size)
      throw std::invalid_argument("initial_cooperators must lie in [0, group_size]");
    if (!(initial_resource >= 0.0 && initial_resource <= params.capacity))
      throw std::invalid_argument("initial_resource must lie in [0, capacity]");
  }
};

struct AgentState {
  std::vector<std::uint8_t> strategies;  // 1 = cooperator, 0 = defector
  double resource = 0.0;
  long long step = 0;

  int cooperator_count() const {
    int n = 0;
    for (std::uint8_t s : strategies) n += s;
    return n;
  }
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index over the other group_size - 1 agents.
inline int random_other(std::mt19937_64& rng, int self, int group_size) {
  int j = static_cast<int>(rng() % static_cast<std::uint64_t>(group_size - 1));
  return j >= self ? j + 1 : j;
}

}  // namespace detail

// Per-agent payoffs at the current resource level. Within a class the payoff
// is uniform; the tax-pot division only applies to members of the class it
// is split over, so homogeneous populations stay well-defined.
inline std::vector<double> agent_payoffs(const AgentState& state, const AgentRunConfig& config) {
  const ModelParams& p = config.params;
  const int n = p.group_size;
  const double quota = p.max_quota * state.resource / p.capacity;
  const int n_coop = state.cooperator_count();
  const int n_defect = n - n_coop;

  double coop_pay = 0.0, defect_pay = 0.0;
  if (config.kind == IncentiveKind::Reward) {
    if (n_coop > 0) coop_pay = quota - p.tax + n * p.tax / n_coop;
    defect_pay = quota * (1.0 + p.defection_rate) - p.tax;
  } else {
    coop_pay = quota - p.tax;
    if (n_defect > 0)
      defect_pay = quota * (1.0 + p.defection_rate) - p.tax - n * p.tax / n_defect;
  }

  std::vector<double> payoffs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) payoffs[i] = state.strategies[i] ? coop_pay : defect_pay;
  return payoffs;
}

namespace detail {

inline double raw_resource_update(const AgentState& state, const AgentRunConfig& config) {
  const ModelParams& p = config.params;
  const double y = state.resource;
  const int n_coop = state.cooperator_count();
  const double extraction =
      p.max_quota * y / p.capacity *
      (n_coop + (p.group_size - n_coop) * (1.0 + p.defection_rate));
  return y + p.growth_rate * y * (1.0 - y / p.capacity) - extraction;
}

}  // namespace detail

// Discrete resource update: logistic regrowth minus the sum of individual
// extractions, clamped to [0, capacity].
inline double resource_step(const AgentState& state, const AgentRunConfig& config) {
  double next = detail::raw_resource_update(state, config);
  if (next < 0.0) next = 0.0;
  if (next > config.params.capacity) next = config.params.capacity;
  return next;
}

// Synchronous imitation sweep: every agent draws one random model and, when
// the model earned strictly more, copies it with probability
// min(1, gap / noise). All comparisons use the time-t strategies and
// payoffs; adoptions apply together.
inline std::vector<std::uint8_t> imitation_step(const AgentState& state,
                                                const std::vector<double>& payoffs,
                                                const AgentRunConfig& config,
                                                std::mt19937_64& rng) {
  const int n = config.params.group_size;
  std::vector<std::uint8_t> next = state.strategies;
  for (int i = 0; i < n; ++i) {
    const int j = detail::random_other(rng, i, n);
    const double u = detail::uniform01(rng);
    const double gap = payoffs[j] - payoffs[i];
    if (gap > 0.0) {
      const double q = std::min(1.0, gap / config.noise);
      if (u < q) next[i] = state.strategies[j];
    }
  }
  return next;
}

// Full run: payoffs -> imitation -> resource update per step, recording the
// cooperator fraction and resource level each step (including the initial
// state). Deterministic for a given config, seed included.
inline Trajectory run_abm(const AgentRunConfig& config) {
  config.validate();
  const int n = config.params.group_size;

  AgentState state;
  state.strategies.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < config.initial_cooperators; ++i) state.strategies[i] = 1;
  state.resource = config.initial_resource;
  state.step = 0;

  std::mt19937_64 rng(config.seed);

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(config.steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(config.steps) + 1);
  const auto record = [&]() {
    traj.times.push_back(static_cast<double>(state.step));
    traj.states.push_back(
        {static_cast<double>(state.cooperator_count()) / n, state.resource});
  };
  record();

  for (long long t = 1; t <= config.steps; ++t) {
    const std::vector<double> payoffs = agent_payoffs(state, config);
    state.strategies = imitation_step(state, payoffs, config, rng);
    const double raw = detail::raw_resource_update(state, config);
    state.resource = resource_step(state, config);
    if (raw != state.resource) ++traj.clamp_events;
    state.step = t;
    record();
  }
  traj.terminal_flag = TerminalFlag::ReachedTEnd;
  return traj;
}

}  // namespace commons_lab
