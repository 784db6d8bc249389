#pragma once

// Mean-field model of a taxed common-pool resource game: parameters, state,
// the payoff kernels of the reward and punishment incentive schemes (closed
// form plus a brute-force binomial-sum reference), the coupled
// replicator/resource vector field, and the growth-regime predicates.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace commons_lab {

// Incentive scheme funded by the uniform tax: the pot is either refunded to
// cooperators (Reward) or levied as an extra fine on defectors (Punishment).
enum class IncentiveKind { Reward, Punishment };

inline const char* to_string(IncentiveKind kind) {
  return kind == IncentiveKind::Reward ? "reward" : "punishment";
}

namespace detail {

// base^n by repeated squaring, n >= 0.
inline double pow_int(double base, long long n) {
  double result = 1.0;
  double p = base;
  while (n > 0) {
    if (n & 1) result *= p;
    p *= p;
    n >>= 1;
  }
  return result;
}

}  // namespace detail

struct ModelParams {
  int group_size = 1000;        // players sharing the pool
  double growth_rate = 0.5;     // natural regrowth rate of the pool, per unit time
  double tax = 0.1;             // tax paid by every player per unit time
  double defection_rate = 0.5;  // fractional over-extraction of defectors
  double max_quota = 0.5;       // per-player quota when the pool is at capacity
  double capacity = 1000.0;     // carrying capacity of the pool

  // Aggregate extraction rates under full cooperation and full defection.
  // They partition growth_rate into the slow/moderate/rapid regimes.
  double coop_extraction() const { return max_quota * group_size / capacity; }
  double defect_extraction() const { return coop_extraction() * (1.0 + defection_rate); }

  void validate() const {
    if (group_size < 2) throw std::invalid_argument("group_size must be at least 2");
    if (!(capacity > 0.0)) throw std::invalid_argument("capacity must be positive");
    if (!(max_quota > 0.0)) throw std::invalid_argument("max_quota must be positive");
    if (!(growth_rate >= 0.0)) throw std::invalid_argument("growth_rate must be nonnegative");
    if (!(tax >= 0.0)) throw std::invalid_argument("tax must be nonnegative");
    if (!(defection_rate >= 0.0)) throw std::invalid_argument("defection_rate must be nonnegative");
  }
};

// Mean-field state: cooperator fraction and current resource level.
struct SystemState {
  double coop_fraction = 0.0;  // in [0, 1]
  double resource = 0.0;       // in [0, capacity]
};

inline void validate_state(const ModelParams& params, const SystemState& state) {
  if (!(state.coop_fraction >= 0.0 && state.coop_fraction <= 1.0))
    throw std::domain_error("coop_fraction must lie in [0, 1]");
  if (!(state.resource >= 0.0 && state.resource <= params.capacity))
    throw std::domain_error("resource must lie in [0, capacity]");
}

// Per-player extraction of a rule-abiding cooperator at pool level y.
inline double per_capita_quota(const ModelParams& params, double y) {
  if (!(y >= 0.0 && y <= params.capacity))
    throw std::domain_error("per_capita_quota: resource outside [0, capacity]");
  return params.max_quota * y / params.capacity;
}

// Per-player extraction of a defector: the quota inflated by the defection rate.
inline double defector_take(const ModelParams& params, double y) {
  return per_capita_quota(params, y) * (1.0 + params.defection_rate);
}

namespace detail {

// (1 - (1-x)^N) / x, continued with its limit N at x = 0. This is the
// expected value of N/(K+1) with K ~ Binom(N-1, x): the refund multiplier a
// cooperator applies to the tax.
inline double reward_share_factor(int n, double x) {
  if (x == 0.0) return static_cast<double>(n);
  if (x == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-x)) / x;
}

// (1 - x^N) / (1 - x), continued with its limit N at x = 1. Expected value
// of N/(K+1) with K ~ Binom(N-1, 1-x): the fine multiplier on defectors.
inline double punishment_share_factor(int n, double x) {
  if (x == 1.0) return static_cast<double>(n);
  if (x == 0.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log(x)) / (1.0 - x);
}

}  // namespace detail

// Average cooperator-minus-defector payoff, closed form. Removable
// singularities (x = 0 for reward, x = 1 for punishment) are replaced by
// their limit value so the expression is continuous on the whole box.
// No range check on the state: the equilibrium solver evaluates this along
// the resource nullcline, which may leave [0, capacity].
inline double payoff_diff_closed(IncentiveKind kind, const ModelParams& params,
                                 const SystemState& state) {
  const double extraction_gap =
      params.max_quota * state.resource / params.capacity * params.defection_rate;
  const double share = kind == IncentiveKind::Reward
                           ? detail::reward_share_factor(params.group_size, state.coop_fraction)
                           : detail::punishment_share_factor(params.group_size, state.coop_fraction);
  return params.tax * share - extraction_gap;
}

namespace detail {

// Binomial(m, x) point probabilities by the term-ratio recurrence, started
// from whichever tail has the larger initial mass so the start never
// underflows.
inline std::vector<double> binomial_weights(int m, double x) {
  std::vector<double> w(static_cast<std::size_t>(m) + 1, 0.0);
  if (x == 0.0) {
    w[0] = 1.0;
    return w;
  }
  if (x == 1.0) {
    w[static_cast<std::size_t>(m)] = 1.0;
    return w;
  }
  if (x <= 0.5) {
    w[0] = pow_int(1.0 - x, m);
    for (int k = 0; k < m; ++k)
      w[k + 1] = w[k] * (static_cast<double>(m - k) / (k + 1)) * (x / (1.0 - x));
  } else {
    w[static_cast<std::size_t>(m)] = pow_int(x, m);
    for (int k = m; k > 0; --k)
      w[k - 1] = w[k] * (static_cast<double>(k) / (m - k + 1)) * ((1.0 - x) / x);
  }
  return w;
}

}  // namespace detail

// Cooperator-minus-defector payoff computed directly from the binomial
// expectations over the co-players' composition. Reference route for the
// closed form; capped at small group sizes where the term recurrences are
// exact to roundoff.
inline constexpr int kPayoffSumMaxGroup = 64;

inline double payoff_diff_sum(IncentiveKind kind, const ModelParams& params,
                              const SystemState& state) {
  const int n = params.group_size;
  if (n > kPayoffSumMaxGroup)
    throw std::invalid_argument("payoff_diff_sum: group_size exceeds the reference bound of 64");
  const double x = state.coop_fraction;
  const double quota = params.max_quota * state.resource / params.capacity;
  const double take = quota * (1.0 + params.defection_rate);
  const double tax = params.tax;
  const std::vector<double> w = detail::binomial_weights(n - 1, x);

  double coop = 0.0, defect = 0.0;
  if (kind == IncentiveKind::Reward) {
    // k co-player cooperators; the focal cooperator shares the pot with k others.
    for (int k = 0; k <= n - 1; ++k) {
      coop += w[k] * (quota - tax + n * tax / (k + 1));
      defect += w[k] * (take - tax);
    }
  } else {
    // k co-player cooperators leaves n-1-k co-player defectors; a focal
    // defector splits the fine with those, so the divisor is n - k.
    for (int k = 0; k <= n - 1; ++k) {
      coop += w[k] * (quota - tax);
      defect += w[k] * (take - tax - n * tax / (n - k));
    }
  }
  return coop - defect;
}

// Time derivatives of the coupled system.
struct Rates {
  double dx_dt = 0.0;
  double dy_dt = 0.0;
};

// Replicator dynamics for the cooperator fraction coupled to logistic
// regrowth minus total extraction for the pool. The x-component is evaluated
// in the polynomial form delta*(1-x)*(1-(1-x)^N) - beta*x*(1-x)*y (reward)
// so it is smooth across the whole box and exactly zero at x = 0 and x = 1.
inline Rates vector_field(IncentiveKind kind, const ModelParams& params,
                          const SystemState& state) {
  const double x = state.coop_fraction;
  const double y = state.resource;
  const double beta = params.max_quota * params.defection_rate / params.capacity;
  const int n = params.group_size;

  double dx;
  if (kind == IncentiveKind::Reward) {
    dx = params.tax * (1.0 - x) * (1.0 - detail::pow_int(1.0 - x, n)) -
         beta * x * (1.0 - x) * y;
  } else {
    dx = params.tax * x * (1.0 - detail::pow_int(x, n)) - beta * x * (1.0 - x) * y;
  }

  const double harvest_rate =
      params.max_quota * params.group_size / params.capacity *
      (1.0 + (1.0 - x) * params.defection_rate);
  const double dy = y * (params.growth_rate * (1.0 - y / params.capacity) - harvest_rate);
  return {dx, dy};
}

enum class GrowthRegime { Slow, Moderate, Rapid, Boundary };

inline const char* to_string(GrowthRegime g) {
  switch (g) {
    case GrowthRegime::Slow: return "slow";
    case GrowthRegime::Moderate: return "moderate";
    case GrowthRegime::Rapid: return "rapid";
    case GrowthRegime::Boundary: return "boundary";
  }
  return "?";
}

struct Regime {
  GrowthRegime kind = GrowthRegime::Slow;
  double coop_extraction = 0.0;    // E_C
  double defect_extraction = 0.0;  // E_D
};

// Places growth_rate relative to the two extraction thresholds. Ties within
// 1e-12 * max(1, E_D) are reported as Boundary rather than forced to a side.
inline Regime classify_regime(const ModelParams& params) {
  params.validate();
  Regime regime;
  regime.coop_extraction = params.coop_extraction();
  regime.defect_extraction = params.defect_extraction();
  const double tol = 1e-12 * std::max(1.0, regime.defect_extraction);
  const double r = params.growth_rate;
  if (std::abs(r - regime.coop_extraction) <= tol ||
      std::abs(r - regime.defect_extraction) <= tol) {
    regime.kind = GrowthRegime::Boundary;
  } else if (r < regime.coop_extraction) {
    regime.kind = GrowthRegime::Slow;
  } else if (r < regime.defect_extraction) {
    regime.kind = GrowthRegime::Moderate;
  } else {
    regime.kind = GrowthRegime::Rapid;
  }
  return regime;
}

// Existence test for the reward model's interior fixed point. The two gap
// values are the payoff difference evaluated on the resource nullcline at
// x = 1 and x = 0; the interior point exists iff the (strictly decreasing)
// gap changes sign between them.
struct RewardInteriorConditions {
  double gap_at_full_coop = 0.0;    // delta - alpha b_m + alpha N b_m^2 / (r R_m)
  double gap_at_full_defect = 0.0;  // N delta - alpha b_m + alpha (1+alpha) N b_m^2 / (r R_m)
  bool exists = false;              // both inequalities strict
  bool boundary_tie = false;        // an expression is exactly zero
};

inline RewardInteriorConditions reward_interior_conditions(const ModelParams& params) {
  params.validate();
  if (!(params.growth_rate > 0.0))
    throw std::domain_error("reward_interior_conditions: growth_rate must be positive");
  const double alpha = params.defection_rate;
  const double bm = params.max_quota;
  const double shared = alpha * params.group_size * bm * bm /
                        (params.growth_rate * params.capacity);
  RewardInteriorConditions c;
  c.gap_at_full_coop = params.tax - alpha * bm + shared;
  c.gap_at_full_defect = params.group_size * params.tax - alpha * bm + shared + alpha * shared;
  c.exists = c.gap_at_full_coop < 0.0 && c.gap_at_full_defect > 0.0;
  c.boundary_tie = c.gap_at_full_coop == 0.0 || c.gap_at_full_defect == 0.0;
  return c;
}

inline bool reward_interior_exists(const ModelParams& params) {
  return reward_interior_conditions(params).exists;
}

}  // namespace commons_lab
