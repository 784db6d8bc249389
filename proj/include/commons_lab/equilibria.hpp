#pragma once

// Fixed-point analysis: boundary fixed-point enumeration, interior root
// finding on the resource nullcline, the analytic Jacobian, and eigenvalue
// stability classification.

#include <array>
#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include "commons_lab/dynamics.hpp"
#include "commons_lab/model.hpp"

namespace commons_lab {

enum class FixedPointKind { Corner, CoopBoundary, DefectBoundary, Interior };

inline const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::Corner: return "corner";
    case FixedPointKind::CoopBoundary: return "coop_boundary";
    case FixedPointKind::DefectBoundary: return "defect_boundary";
    case FixedPointKind::Interior: return "interior";
  }
  return "?";
}

enum class Stability { Stable, Unstable, Saddle, Marginal };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Saddle: return "saddle";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

struct FixedPoint {
  SystemState location;
  FixedPointKind kind = FixedPointKind::Interior;
  std::array<std::complex<double>, 2> eigenvalues{};
  Stability stability = Stability::Marginal;
};

struct Matrix2 {
  double xx = 0.0, xy = 0.0;
  double yx = 0.0, yy = 0.0;
  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * yx; }
};

// Partial derivatives of vector_field with respect to (x, y), from the
// closed-form smooth extension (the x-component is a polynomial in x, so the
// removable singularities need no special casing here).
inline Matrix2 jacobian(IncentiveKind kind, const ModelParams& params,
                        const SystemState& state) {
  const double x = state.coop_fraction;
  const double y = state.resource;
  const int n = params.group_size;
  const double beta = params.max_quota * params.defection_rate / params.capacity;
  const double gamma = params.max_quota * params.group_size / params.capacity;

  Matrix2 j;
  if (kind == IncentiveKind::Reward) {
    j.xx = params.tax * ((n + 1) * detail::pow_int(1.0 - x, n) - 1.0) -
           beta * y * (1.0 - 2.0 * x);
  } else {
    j.xx = params.tax * (1.0 - (n + 1) * detail::pow_int(x, n)) -
           beta * y * (1.0 - 2.0 * x);
  }
  j.xy = -beta * x * (1.0 - x);
  j.yx = params.defection_rate * gamma * y;
  j.yy = params.growth_rate * (1.0 - 2.0 * y / params.capacity) -
         gamma * (1.0 + (1.0 - x) * params.defection_rate);
  return j;
}

// Eigenvalues of a 2x2 matrix from trace and determinant, ordered by real
// part (then imaginary part).
inline std::array<std::complex<double>, 2> eigenvalues(const Matrix2& m) {
  const double t = m.trace();
  const double disc = t * t - 4.0 * m.det();
  std::array<std::complex<double>, 2> eig;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    eig[0] = {(t - root) / 2.0, 0.0};
    eig[1] = {(t + root) / 2.0, 0.0};
  } else {
    const double imag = std::sqrt(-disc) / 2.0;
    eig[0] = {t / 2.0, -imag};
    eig[1] = {t / 2.0, imag};
  }
  return eig;
}

// Residual of the field with the y-component measured relative to capacity.
inline double scaled_residual(IncentiveKind kind, const ModelParams& params,
                              const SystemState& state) {
  const Rates f = vector_field(kind, params, state);
  return std::hypot(f.dx_dt, f.dy_dt / std::max(1.0, params.capacity));
}

inline constexpr double kResidualTol = 1e-8;
inline constexpr double kEigenTol = 1e-9;

namespace detail {

inline FixedPointKind locate_kind(const ModelParams& params, const SystemState& s) {
  const double eps_x = 1e-9;
  const double eps_y = 1e-9 * std::max(1.0, params.capacity);
  const bool x_lo = s.coop_fraction <= eps_x;
  const bool x_hi = s.coop_fraction >= 1.0 - eps_x;
  const bool y_lo = s.resource <= eps_y;
  if ((x_lo || x_hi) && y_lo) return FixedPointKind::Corner;
  if (x_hi) return FixedPointKind::CoopBoundary;
  if (x_lo) return FixedPointKind::DefectBoundary;
  return FixedPointKind::Interior;
}

inline Stability stability_from(const std::array<std::complex<double>, 2>& eig) {
  const double a = eig[0].real();
  const double b = eig[1].real();
  if (a < -kEigenTol && b < -kEigenTol) return Stability::Stable;
  if (a > kEigenTol && b > kEigenTol) return Stability::Unstable;
  if ((a < -kEigenTol && b > kEigenTol) || (a > kEigenTol && b < -kEigenTol))
    return Stability::Saddle;
  return Stability::Marginal;
}

}  // namespace detail

// Classifies a point that is already known to sit on the field's zero set.
inline FixedPoint classify(IncentiveKind kind, const ModelParams& params,
                           const SystemState& location) {
  const double residual = scaled_residual(kind, params, location);
  if (!(residual < kResidualTol))
    throw std::invalid_argument("classify: location is not a fixed point (scaled residual " +
                                std::to_string(residual) + ")");
  FixedPoint fp;
  fp.location = location;
  fp.kind = detail::locate_kind(params, location);
  fp.eigenvalues = eigenvalues(jacobian(kind, params, location));
  fp.stability = detail::stability_from(fp.eigenvalues);
  return fp;
}

// Height of the resource nullcline y(x) = R_m - (N b_m / r)(1 + (1-x) alpha).
// May leave [0, capacity]; callers filter.
inline double resource_nullcline(const ModelParams& params, double x) {
  return params.capacity -
         params.group_size * params.max_quota / params.growth_rate *
             (1.0 + (1.0 - x) * params.defection_rate);
}

// The corners (0,0) and (1,0) always; the full-cooperation and
// full-defection boundary points whenever their resource level is positive
// (growth_rate above the respective extraction threshold).
inline std::vector<SystemState> boundary_fixed_points(IncentiveKind /*kind*/,
                                                      const ModelParams& params) {
  params.validate();
  std::vector<SystemState> points;
  points.push_back({0.0, 0.0});
  points.push_back({1.0, 0.0});
  if (params.growth_rate > 0.0) {
    const double y_coop =
        params.capacity - params.group_size * params.max_quota / params.growth_rate;
    if (y_coop > 0.0) points.push_back({1.0, y_coop});
    const double y_defect =
        params.capacity - params.group_size * params.max_quota *
                              (1.0 + params.defection_rate) / params.growth_rate;
    if (y_defect > 0.0) points.push_back({0.0, y_defect});
  }
  return points;
}

namespace detail {

// Payoff difference along the resource nullcline; interior fixed points are
// its zeros with nullcline height inside (0, capacity).
inline double nullcline_gap(IncentiveKind kind, const ModelParams& params, double x) {
  return payoff_diff_closed(kind, params, {x, resource_nullcline(params, x)});
}

}  // namespace detail

inline constexpr int kInteriorScanPoints = 10000;

// Scans the nullcline gap on a uniform grid over [0, 1] (endpoints via the
// kernels' limit values), brackets sign changes, and refines each bracket by
// bisection to an x-width below 1e-12.
inline std::vector<SystemState> interior_fixed_points(IncentiveKind kind,
                                                      const ModelParams& params) {
  params.validate();
  std::vector<SystemState> roots;
  if (!(params.growth_rate > 0.0)) return roots;

  const int grid = kInteriorScanPoints;
  const auto gap = [&](double x) { return detail::nullcline_gap(kind, params, x); };

  double prev_x = 0.0;
  double prev_g = gap(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    const double g = gap(x);
    double root = -1.0;
    if (prev_g == 0.0) {
      if (prev_x > 0.0) root = prev_x;
    } else if (g != 0.0 && std::signbit(prev_g) != std::signbit(g)) {
      double lo = prev_x, hi = x;
      double g_lo = prev_g;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = gap(mid);
        if (g_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(g_mid) == std::signbit(g_lo)) {
          lo = mid;
          g_lo = g_mid;
        } else {
          hi = mid;
        }
      }
      root = 0.5 * (lo + hi);
    }
    if (root > 0.0 && root < 1.0) {
      const double y = resource_nullcline(params, root);
      if (y > 0.0 && y < params.capacity) roots.push_back({root, y});
    }
    prev_x = x;
    prev_g = g;
  }
  std::sort(roots.begin(), roots.end(), [](const SystemState& a, const SystemState& b) {
    return a.coop_fraction < b.coop_fraction;
  });
  return roots;
}

// Union of boundary and interior fixed points, classified and sorted by
// (x, y). Never truncates: callers asserting count bounds (one interior
// point for reward, two for punishment) see every root the scan produced.
inline std::vector<FixedPoint> equilibrium_report(IncentiveKind kind,
                                                  const ModelParams& params) {
  std::vector<FixedPoint> report;
  for (const SystemState& s : boundary_fixed_points(kind, params))
    report.push_back(classify(kind, params, s));
  for (const SystemState& s : interior_fixed_points(kind, params))
    report.push_back(classify(kind, params, s));
  std::sort(report.begin(), report.end(), [](const FixedPoint& a, const FixedPoint& b) {
    if (a.location.coop_fraction != b.location.coop_fraction)
      return a.location.coop_fraction < b.location.coop_fraction;
    return a.location.resource < b.location.resource;
  });
  return report;
}

inline std::vector<FixedPoint> stable_points(const std::vector<FixedPoint>& report) {
  std::vector<FixedPoint> out;
  for (const FixedPoint& fp : report)
    if (fp.stability == Stability::Stable) out.push_back(fp);
  return out;
}

}  // namespace commons_lab
