#include <catch2/catch.hpp>

#include <random>

#include "commons_lab/equilibria.hpp"
#include "test_helpers.hpp"

using namespace commons_lab;
using test_helpers::fd_jacobian;
using test_helpers::quadratic_interior_roots;
using test_helpers::standard_params;

TEST_CASE("boundary fixed points appear exactly when their pool level is positive") {
  SECTION("slow growth keeps only the corners") {
    const auto pts = boundary_fixed_points(IncentiveKind::Reward, standard_params(0.25, 0.2));
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].coop_fraction == 0.0);
    CHECK(pts[1].coop_fraction == 1.0);
    CHECK(pts[0].resource == 0.0);
    CHECK(pts[1].resource == 0.0);
  }
  SECTION("moderate growth adds the full-cooperation point") {
    const auto pts = boundary_fixed_points(IncentiveKind::Reward, standard_params(0.6, 0.2));
    REQUIRE(pts.size() == 3);
    CHECK(pts[2].coop_fraction == 1.0);
    CHECK(pts[2].resource == Approx(166.6667).margin(1e-3));
  }
  SECTION("rapid growth carries all four") {
    const auto pts = boundary_fixed_points(IncentiveKind::Reward, standard_params(1.0, 0.2));
    REQUIRE(pts.size() == 4);
    CHECK(pts[2].resource == Approx(500.0));   // (1, R_m - N b_m / r)
    CHECK(pts[3].resource == Approx(250.0));   // (0, R_m - N b_m (1+alpha) / r)
    CHECK(pts[3].coop_fraction == 0.0);
  }
  SECTION("threshold tie excludes the zero-height point") {
    const auto pts = boundary_fixed_points(IncentiveKind::Reward, standard_params(0.5, 0.2));
    CHECK(pts.size() == 2);
  }
}

TEST_CASE("interior roots match the large-group quadratic reference") {
  SECTION("reward, moderate growth, low tax") {
    const ModelParams p = standard_params(0.6, 0.02);
    const auto roots = interior_fixed_points(IncentiveKind::Reward, p);
    const auto quad = quadratic_interior_roots(IncentiveKind::Reward, p);
    REQUIRE(roots.size() == 1);
    REQUIRE(quad.size() == 1);
    CHECK(roots[0].coop_fraction == Approx(quad[0]).margin(1e-9));
    CHECK(roots[0].coop_fraction == Approx(0.831).margin(0.01));
    CHECK(roots[0].resource == Approx(96.3).margin(1.0));
  }
  SECTION("reward, high tax excludes the interior point") {
    CHECK(interior_fixed_points(IncentiveKind::Reward, standard_params(0.6, 0.2)).empty());
  }
  SECTION("punishment bistable set carries two roots") {
    const ModelParams p = standard_params(0.6, 0.004);
    const auto roots = interior_fixed_points(IncentiveKind::Punishment, p);
    const auto quad = quadratic_interior_roots(IncentiveKind::Punishment, p);
    REQUIRE(roots.size() == 2);
    REQUIRE(quad.size() == 2);
    CHECK(roots[0].coop_fraction == Approx(quad[0]).margin(1e-9));
    CHECK(roots[1].coop_fraction == Approx(quad[1]).margin(1e-9));
    CHECK(roots[0].coop_fraction == Approx(0.760).margin(0.01));
    CHECK(roots[1].coop_fraction == Approx(0.840).margin(0.01));
  }
  SECTION("roots never leave the open box") {
    for (auto kind : {IncentiveKind::Reward, IncentiveKind::Punishment}) {
      for (double r : {0.1, 0.6, 0.9, 1.4}) {
        for (double tax : {1e-4, 4e-3, 0.04, 0.2}) {
          const ModelParams p = standard_params(r, tax);
          for (const SystemState& s : interior_fixed_points(kind, p)) {
            CHECK(s.coop_fraction > 0.0);
            CHECK(s.coop_fraction < 1.0);
            CHECK(s.resource > 0.0);
            CHECK(s.resource < p.capacity);
          }
        }
      }
    }
  }
}

TEST_CASE("analytic Jacobian entries match hand derivations") {
  const ModelParams p = standard_params(0.6, 0.2);
  SECTION("resource self-damping at the full-cooperation corner") {
    const Matrix2 j = jacobian(IncentiveKind::Reward, p, {1.0, 0.0});
    CHECK(j.yy == Approx(p.growth_rate - p.coop_extraction()));
    CHECK(j.xy == 0.0);
  }
  SECTION("no incentive and no over-extraction freezes the strategy row") {
    ModelParams flat = p;
    flat.tax = 0.0;
    flat.defection_rate = 0.0;
    for (auto kind : {IncentiveKind::Reward, IncentiveKind::Punishment}) {
      const Matrix2 j = jacobian(kind, flat, {0.4, 321.0});
      CHECK(j.xx == 0.0);
      CHECK(j.xy == 0.0);
    }
  }
}

TEST_CASE("analytic Jacobian agrees with central differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0.02, 0.98);
  for (int i = 0; i < 50; ++i) {
    const auto c = test_helpers::random_case(rng);
    ModelParams p = c.params;
    if (p.growth_rate == 0.0) p.growth_rate = 0.3;
    const SystemState s{ux(rng), p.capacity * ux(rng)};
    for (auto kind : {IncentiveKind::Reward, IncentiveKind::Punishment}) {
      const Matrix2 a = jacobian(kind, p, s);
      const Matrix2 f = fd_jacobian(kind, p, s);
      CHECK(std::abs(a.xx - f.xx) <= 1e-5 * std::max(1.0, std::abs(a.xx)));
      CHECK(std::abs(a.xy - f.xy) <= 1e-5 * std::max(1.0, std::abs(a.xy)));
      CHECK(std::abs(a.yx - f.yx) <= 1e-5 * std::max(1.0, std::abs(a.yx)));
      CHECK(std::abs(a.yy - f.yy) <= 1e-5 * std::max(1.0, std::abs(a.yy)));
    }
  }
}

TEST_CASE("eigenvalue solver covers real and complex pairs") {
  const auto real_pair = eigenvalues({2.0, 0.0, 0.0, -3.0});
  CHECK(real_pair[0].real() == Approx(-3.0));
  CHECK(real_pair[1].real() == Approx(2.0));
  CHECK(real_pair[0].imag() == 0.0);

  const auto rotation = eigenvalues({0.0, -1.0, 1.0, 0.0});
  CHECK(rotation[0].real() == Approx(0.0).margin(1e-15));
  CHECK(rotation[0].imag() == Approx(-1.0));
  CHECK(rotation[1].imag() == Approx(1.0));
}

TEST_CASE("classification matches the known stability structure per regime") {
  SECTION("slow growth: origin unstable, depleted cooperation stable") {
    const ModelParams p = standard_params(0.25, 0.2);
    for (auto kind : {IncentiveKind::Reward, IncentiveKind::Punishment}) {
      const FixedPoint origin = classify(kind, p, {0.0, 0.0});
      CHECK(origin.stability != Stability::Stable);
      const FixedPoint coop = classify(kind, p, {1.0, 0.0});
      CHECK(coop.stability == Stability::Stable);
      CHECK(coop.kind == FixedPointKind::Corner);
    }
  }
  SECTION("rapid growth, high tax: sustained full cooperation is stable") {
    const ModelParams p = standard_params(1.0, 0.2);
    const FixedPoint fp = classify(IncentiveKind::Reward, p, {1.0, 500.0});
    CHECK(fp.stability == Stability::Stable);
    CHECK(fp.kind == FixedPointKind::CoopBoundary);
  }
  SECTION("punishment rapid-growth interior point is not stable") {
    const ModelParams p = standard_params(0.9, 0.003);
    const auto roots = interior_fixed_points(IncentiveKind::Punishment, p);
    REQUIRE(roots.size() == 1);
    CHECK(classify(IncentiveKind::Punishment, p, roots[0]).stability != Stability::Stable);
  }
  SECTION("non-fixed-points are rejected") {
    const ModelParams p = standard_params(0.6, 0.2);
    CHECK_THROWS_AS(classify(IncentiveKind::Reward, p, {0.5, 500.0}), std::invalid_argument);
  }
}

TEST_CASE("equilibrium reports carry the documented counts and residuals") {
  struct Case {
    IncentiveKind kind;
    double r, tax;
    int group;
    std::size_t points;
    int stable;
  };
  const Case cases[] = {
      {IncentiveKind::Reward, 0.25, 0.2, 1000, 2, 1},
      {IncentiveKind::Reward, 0.6, 0.2, 1000, 3, 1},
      {IncentiveKind::Reward, 0.6, 0.02, 1000, 4, 1},
      {IncentiveKind::Reward, 1.0, 0.04, 1000, 5, 1},
      {IncentiveKind::Punishment, 0.25, 0.2, 1000, 2, 1},
      {IncentiveKind::Punishment, 0.6, 0.004, 1000, 5, 2},
      {IncentiveKind::Punishment, 0.9, 0.003, 1000, 5, 2},
      {IncentiveKind::Punishment, 0.006, 0.0001, 10, 4, 0},
  };
  for (const Case& c : cases) {
    const ModelParams p = standard_params(c.r, c.tax, c.group);
    const auto report = equilibrium_report(c.kind, p);
    CHECK(report.size() == c.points);
    int stable = 0;
    for (const FixedPoint& fp : report) {
      if (fp.stability == Stability::Stable) ++stable;
      CHECK(scaled_residual(c.kind, p, fp.location) < kResidualTol);
    }
    CHECK(stable == c.stable);
    for (std::size_t i = 1; i < report.size(); ++i) {
      const bool ordered =
          report[i - 1].location.coop_fraction < report[i].location.coop_fraction ||
          (report[i - 1].location.coop_fraction == report[i].location.coop_fraction &&
           report[i - 1].location.resource < report[i].location.resource);
      CHECK(ordered);
    }
  }
}

TEST_CASE("punishment full-cooperation point is stable exactly under the gap condition") {
  // (1, R_m - N b_m / r) for the punishment model: stable iff
  // -N tax + alpha b_m - alpha N b_m^2 / (r R_m) < 0, given r > E_C.
  for (double r : {0.55, 0.6, 0.75, 0.9, 1.2}) {
    for (double tax : {1e-6, 1e-5, 1e-4, 4e-3, 0.04, 0.3}) {
      const ModelParams p = standard_params(r, tax);
      const double y1 = p.capacity - p.group_size * p.max_quota / p.growth_rate;
      REQUIRE(y1 > 0.0);
      const double gap = -p.group_size * p.tax + p.defection_rate * p.max_quota -
                         p.defection_rate * p.group_size * p.max_quota * p.max_quota /
                             (p.growth_rate * p.capacity);
      const FixedPoint fp = classify(IncentiveKind::Punishment, p, {1.0, y1});
      if (gap < -kEigenTol)
        CHECK(fp.stability == Stability::Stable);
      else if (gap > kEigenTol)
        CHECK(fp.stability != Stability::Stable);
    }
  }
}

TEST_CASE("interior point counts respect the model bounds on a parameter grid") {
  for (int i = 0; i < 20; ++i) {
    for (int k = 0; k < 20; ++k) {
      const double r = 0.1 + 1.3 * i / 19.0;
      const double tax = 1e-5 + (0.25 - 1e-5) * k / 19.0;
      const ModelParams p = standard_params(r, tax);
      CHECK(interior_fixed_points(IncentiveKind::Reward, p).size() <= 1);
      CHECK(interior_fixed_points(IncentiveKind::Punishment, p).size() <= 2);
    }
  }
}
