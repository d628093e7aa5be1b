#include "conesmith/smoothing.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "conesmith/curvature.hpp"
#include "conesmith/widths.hpp"

using namespace conesmith;

namespace {

ConeParams standard_params() {
  ConeParams p;
  p.r = 30.0;
  p.xi = 3.0;
  p.sigma = std::exp(-13.0);
  p.c = std::exp(7.0);
  p.d = {13.0, 13.0};
  return p;
}

// Dimension-3 complexes need one more coordinate of chart excess and a
// slightly larger radius to keep r > 2 d with depths above 6 + 2 xi.
ConeParams sphere3_params() {
  ConeParams p;
  p.r = 32.0;
  p.xi = 4.0;
  p.sigma = std::exp(-13.0);
  p.c = std::exp(7.0);
  p.d = {15.0, 15.0, 15.0};
  return p;
}

// Componentwise relative closeness with a floor tied to the largest entry,
// so zero components of huge matrices absorb cancellation noise.
void check_close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double tol) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  const double scale =
      std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const double denom =
          std::max(std::abs(a(i, j)), std::abs(b(i, j))) + 1e-3 * scale;
      CHECK(std::abs(a(i, j) - b(i, j)) <= tol * denom);
    }
}

// sinh(t)^2 * (link model values): the plain cone metric in the chart.
Eigen::MatrixXd cone_values(const Metric& model, const Eigen::VectorXd& u,
                            double t) {
  const double s2 = std::sinh(t) * std::sinh(t);
  Eigen::MatrixXd g(u.size() + 1, u.size() + 1);
  g.setZero();
  g.topLeftCorner(u.size(), u.size()) = s2 * metric_values(model, u);
  g(u.size(), u.size()) = 1.0;
  return g;
}

Eigen::VectorXd with_radius(const Eigen::VectorXd& u, double t) {
  Eigen::VectorXd p(u.size() + 1);
  p.head(u.size()) = u;
  p[u.size()] = t;
  return p;
}

// Richardson-extrapolated first derivative of one component.
double fd_gradient(const Metric& m, const Eigen::VectorXd& x, int i, int j,
                   int a, double h) {
  auto d1 = [&](double hh) {
    Eigen::VectorXd p = x, q = x;
    p[a] += hh;
    q[a] -= hh;
    return (metric_values(m, p)(i, j) - metric_values(m, q)(i, j)) /
           (2.0 * hh);
  };
  return (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dimension one

TEST_CASE("circle smoothing interpolates the round and stretched cones",
          "[smoothing]") {
  const Dim1Smoothing d1 = smooth_cone_dim1(5, 20.0, 8.0);
  REQUIRE(d1.k() == Catch::Approx(1.25));
  const RadialPtr primary = d1.metric();
  const RadialPtr forced = d1.forced();

  Eigen::VectorXd p(2);
  p[0] = 0.7;

  SECTION("round inside, stretched outside, for both constructions") {
    for (double t : {0.5, 3.0, 11.9}) {
      p[1] = t;
      const double s2 = std::sinh(t) * std::sinh(t);
      CHECK(metric_values(*primary, p)(0, 0) == Catch::Approx(s2));
      CHECK(metric_values(*forced, p)(0, 0) == Catch::Approx(s2));
    }
    for (double t : {20.1, 24.0}) {
      p[1] = t;
      const double s2 = std::sinh(t) * std::sinh(t) * 1.25 * 1.25;
      CHECK(metric_values(*primary, p)(0, 0) ==
            Catch::Approx(s2).epsilon(1e-12));
      CHECK(metric_values(*forced, p)(0, 0) ==
            Catch::Approx(s2).epsilon(1e-12));
    }
  }

  SECTION("negative curvature throughout the transition") {
    const Profile warp = [&](const Jet& t) { return sinh(t) * d1.mu(t); };
    // The forcing construction blends component matrices, so its effective
    // warp is the square root of the blended squares.
    const Profile forced_warp = [&](const Jet& t) {
      const Jet q = 1.0 + bump_ad(12.0, 8.0, t) * (1.25 * 1.25 - 1.0);
      return sinh(t) * sqrt(q);
    };
    for (double t = 0.05; t < 30.0; t += 0.05) {
      const double kp = warp_oracle_curvature(warp, t);
      const double kf = warp_oracle_curvature(forced_warp, t);
      CHECK(kp < 0.0);
      CHECK(kf < 0.0);
      if (t < 11.9 || t > 20.1) {
        CHECK(kp == Catch::Approx(-1.0).margin(1e-9));
        CHECK(kf == Catch::Approx(-1.0).margin(1e-9));
      }
    }
  }

  SECTION("derivatives of the warped product are exact") {
    p[1] = 16.0;
    const double fd = fd_gradient(*primary, p, 0, 0, 1, 1e-3);
    const JetVec seeds = seed_chart(p);
    const double an = primary->components(seeds)(0, 0).d[1];
    CHECK(an == Catch::Approx(fd).epsilon(1e-7));
  }

  SECTION("input validation") {
    CHECK_THROWS_AS(smooth_cone_dim1(2, 20.0, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(smooth_cone_dim1(5, 8.0, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(smooth_cone_dim1(5, -1.0, -2.0), std::invalid_argument);
  }
}

TEST_CASE("circle smoothing cut limits are radius independent",
          "[smoothing]") {
  const MetricFamily family = dim1_family(5, 8.0, 2.0);
  GridSpec grid;
  grid.lo = Eigen::VectorXd::Zero(1);
  grid.hi = Eigen::VectorXd::Zero(1);
  grid.points_per_axis = 1;
  const std::vector<double> lambdas{16.0, 20.0, 24.0, 28.0};

  const Dim1Smoothing d1 = smooth_cone_dim1(5, 20.0, 8.0);
  for (double b : {-8.0, -4.0, 0.0, 0.25}) {
    const CutLimit probe = cut_limit_probe(family, b, lambdas, grid);
    CHECK(probe.cauchy);
    // The warp scale at radius r + b depends on b alone, so every cut in
    // the schedule is already the limit.
    CHECK(probe.achieved <= 1e-12);
    for (double dev : probe.deviations) CHECK(dev <= 1e-12);
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(1);
    CHECK(metric_values(*probe.limit, origin)(0, 0) ==
          Catch::Approx(metric_values(*d1.cut_limit(b), origin)(0, 0)));
  }

  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(1);
  CHECK(metric_values(*d1.cut_limit(-8.0), origin)(0, 0) ==
        Catch::Approx(1.0));
  CHECK(metric_values(*d1.cut_limit(0.0), origin)(0, 0) ==
        Catch::Approx(1.25 * 1.25));
  CHECK(metric_values(*d1.cut_limit(-4.0), origin)(0, 0) ==
        Catch::Approx(std::pow(1.0 + 0.25 * bump(0.5), 2.0)));
}

// ---------------------------------------------------------------------------
// Canonical charts

TEST_CASE("canonical charts identify circles, suspensions, and octahedra",
          "[smoothing]") {
  SECTION("circle") {
    const AllRightComplex P = AllRightComplex::circle_complex(5);
    const CanonicalChart c = canonical_chart(P);
    CHECK(c.family == ChartFamily::kCircle);
    CHECK(c.m == 1);
    CHECK(c.k_factor == Catch::Approx(1.25));
    CHECK(c.cycle.size() == 5);
    CHECK(c.cycle.front() == 0);
  }

  SECTION("suspension of a pentagon") {
    const AllRightComplex P =
        AllRightComplex::suspension(AllRightComplex::circle_complex(5));
    const CanonicalChart c = canonical_chart(P);
    CHECK(c.family == ChartFamily::kSuspension);
    CHECK(c.m == 2);
    CHECK(c.k_factor == Catch::Approx(1.25));
    CHECK(c.cycle.size() == 5);
    CHECK(c.north < c.south);
    CHECK(c.north != c.south);
  }

  SECTION("suspension of a square is recognized as the octahedron") {
    const AllRightComplex P =
        AllRightComplex::suspension(AllRightComplex::circle_complex(4));
    const CanonicalChart c = canonical_chart(P);
    CHECK(c.family == ChartFamily::kSphere);
    CHECK(c.m == 2);
    CHECK(c.k_factor == Catch::Approx(1.0));
    CHECK(c.axes.size() == 3);
  }

  SECTION("canonical spheres") {
    for (int m : {2, 3}) {
      const AllRightComplex P = AllRightComplex::canonical_sphere(m);
      const CanonicalChart c = canonical_chart(P);
      CHECK(c.family == ChartFamily::kSphere);
      CHECK(c.m == m);
      CHECK(c.axes.size() == static_cast<size_t>(m + 1));
      for (const auto& axis : c.axes) CHECK(axis[0] < axis[1]);
    }
  }

  SECTION("complexes without a chart are rejected") {
    const AllRightComplex path =
        AllRightComplex::from_maximal({{0, 1}, {1, 2}, {2, 3}});
    CHECK_THROWS_AS(canonical_chart(path), std::invalid_argument);
    const AllRightComplex fan =
        AllRightComplex::from_maximal({{0, 1, 2}, {0, 1, 3}});
    CHECK_THROWS_AS(canonical_chart(fan), std::invalid_argument);
  }
}

TEST_CASE("canonical charts round trip their complexes", "[smoothing]") {
  std::mt19937_64 rng(811);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SECTION("circle") {
    const AllRightComplex P = AllRightComplex::circle_complex(5);
    const CanonicalChart c = canonical_chart(P);
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd u(1);
      u[0] = 2.0 * M_PI * unif(rng);
      const SimplexPoint x = c.point_of_chart(P, u);
      const Eigen::VectorXd v = c.chart_of_point(P, x);
      CHECK(std::remainder(v[0] - u[0], 2.0 * M_PI) ==
            Catch::Approx(0.0).margin(1e-9));
    }
  }

  SECTION("suspension") {
    const AllRightComplex P =
        AllRightComplex::suspension(AllRightComplex::circle_complex(5));
    const CanonicalChart c = canonical_chart(P);
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd u(2);
      u[0] = 2.0 * M_PI * unif(rng);
      u[1] = 0.05 + (M_PI - 0.1) * unif(rng);
      const SimplexPoint x = c.point_of_chart(P, u);
      const Eigen::VectorXd v = c.chart_of_point(P, x);
      CHECK(v[1] == Catch::Approx(u[1]).margin(1e-9));
      CHECK(std::remainder(v[0] - u[0], 2.0 * M_PI) ==
            Catch::Approx(0.0).margin(1e-9));
    }
    // Poles map to the pole vertices whatever the circle angle says.
    Eigen::VectorXd pole(2);
    pole[0] = 1.3;
    pole[1] = 0.0;
    const SimplexPoint top = canonicalize(P, c.point_of_chart(P, pole));
    CHECK(P.simplex(top.simplex) == std::vector<int>{c.north});
  }

  SECTION("spheres") {
    for (int m : {2, 3}) {
      const AllRightComplex P = AllRightComplex::canonical_sphere(m);
      const CanonicalChart c = canonical_chart(P);
      for (int i = 0; i < 50; ++i) {
        Eigen::VectorXd u(m);
        u[0] = -M_PI + 2.0 * M_PI * unif(rng);
        for (int a = 1; a < m; ++a) u[a] = 0.05 + (M_PI - 0.1) * unif(rng);
        const SimplexPoint x = c.point_of_chart(P, u);
        const Eigen::VectorXd v = c.chart_of_point(P, x);
        for (int a = 0; a < m; ++a)
          CHECK(std::remainder(v[a] - u[a], 2.0 * M_PI) ==
                Catch::Approx(0.0).margin(1e-9));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Suspension cones

TEST_CASE("suspension cone carries the plain cone metric off the patches",
          "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const ConeParams params = standard_params();
  const SmoothedConePtr cone = smooth_cone(P, params);

  const double r0 = cone->forcing_radius();
  const double d = cone->depth();
  CHECK(r0 == Catch::Approx(nested_radius(params, 0)));
  CHECK(d == Catch::Approx(13.0));
  CHECK(cone->patched_simplices().size() == 7);  // all seven vertices

  Eigen::VectorXd u(2);
  u[0] = 0.7;
  u[1] = 1.1;

  SECTION("generic directions evaluate to sigma and only sigma") {
    const auto ev = cone->evaluate(u, r0 + 2.0);
    REQUIRE(ev.candidates.size() == 1);
    CHECK(ev.chosen == -1);
    const Eigen::MatrixXd patched =
        metric_values(*cone->patched(), with_radius(u, r0 + 2.0));
    check_close(patched, cone_values(*cone->model(), u, r0 + 2.0), 1e-12);
  }

  SECTION("the forcing leaves the metric alone beyond r0 + 1/2") {
    for (double t : {r0 + 0.6, r0 + 3.0}) {
      const Eigen::VectorXd p = with_radius(u, t);
      check_close(metric_values(*cone->metric(), p),
                  metric_values(*cone->patched(), p), 1e-12);
      check_close(metric_values(*cone->metric(), p),
                  cone_values(*cone->model(), u, t), 1e-12);
    }
  }

  SECTION("the metric is round hyperbolic inside the forcing ball") {
    for (double t : {5.0, 20.0, r0 - d - 0.1}) {
      const Eigen::VectorXd p = with_radius(u, t);
      check_close(metric_values(*cone->metric(), p),
                  cone_values(*cone->round(), u, t), 1e-12);
    }
  }

  SECTION("the smoothed metric stays positive definite across the zones") {
    std::mt19937_64 rng(4131);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
      Eigen::VectorXd q(3);
      q[0] = 2.0 * M_PI * unif(rng);
      q[1] = 0.2 + (M_PI - 0.4) * unif(rng);
      q[2] = 2.0 + (r0 + 4.0) * unif(rng);
      CHECK_NOTHROW(metric_values_checked(*cone->metric(), q));
    }
  }

  SECTION("evaluations below the patched domain are rejected") {
    const JetVec seeds = seed_chart(with_radius(u, r0 - 1.0));
    CHECK_THROWS_AS(cone->patched()->components(seeds), std::domain_error);
  }
}

TEST_CASE("suspension pole patches agree with the cone metric on overlaps",
          "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const ConeParams params = standard_params();
  const SmoothedConePtr cone = smooth_cone(P, params);
  const CanonicalChart& chart = cone->chart();
  const double r0 = cone->forcing_radius();

  // Directions at angle gamma from a pole with sin(gamma) inside the open
  // band (sigma, c sigma) lie in both the pole's membership region and the
  // top region; both candidates must produce the same metric.
  const double lo = std::log(params.sigma) + 0.2;
  const double hi = std::log(params.c * params.sigma) - 0.2;
  std::mt19937_64 rng(90210);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int double_holds = 0;
  for (int i = 0; i < 60; ++i) {
    const double gamma = std::asin(std::exp(lo + (hi - lo) * unif(rng)));
    const bool north = i % 2 == 0;
    Eigen::VectorXd u(2);
    u[0] = 2.0 * M_PI * unif(rng);
    u[1] = north ? gamma : M_PI - gamma;
    const double t = r0 + 4.0 * unif(rng);

    const auto ev = cone->evaluate(u, t);
    REQUIRE(ev.candidates.size() >= 1);
    if (ev.candidates.size() == 2) {
      ++double_holds;
      CHECK(ev.chosen != -1);
      CHECK(ev.candidates.back().simplex == -1);
      CHECK(ev.disagreement <= 1e-9);
      // The patched metric itself performs the same cross-check.
      CHECK_NOTHROW(metric_values(*cone->patched(), with_radius(u, t)));
    }
  }
  // The band is strictly inside both thresholds, so every draw must hold
  // doubly; anything else means the regions drifted.
  CHECK(double_holds == 60);
}

TEST_CASE("pole patch pullbacks carry exact values and first derivatives",
          "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const SmoothedConePtr cone = smooth_cone(P, standard_params());
  const CanonicalChart& chart = cone->chart();

  // The pole patch extends over every direction in the northern chart, not
  // just its membership region, so derivative checks can run at angles
  // where finite differencing is well conditioned.
  int north_vertex = -1;
  for (int sid : cone->patched_simplices()) {
    if (P.simplex(sid) == std::vector<int>{chart.north}) north_vertex = sid;
  }
  REQUIRE(north_vertex >= 0);
  const MetricPtr pulled = cone->patch_pullback(north_vertex);

  for (double theta : {0.3, 0.9}) {
    Eigen::VectorXd p(3);
    p[0] = 0.8;
    p[1] = theta;
    p[2] = 33.0;
    const JetVec seeds = seed_chart(p);
    const JetMatrix g = pulled->components(seeds);
    const Eigen::MatrixXd values = g.values();
    const double scale = values.cwiseAbs().maxCoeff();
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        for (int a = 0; a < 3; ++a) {
          const double an = g(i, j).constant() ? 0.0 : g(i, j).d[a];
          const double fd = fd_gradient(*pulled, p, i, j, a, 1e-3);
          CHECK(std::abs(an - fd) <=
                1e-5 * (std::abs(fd) + 1e-6 * scale));
        }
  }
}

TEST_CASE("product coordinates satisfy the split identities", "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const SmoothedConePtr cone = smooth_cone(P, standard_params());
  const CanonicalChart& chart = cone->chart();

  int north_vertex = -1, equator_vertex = -1;
  for (int sid : cone->patched_simplices()) {
    const int v = P.simplex(sid)[0];
    if (v == chart.north) north_vertex = sid;
    if (v == chart.cycle[1]) equator_vertex = sid;
  }
  REQUIRE(north_vertex >= 0);
  REQUIRE(equator_vertex >= 0);

  std::mt19937_64 rng(2218);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    Eigen::VectorXd u(2);
    u[0] = 2.0 * M_PI * unif(rng);
    u[1] = 0.1 + 1.2 * unif(rng);
    const double t = 30.0 + 10.0 * unif(rng);

    // Pole split: gamma is the polar angle itself.
    const Eigen::VectorXd pole = cone->product_point(north_vertex, u, t);
    REQUIRE(pole.size() == 3);
    CHECK(std::sinh(pole[2]) ==
          Catch::Approx(std::sin(u[1]) * std::sinh(t)).epsilon(1e-12));
    CHECK(std::cosh(pole[0]) * std::cosh(pole[2]) ==
          Catch::Approx(std::cosh(t)).epsilon(1e-12));

    // Equator split: same base/fiber relation with its own gamma.
    const Eigen::VectorXd eq = cone->product_point(equator_vertex, u, t);
    REQUIRE(eq.size() == 3);
    CHECK(std::cosh(eq[0]) * std::cosh(eq[2]) ==
          Catch::Approx(std::cosh(t)).epsilon(1e-12));
    CHECK(eq[2] <= t);
  }

  SECTION("split radii helper") {
    for (double s : {0.5, 5.0, 40.0}) {
      for (double beta : {1e-8, 0.3, M_PI / 2.0}) {
        const SplitRadii sr = split_radii(s, beta);
        const SplitRadii mirrored = split_radii(s, -beta);
        CHECK(sr.fiber_r == mirrored.fiber_r);
        CHECK(sr.base_t == mirrored.base_t);
        CHECK(std::sinh(sr.fiber_r) ==
              Catch::Approx(std::sin(beta) * std::sinh(s)).epsilon(1e-12));
        CHECK(std::cosh(sr.base_t) * std::cosh(sr.fiber_r) ==
              Catch::Approx(std::cosh(s)).epsilon(1e-10));
      }
    }
    const SplitRadii flat = split_radii(7.0, 0.0);
    CHECK(flat.fiber_r == 0.0);
    CHECK(flat.base_t == Catch::Approx(7.0));
    CHECK_THROWS_AS(split_radii(-1.0, 0.3), std::invalid_argument);
  }
}

TEST_CASE("pole patch curvature stays negative across the fiber transition",
          "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const SmoothedConePtr cone = smooth_cone(P, standard_params());
  const CanonicalChart& chart = cone->chart();

  int north_vertex = -1;
  for (int sid : cone->patched_simplices())
    if (P.simplex(sid) == std::vector<int>{chart.north}) north_vertex = sid;
  REQUIRE(north_vertex >= 0);
  const LinkSmoothing& ls = cone->link_smoothing(north_vertex);
  REQUIRE(ls.circle);
  CHECK(ls.circle->segments == 5);

  // The patch metric is the extension of the smoothed circle cone over a
  // hyperbolic line; its chart (t_base, psi, r_fiber) has exact jets, so
  // true sectional curvature is available everywhere on it.
  std::mt19937_64 rng(5150);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double rf : {5.0, 18.0, 23.5, 28.0, 31.0, 40.0}) {
    Eigen::VectorXd p(3);
    p[0] = 0.6;
    p[1] = 0.9;
    p[2] = rf;
    const CurvatureProbe probe(*ls.patch, p);
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      Eigen::VectorXd a(3), b(3);
      for (int i = 0; i < 3; ++i) {
        a[i] = gauss(rng);
        b[i] = gauss(rng);
      }
      const double k = probe.sectional(a, b);
      CHECK(k < 0.0);
      worst = std::max(worst, std::abs(k + 1.0));
    }
    // Outside the warp window the fiber is exactly a hyperbolic cone and
    // the extension is hyperbolic 3-space.
    if (rf < 17.0 - 0.5 || rf > 30.0 + 0.5) CHECK(worst <= 1e-9);
  }
}

TEST_CASE("suspension cut limits settle along the forcing family",
          "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const ConeParams params = standard_params();
  const MetricFamily family = smoothed_family(P, params);
  const std::vector<double> lambdas{43.0, 46.0, 49.0, 52.0};

  SECTION("generic directions cut to the complex metric at every radius") {
    GridSpec grid;
    grid.lo = Eigen::VectorXd(2);
    grid.hi = Eigen::VectorXd(2);
    grid.lo << 0.5, 1.0;
    grid.hi << 0.7, 1.2;
    grid.points_per_axis = 3;
    const CutLimit probe = cut_limit_probe(family, 0.0, lambdas, grid);
    CHECK(probe.cauchy);
    CHECK(probe.achieved <= 1e-9);
    // The limit is the complex metric itself.
    const SmoothedConePtr cone = smooth_cone(P, params);
    Eigen::VectorXd u(2);
    u << 0.6, 1.1;
    check_close(metric_values(*probe.limit, u),
                metric_values(*cone->model(), u), 1e-9);
  }

  SECTION("pole directions converge as the fiber transition is pushed out") {
    GridSpec grid;
    grid.lo = Eigen::VectorXd(2);
    grid.hi = Eigen::VectorXd(2);
    grid.lo << 0.5, 2e-7;
    grid.hi << 0.7, 5e-7;
    grid.points_per_axis = 3;
    const CutLimit probe = cut_limit_probe(family, 0.0, lambdas, grid);
    CHECK(probe.cauchy);
    REQUIRE(probe.deviations.size() == 3);
    CHECK(probe.deviations[1] < probe.deviations[0]);
    CHECK(probe.deviations[2] < probe.deviations[1]);
    CHECK(probe.achieved <= 1e-2 * probe.deviations.front());
  }
}

TEST_CASE("forcing family tracks the base construction", "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const ConeParams params = standard_params();
  const SmoothedConePtr cone = smooth_cone(P, params);
  const MetricFamily family = smoothed_family(P, params);
  CHECK(family.xi == Catch::Approx(params.xi));

  const double r0 = cone->forcing_radius();
  const RadialPtr at_base = family.at(r0);

  Eigen::VectorXd u(2);
  u << 0.9, 1.3;
  for (double t : {r0 - 5.0, r0 + 1.0, r0 + 3.0}) {
    const Eigen::VectorXd p = with_radius(u, t);
    check_close(metric_values(*at_base, p),
                metric_values(*cone->metric(), p), 1e-9);
  }
}

// ---------------------------------------------------------------------------
// Octahedral and three-sphere cones

TEST_CASE("octahedral cone is round hyperbolic space", "[smoothing]") {
  const AllRightComplex P = AllRightComplex::canonical_sphere(2);
  const ConeParams params = standard_params();
  const SmoothedConePtr cone = smooth_cone(P, params);

  // Vertex links are squares, whose smoothed circle cone is the hyperbolic
  // plane on the nose; every patch is then hyperbolic 3-space in product
  // coordinates and the whole construction collapses to the plain cone.
  for (int sid : cone->patched_simplices()) {
    const LinkSmoothing& ls = cone->link_smoothing(sid);
    REQUIRE(ls.circle);
    CHECK(ls.circle->segments == 4);
    CHECK(ls.circle->k() == Catch::Approx(1.0));
  }

  std::mt19937_64 rng(61803);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd p(3);
    p[0] = -M_PI + 2.0 * M_PI * unif(rng);
    p[1] = 0.2 + (M_PI - 0.4) * unif(rng);
    p[2] = 1.0 + 50.0 * unif(rng);
    Eigen::MatrixXd h3 = Eigen::MatrixXd::Zero(3, 3);
    const double s2 = std::sinh(p[2]) * std::sinh(p[2]);
    h3(0, 0) = s2 * std::sin(p[1]) * std::sin(p[1]);
    h3(1, 1) = s2;
    h3(2, 2) = 1.0;
    check_close(metric_values(*cone->metric(), p), h3, 1e-12);
  }

  // Sectional curvature sits at -1 everywhere it is probed.
  for (double t : {10.0, 35.0, 44.0, 50.0}) {
    Eigen::VectorXd p(3);
    p << 0.8, 1.2, t;
    const CurvatureProbe probe(*cone->metric(), p);
    for (int trial = 0; trial < 6; ++trial) {
      Eigen::VectorXd a(3), b(3);
      for (int i = 0; i < 3; ++i) {
        a[i] = gauss(rng);
        b[i] = gauss(rng);
      }
      CHECK(probe.sectional(a, b) == Catch::Approx(-1.0).margin(1e-4));
    }
  }
}

TEST_CASE("three sphere patches agree with the cone metric on overlaps",
          "[smoothing]") {
  const AllRightComplex P = AllRightComplex::canonical_sphere(3);
  const ConeParams params = sphere3_params();
  const SmoothedConePtr cone = smooth_cone(P, params);
  const CanonicalChart& chart = cone->chart();
  const double r1 = cone->forcing_radius();
  CHECK(r1 == Catch::Approx(nested_radius(params, 1)));
  CHECK(cone->patched_simplices().size() == 8 + 24);

  // Build chart coordinates from an ambient unit vector.
  const auto chart_of_ambient = [&](const Eigen::Vector4d& x) {
    Eigen::VectorXd u(3);
    u[0] = std::atan2(x[1], x[0]);
    u[1] = std::atan2(std::hypot(x[0], x[1]), x[2]);
    u[2] = std::atan2(x.head<3>().norm(), x[3]);
    return u;
  };

  std::mt19937_64 rng(27182);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double sigma = params.sigma;
  const double csigma = params.c * params.sigma;
  const double beta1 = params.c * sigma * sigma;  // edge membership width
  const double alpha1 = sigma * sigma;            // edge exclusion width

  SECTION("vertex, edge, and top regions all hold near an edge") {
    int triples = 0;
    for (int i = 0; i < 12; ++i) {
      // Angle from the +0 vertex inside the (sigma, c sigma) band, and a
      // complementary component below the edge membership width but above
      // its exclusion width, so all three regions hold at once.
      const double a = std::exp(std::log(sigma) + 0.3 +
                                (std::log(csigma) - std::log(sigma) - 0.6) *
                                    unif(rng));
      const double g = std::exp(std::log(alpha1) + 0.7 +
                                (std::log(beta1) - std::log(alpha1) - 1.4) *
                                    unif(rng));
      const double phase = 2.0 * M_PI * unif(rng);
      Eigen::Vector4d x;
      x[0] = std::cos(a);
      x[1] = std::sin(a);
      x[2] = g * std::cos(phase);
      x[3] = g * std::sin(phase);
      x[0] *= std::sqrt(1.0 - g * g);  // renormalize the edge-plane part
      x[1] *= std::sqrt(1.0 - g * g);

      const Eigen::VectorXd u = chart_of_ambient(x);
      const double t = r1 + 3.0 * unif(rng);
      const auto ev = cone->evaluate(u, t);
      if (ev.candidates.size() == 3) ++triples;
      REQUIRE(ev.candidates.size() >= 2);
      CHECK(ev.disagreement <= 1e-9);
      CHECK(ev.candidates.back().simplex == -1);
      CHECK_NOTHROW(metric_values(*cone->patched(), with_radius(u, t)));
    }
    CHECK(triples == 12);
  }

  SECTION("edge and top regions hold between the vertex bands") {
    for (int i = 0; i < 8; ++i) {
      const double a = 0.2 + 1.1 * unif(rng);  // far from both endpoints
      const double g = std::exp(std::log(alpha1) + 0.7 +
                                (std::log(beta1) - std::log(alpha1) - 1.4) *
                                    unif(rng));
      const double phase = 2.0 * M_PI * unif(rng);
      Eigen::Vector4d x;
      x[0] = std::sqrt(1.0 - g * g) * std::cos(a);
      x[1] = std::sqrt(1.0 - g * g) * std::sin(a);
      x[2] = g * std::cos(phase);
      x[3] = g * std::sin(phase);

      const Eigen::VectorXd u = chart_of_ambient(x);
      const double t = r1 + 3.0 * unif(rng);
      const auto ev = cone->evaluate(u, t);
      REQUIRE(ev.candidates.size() == 2);
      CHECK(ev.candidates.front().simplex >= 0);
      CHECK(ev.candidates.back().simplex == -1);
      CHECK(ev.disagreement <= 1e-9);
    }
  }

  SECTION("vertex links recurse to octahedral cones") {
    int vertex_patch = -1;
    for (int sid : cone->patched_simplices())
      if (P.simplex(sid).size() == 1) {
        vertex_patch = sid;
        break;
      }
    REQUIRE(vertex_patch >= 0);
    const LinkSmoothing& ls = cone->link_smoothing(vertex_patch);
    REQUIRE(ls.cone);
    CHECK(ls.cone->dim() == 2);
    CHECK(ls.cone->chart().family == ChartFamily::kSphere);
    CHECK(ls.link.complex.vertex_count() == 6);
  }
}

// ---------------------------------------------------------------------------
// Scale independence

TEST_CASE("the metric does not depend on the membership width scale",
          "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const ConeParams params = standard_params();
  const CIndependenceReport rep =
      c_independence_check(P, params, 3.0 * params.c, 32, 20240817);
  CHECK(rep.values_agree);
  CHECK(rep.max_disagreement <= 1e-9);
  CHECK(rep.gaps_hold);
  CHECK(rep.min_gap_margin > 0.0);
  CHECK(rep.ok());

  CHECK_THROWS_AS(c_independence_check(P, params, params.c, 4, 1),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Closed link manifolds

TEST_CASE("manifold forcing grafts a closed flat link", "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));
  const ConeParams params = standard_params();
  const SmoothedConePtr cone = smooth_cone(P, params);
  const double r0 = cone->forcing_radius();
  const double d = cone->depth();

  Eigen::MatrixXd flat = Eigen::MatrixXd::Identity(2, 2);
  flat(0, 0) = 1.7;  // any closed flat torus shape works
  const MetricPtr h = constant_metric(flat);
  const ManifoldSmoothing ms = smooth_cone_manifold(P, h, params);
  CHECK(ms.forcing_radius == Catch::Approx(r0));
  CHECK(ms.depth == Catch::Approx(d));
  CHECK(ms.warnings.empty());

  Eigen::VectorXd u(2);
  u << 0.4, 2.2;

  SECTION("the inner region is the exact exponential warp of the link") {
    for (double t : {-2.0, 5.0, r0 - 2.0 * d - 0.2}) {
      const double mu = 0.5 * std::exp(t);
      Eigen::MatrixXd want = Eigen::MatrixXd::Zero(3, 3);
      want.topLeftCorner(2, 2) = mu * mu * flat;
      want(2, 2) = 1.0;
      check_close(metric_values(*ms.metric, with_radius(u, t)), want, 1e-12);
    }
  }

  SECTION("the two branches coincide at the seam") {
    const double seam = r0 - d;
    const double s2 = std::sinh(seam) * std::sinh(seam);
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(3, 3);
    want.topLeftCorner(2, 2) = s2 * flat;
    want(2, 2) = 1.0;
    for (double t : {seam - 1e-9, seam, seam + 1e-9}) {
      check_close(metric_values(*ms.metric, with_radius(u, t)), want, 1e-6);
    }
  }

  SECTION("the forced input takes over beyond r0") {
    for (double t : {r0 + 0.6, r0 + 2.0}) {
      const Eigen::VectorXd p = with_radius(u, t);
      check_close(metric_values(*ms.metric, p),
                  metric_values(*cone->metric(), p), 1e-12);
    }
  }

  SECTION("curvature is -1 inside and pinched near -1 through the blend") {
    std::mt19937_64 rng(1729);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double t : {4.0, 12.0, r0 - 1.5 * d, r0 - 0.5 * d, r0 - 0.1 * d}) {
      Eigen::VectorXd p = with_radius(u, t);
      const CurvatureProbe probe(*ms.metric, p);
      for (int trial = 0; trial < 6; ++trial) {
        Eigen::VectorXd a(3), b(3);
        for (int i = 0; i < 3; ++i) {
          a[i] = gauss(rng);
          b[i] = gauss(rng);
        }
        const double k = probe.sectional(a, b);
        if (t < r0 - 2.0 * d) {
          CHECK(k == Catch::Approx(-1.0).margin(1e-9));
        } else {
          CHECK(k == Catch::Approx(-1.0).margin(1e-4));
        }
      }
    }
  }

  SECTION("inputs are validated") {
    CHECK_THROWS_AS(manifold_force(cone->metric(), h, 2.0 * d, d),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        manifold_force(cone->metric(), constant_metric(Eigen::MatrixXd::
                                                           Identity(3, 3)),
                       r0, d),
        std::invalid_argument);
    CHECK_THROWS_AS(smooth_cone_manifold(P, nullptr, params),
                    std::invalid_argument);
  }
}

// ---------------------------------------------------------------------------
// Input validation

TEST_CASE("smoothing inputs are validated", "[smoothing]") {
  const AllRightComplex P =
      AllRightComplex::suspension(AllRightComplex::circle_complex(5));

  SECTION("chart excess must cover the cone dimension") {
    ConeParams p = standard_params();
    p.xi = 2.5;
    CHECK_THROWS_AS(smooth_cone(P, p), std::invalid_argument);
  }

  SECTION("every forcing depth must be present") {
    ConeParams p = standard_params();
    p.d = {13.0};
    CHECK_THROWS_AS(smooth_cone(P, p), std::invalid_argument);
  }

  SECTION("complexes without canonical charts are rejected") {
    const AllRightComplex path =
        AllRightComplex::from_maximal({{0, 1}, {1, 2}, {2, 3}});
    CHECK_THROWS_AS(smooth_cone(path, standard_params()),
                    std::invalid_argument);
  }

  SECTION("accessors reject unpatched simplices") {
    const SmoothedConePtr cone = smooth_cone(P, standard_params());
    const int top = P.simplices_of_dim(2).front();
    CHECK_THROWS_AS(cone->link_smoothing(top), std::invalid_argument);
    CHECK_THROWS_AS(cone->link_smoothing(-1), std::invalid_argument);
    Eigen::VectorXd u(2);
    u << 0.5, 1.0;
    CHECK_THROWS_AS(cone->product_point(top, u, 40.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(cone->patch_pullback(top), std::invalid_argument);
  }
}
