#pragma once

// Metric expressions and radial deformations.
//
// A Metric produces the symmetric matrix of metric components at a chart
// point, evaluated in jets so every component carries exact first and
// second derivatives. Radial metrics live on link x R+ with the radial
// coordinate last and no cross terms; the deformation operators (warp
// forcing, the two-variable deformation, hyperbolic forcing) are built from
// two combinators: warped products and radial blends. Charts are chosen per
// use so that all component functions stay in closed form; nothing here
// differentiates through a chart transition.

#include <functional>
#include <memory>
#include <vector>

#include "conesmith/jet.hpp"

namespace conesmith {

// --------------------------------------------------------------------------
// Smooth step. bump(x) is 0 for x <= 0, 1 for x >= 1, strictly increasing
// in between, smooth with exactly flat tails, and bump(1/2) = 1/2.
double bump(double x);
Jet bump(const Jet& x);

// bump_ad(a, d, t) = bump(2 (t - a) / d): 0 for t <= a, 1 for t >= a + d/2.
double bump_ad(double a, double d, double t);
Jet bump_ad(double a, double d, const Jet& t);

// bump_from(r0, t) = bump(2 t - 2 r0): 0 for t <= r0, 1 for t >= r0 + 1/2.
double bump_from(double r0, double t);
Jet bump_from(double r0, const Jet& t);

// --------------------------------------------------------------------------

class Metric {
 public:
  virtual ~Metric() = default;
  virtual int dim() const = 0;
  // Symmetric dim() x dim() component matrix at the chart point x
  // (x.size() == dim(); the jets may carry more variables than dim()).
  virtual JetMatrix components(const JetVec& x) const = 0;
};
using MetricPtr = std::shared_ptr<const Metric>;

// A metric with a marked center point whose distance function is available.
class CenteredMetric : public Metric {
 public:
  virtual Jet center_distance(const JetVec& x) const = 0;
  // cosh of the center distance; overridden where the direct form is
  // smooth across the center itself.
  virtual Jet center_cosh(const JetVec& x) const {
    return cosh(center_distance(x));
  }
};
using CenteredPtr = std::shared_ptr<const CenteredMetric>;

// Metric of the form g_t + dt^2 on link x R+; chart is (link coords..., t).
class RadialMetric : public CenteredMetric {
 public:
  virtual int link_dim() const = 0;
  virtual JetMatrix link_components(const JetVec& u, const Jet& t) const = 0;

  int dim() const override { return link_dim() + 1; }
  JetMatrix components(const JetVec& x) const override;
  Jet center_distance(const JetVec& x) const override { return x.back(); }
};
using RadialPtr = std::shared_ptr<const RadialMetric>;

// Seeds every coordinate of x as an independent jet variable.
JetVec seed_chart(const Eigen::VectorXd& x);

// Component values at a plain point (derivatives dropped).
Eigen::MatrixXd metric_values(const Metric& m, const Eigen::VectorXd& x);
// Same, but throws unless the result is symmetric positive-definite.
Eigen::MatrixXd metric_values_checked(const Metric& m,
                                      const Eigen::VectorXd& x);

// --------------------------------------------------------------------------
// Leaf metrics

// scale^2 * (Euclidean metric) on R^n.
MetricPtr euclidean_metric(int n, double scale = 1.0);

// A constant component matrix (must be symmetric).
MetricPtr constant_metric(const Eigen::MatrixXd& g);

// Round unit-sphere metric in the solved-coordinate chart: the chart point
// zeta (|zeta| < 1) stands for the unit vector (sqrt(1 - |zeta|^2), zeta);
// components are delta_ij + zeta_i zeta_j / (1 - |zeta|^2). For k-simplices
// of an all-right complex this is the simplex metric in its own chart.
MetricPtr round_sphere_chart(int k);

// Hyperbolic k-space in the Poincare ball chart, centered at the origin.
CenteredPtr poincare_ball(int k);

// --------------------------------------------------------------------------
// Radial combinators

using Profile = std::function<Jet(const Jet&)>;

// f(t)^2 * link + dt^2.
RadialPtr warped_product(Profile f, MetricPtr link);
// sinh(t)^2 * link + dt^2: the hyperbolic cone over the link.
RadialPtr hyperbolic_cone(MetricPtr link);

// (1 - phi(t)) a_t + phi(t) b_t + dt^2.
RadialPtr radial_blend(Profile phi, RadialPtr a, RadialPtr b);

// Spherical cut at r0: the link metric g_{r0} / sinh^2(r0).
MetricPtr spherical_cut(RadialPtr g, double r0);

// Warp forcing: hyperbolically warped over the cut at r0 inside B_{r0},
// the original metric outside B_{r0 + 1/2}.
RadialPtr warp_force(RadialPtr g, double r0);

// Two-variable deformation: round (warped over `round`) inside B_a, the
// original metric outside B_{a + d/2}. The caller must hand a metric that
// is already warped on B_{a + d/2}; `round` is the round link metric in
// the same chart as g's link.
RadialPtr two_var_deform(RadialPtr g, double a, double d, MetricPtr round);

// Hyperbolic forcing: two_var_deform(warp_force(g, r0), r0 - d, d, round).
// Requires r0 > d > 0. Canonically hyperbolic inside B_{r0 - d}, g outside
// B_{r0 + 1/2}.
RadialPtr hyp_force(RadialPtr g, double r0, double d, MetricPtr round);

// --------------------------------------------------------------------------
// Extensions

// cosh^2(r_fiber(y)) * base(w) (+) fiber(y) on base x fiber, with the
// product center-distance law cosh R = cosh r_base * cosh r_fiber.
CenteredPtr hyp_extension(CenteredPtr base, CenteredPtr fiber);
// Extension over hyperbolic k-space in the Poincare ball chart.
CenteredPtr hyp_extension_k(int k, CenteredPtr fiber);

// --------------------------------------------------------------------------
// Families of radial metrics indexed by lambda, domain r > lambda - (1+xi).

struct MetricFamily {
  std::function<RadialPtr(double)> at;
  double xi = 0.0;
};

// Applies hyperbolic forcing at every index: lambda -> hyp_force(g_lambda,
// lambda, d, round). Throws (at call time) when lambda <= d.
MetricFamily family_force(const MetricFamily& F, double d, MetricPtr round);

// lambda = arcsinh(sinh(lambda') sin(theta)); theta = pi/2 is the identity.
double theta_reparam(double lambda_prime, double theta);
// The family index-reparametrized through theta.
MetricFamily theta_reparam_family(const MetricFamily& F, double theta);

// --------------------------------------------------------------------------
// Grid comparison and cut limits

struct GridSpec {
  Eigen::VectorXd lo, hi;  // inclusive box, one entry per chart coordinate
  int points_per_axis = 41;
};

// Sup over the grid of the componentwise difference of values, gradients,
// and Hessians: a C^2 distance with respect to the chart.
double c2_distance(const Metric& a, const Metric& b, const GridSpec& grid);
// Values only: sup over the grid of the componentwise value difference.
double c0_distance(const Metric& a, const Metric& b, const GridSpec& grid);

struct CutLimit {
  double b = 0.0;
  MetricPtr limit;                 // spherical cut at the largest lambda
  std::vector<double> deviations;  // C^2 distance of each cut to the limit
  double achieved = 0.0;           // deviation at the second-largest lambda
  bool cauchy = false;             // deviations settle monotonically
};

// Probes |cut of g_lambda at lambda + b| along the schedule against the
// cut at the largest lambda.
CutLimit cut_limit_probe(const MetricFamily& F, double b,
                         const std::vector<double>& lambdas,
                         const GridSpec& grid);

}  // namespace conesmith
