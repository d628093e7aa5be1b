#pragma once

// Smoothed metrics on hyperbolic cones over all-right spherical complexes.
//
// The cone metric sigma_CP is singular along the rays through the
// codimension >= 2 skeleton. The smoothing replaces it in stages: around
// the cone of each low-dimensional simplex the metric is patched with the
// hyperbolic extension of the (recursively) smoothed cone of its link, the
// patches agree with sigma_CP where they meet the unpatched part, and a
// final hyperbolic forcing rounds everything inside a large ball. All
// metrics live in one global chart per complex: hyperspherical coordinates
// on the image sphere of the canonical sphere identification, with the
// radius last. Patch values are pulled back from per-simplex product charts
// (simplex cone factor, link cone factor) in which the extension metrics
// are in closed form; every evaluation on a region overlap computes every
// holding region's candidate and checks agreement.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "conesmith/complexes.hpp"
#include "conesmith/cones.hpp"
#include "conesmith/metrics.hpp"

namespace conesmith {

// --------------------------------------------------------------------------
// Dimension one: a circle of k' right-angled edges, identified with the
// round circle at constant speed k = k'/4.

struct Dim1Smoothing {
  int segments = 0;  // k', the number of quarter-circle edges
  double r = 0.0;    // smoothing radius
  double d2 = 0.0;   // transition depth

  double k() const { return segments / 4.0; }

  // Warp scale: 1 for t <= r - d2, k for t >= r, smooth blend between.
  double mu(double t) const;
  Jet mu(const Jet& t) const;

  // Primary construction: sinh(t)^2 mu(t)^2 dpsi^2 + dt^2 on the image
  // circle chart (psi, t). Round cone inside B_{r-d2}, the cone over the
  // length-2(pi)k circle outside B_r.
  RadialPtr metric() const;

  // Forcing construction: hyperbolic forcing of that outer cone metric,
  // with the same inner and outer behaviour. Differs slightly from
  // metric() inside the transition annulus.
  RadialPtr forced() const;

  // Closed-form limit of the spherical cut at r + b as r grows, as a
  // 1 x 1 link metric. For this mu profile the cut at finite r already
  // equals its limit.
  MetricPtr cut_limit(double b) const;
};

// Validates segments >= 3 and r > d2 > 0.
Dim1Smoothing smooth_cone_dim1(int segments, double r, double d2);

// The primary construction as a family indexed by the smoothing radius.
MetricFamily dim1_family(int segments, double d2, double xi);

// --------------------------------------------------------------------------
// Canonical charts. Circle complexes, suspensions of circle complexes, and
// canonical-sphere combinatorics carry a canonical identification with the
// round sphere; everything else needs a user-supplied one and is rejected.

enum class ChartFamily { kCircle, kSuspension, kSphere };

// Chart coordinates are hyperspherical angles on the image sphere,
// innermost first: (psi), (psi, theta), or (psi, theta, chi). The complex
// is scaled along the innermost circle by k_factor (1 for spheres).
struct CanonicalChart {
  ChartFamily family = ChartFamily::kCircle;
  int m = 0;
  double k_factor = 1.0;

  std::vector<int> cycle;                // circle / suspension base, in order
  int north = -1, south = -1;            // suspension poles
  std::vector<std::array<int, 2>> axes;  // sphere: (plus, minus) vertex ids

  SimplexPoint point_of_chart(const AllRightComplex& P,
                              const Eigen::VectorXd& u) const;
  Eigen::VectorXd chart_of_point(const AllRightComplex& P,
                                 const SimplexPoint& x) const;

  MetricPtr model() const;  // the complex metric seen through the chart
  MetricPtr round() const;  // round sphere metric in the same chart
};

// Detects the canonical family structurally. Throws std::invalid_argument
// for complexes with no canonical chart.
CanonicalChart canonical_chart(const AllRightComplex& P);

// --------------------------------------------------------------------------
// Smoothing inputs and the per-simplex link data.

struct SmoothingInput {
  AllRightComplex P;
  ConeParams params;

  // Validates params (including every depth d_2..d_{m+1} present and
  // admissible), dim P >= 1, dim P + 1 <= xi, and the canonical chart.
  void validate() const;
};

class SmoothedCone;
using SmoothedConePtr = std::shared_ptr<const SmoothedCone>;

// Memoized smoothing of the link of one simplex, in the link complex's own
// canonical chart, plus the extension metric of the patch around that
// simplex in product coordinates (base cone coords..., link coords...,
// fiber radius).
struct LinkSmoothing {
  int simplex = -1;
  int k = 0;  // simplex dimension; the base cone factor has dimension k+1
  LinkComplex link;
  std::shared_ptr<const Dim1Smoothing> circle;  // dim-1 links
  SmoothedConePtr cone;                         // dim-2 links
  RadialPtr fiber;     // smoothed metric of the link cone, link chart
  CenteredPtr patch;   // extension metric on the product chart
};

// --------------------------------------------------------------------------
// Smoothed cones.

class SmoothedCone {
 public:
  explicit SmoothedCone(SmoothingInput input);
  // The patched metric keeps a pointer back into this object, so the cone
  // is pinned in place; hand it around through SmoothedConePtr.
  SmoothedCone(const SmoothedCone&) = delete;
  SmoothedCone& operator=(const SmoothedCone&) = delete;

  int dim() const { return m_; }
  const AllRightComplex& complex() const { return input_.P; }
  const ConeParams& params() const { return input_.params; }
  const CanonicalChart& chart() const { return chart_; }

  // r_{m-2}: radius of the forcing ball, and the inner limit of the
  // patched metric's evaluation domain.
  double forcing_radius() const { return forcing_radius_; }
  double depth() const { return depth_; }  // d_{m+1}

  // The patched metric in the global chart. Evaluations below
  // forcing_radius() throw std::domain_error; on region overlaps every
  // holding region's candidate value is computed and compared
  // (std::runtime_error on disagreement).
  RadialPtr patched() const { return patched_; }
  // The smoothed metric: hyperbolic forcing of the patched metric at
  // (forcing_radius, depth) over the round link metric.
  RadialPtr metric() const { return metric_; }

  MetricPtr model() const { return model_; }
  MetricPtr round() const { return round_; }

  const LinkSmoothing& link_smoothing(int simplex) const;
  const std::vector<int>& patched_simplices() const { return patch_order_; }

  // Regions holding at a chart point with their candidate link blocks.
  struct Candidate {
    int simplex = -1;  // -1 for the unpatched (cone metric) branch
    Eigen::MatrixXd link_values;
  };
  struct Evaluation {
    std::vector<Candidate> candidates;
    int chosen = -1;
    double disagreement = 0.0;  // worst pairwise relative disagreement
  };
  Evaluation evaluate(const Eigen::VectorXd& u, double t) const;

  // Product coordinates of a global chart point relative to one patch.
  Eigen::VectorXd product_point(int simplex, const Eigen::VectorXd& u,
                                double t) const;
  // Full pullback of a patch metric to the global chart: values and first
  // derivatives exact, second derivatives approximate (the split map's
  // third derivatives are not tracked), so curvature never runs on this.
  MetricPtr patch_pullback(int simplex) const;

 private:
  friend struct PatchedRadial;
  struct PatchChart;

  void build_charts();
  void build_patches();

  SmoothingInput input_;
  int m_ = 0;
  CanonicalChart chart_;
  double forcing_radius_ = 0.0;
  double depth_ = 0.0;
  MetricPtr model_, round_;
  std::vector<std::shared_ptr<const PatchChart>> patch_charts_;  // by simplex
  std::vector<int> patch_order_;  // patched simplices, lowest dim first
  std::vector<LinkSmoothing> links_;  // by simplex id (empty when unpatched)
  std::vector<RegionPredicate> regions_;  // by simplex id (patched ids only)
  RegionPredicate top_region_;
  RadialPtr patched_, metric_;
};

SmoothedConePtr smooth_cone(const AllRightComplex& P, const ConeParams& params);

// {G(P, r(lambda))} indexed by the forcing radius lambda, with
// r(lambda) = asinh(sinh(lambda) sin(alpha_{m-2})).
MetricFamily smoothed_family(const AllRightComplex& P,
                             const ConeParams& params);

// --------------------------------------------------------------------------
// Independence from the membership width scale.

struct CIndependenceReport {
  long long samples = 0;
  uint64_t seed = 0;
  double max_disagreement = 0.0;  // relative, componentwise
  bool values_agree = false;
  double min_gap_margin = 0.0;  // inf over triples of s'_{m,k}-s_{m,k}-(ln(c'/c)-1)
  bool gaps_hold = false;
  bool ok() const { return values_agree && gaps_hold; }
};

// Rebuilds the smoothed metric with membership scale c' in place of
// params.c and compares component values at points sampled from the
// evaluation domain; also checks the membership-width gap lower bound
// s'_{m,k} - s_{m,k} > ln(c'/c) - 1 on random admissible (m, k, r) triples.
CIndependenceReport c_independence_check(const AllRightComplex& P,
                                         const ConeParams& params,
                                         double c_prime, long long samples,
                                         uint64_t seed);

// --------------------------------------------------------------------------
// Closed link manifolds. The same forcing layout with an arbitrary link
// metric h in place of the round sphere: round-hyperbolic warp of h inside,
// a sinh-warped blend from h to the spherical cut of the (warp-forced)
// input across [r0 - d, r0], the forced input beyond r0. Defined for every
// real t; below r0 - 2d the warp profile is exactly e^t / 2.

RadialPtr manifold_force(RadialPtr g, MetricPtr h, double r0, double d);

struct ManifoldSmoothing {
  RadialPtr metric;
  double forcing_radius = 0.0;
  double depth = 0.0;
  std::vector<std::string> warnings;
};

// Runs manifold_force on the complex's patched metric. Requires
// r_{m-2} - 2 d_{m+1} > 0 on top of the smoothing input validation.
ManifoldSmoothing smooth_cone_manifold(const AllRightComplex& P, MetricPtr h,
                                       const ConeParams& params);

// --------------------------------------------------------------------------
// Base-and-fiber radii of a split: a point at distance s from the cone
// vertex and angle beta from a simplex projects to base radius t and fiber
// radius rho with rho = asinh(sin(beta) sinh(s)), t = acosh(cosh(s) /
// cosh(rho)). Even in beta; rho/beta extends smoothly through beta = 0.

struct SplitRadii {
  double base_t = 0.0;
  double fiber_r = 0.0;
};
SplitRadii split_radii(double s, double beta);

}  // namespace conesmith
