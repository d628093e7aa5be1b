#pragma once

// Hyperbolic cones over all-right spherical complexes.
//
// A cone point is a direction on the complex together with a radius. Around
// the cone of each simplex the cone splits as a product (projection onto the
// simplex cone, distance to it, link direction), tied together by the
// right-triangle identities cosh(s) = cosh(r) cosh(t) and
// sinh(r) = sin(beta) sinh(s). The fundamental regions carved out of the
// cone (the Y and X sets below) are never materialized; they are predicates
// decided with star-local trigonometry, one distance comparison per nearby
// simplex.

#include <cstdint>
#include <vector>

#include "conesmith/complexes.hpp"
#include "conesmith/widths.hpp"

namespace conesmith {

// A point of the cone C P: direction x on P at distance s from the cone
// vertex. Every pair with s = 0 denotes the vertex, whatever x says.
struct ConePoint {
  SimplexPoint x;
  double s = 0.0;
};

// Coordinates of a cone point relative to the cone of a simplex delta:
//   t     projection length onto C delta
//   w     direction inside delta (simplex = -1 when beta = pi/2)
//   r     distance to C delta
//   u     link direction: a point on the face opposite delta in their join,
//         kept in parent coordinates; simplicial_link(P, delta).from_parent
//         reinterprets it as a point of the link complex
//   beta  angle at the cone vertex between x and delta
// The identities cosh(s) = cosh(r) cosh(t) and sinh(r) = sin(beta) sinh(s)
// hold, and t <= s. At the cone vertex (s = 0) both lengths vanish and the
// split directions are those of x; they are not recoverable from lengths
// alone.
struct ExtensionCoords {
  double t = 0.0;
  SimplexPoint w;
  double r = 0.0;
  SimplexPoint u;
  double beta = 0.0;
};

// Parameters of a smoothed cone construction. The width pair is
// A = natural(sigma) (exclusion widths) and B = scaled(sigma, c) (membership
// widths); d lists the forcing depths d_2, d_3, ... for the dimensions that
// actually get smoothed, and may be empty for region-only work.
struct ConeParams {
  double r = 0.0;      // base cone radius
  double xi = 0.0;     // chart excess
  double sigma = 0.0;  // width ratio in (0, 1)
  double c = 1.0;      // width scale > 1
  std::vector<double> d;  // forcing depths d_2, d_3, ...

  WidthSet alpha_widths() const { return WidthSet::natural(sigma); }
  WidthSet beta_widths() const { return WidthSet::scaled(sigma, c); }
  // d_i for i >= 2; throws when that depth was not provided.
  double depth(int i) const;

  // Checks xi > 0, sigma in (0,1), c > 1, c sigma < e^-4, and for every
  // listed depth d_i > 6 + 2 xi and r > 2 d_i. Throws std::invalid_argument.
  void validate() const;
};

// asinh(factor * sinh(s)), stable for arguments far beyond double overflow
// of sinh itself. factor >= 0.
double asinh_scaled_sinh(double s, double factor);

// Nested cone radius r_j = asinh(sinh(r) / sin(alpha_j)); r_{-1} = r.
double nested_radius(const ConeParams& params, int j);

// The three radii controlling regions around a k-simplex in an m-complex:
//   r_k   = asinh(sinh(r) / sin(alpha_k))       nested cone radius
//   s_mk  = asinh(sinh(r) sin(beta_k) / sin(alpha_{m-2}))   membership width
//   r_mk  = r_{m-k-3}                                       exclusion width
// In the r_{m-2} variable these are slice widths: sinh(r_mk) =
// sinh(r_{m-2}) sin(alpha_k) and sinh(s_mk) = sinh(r_{m-2}) sin(beta_k).
struct RadiusTriple {
  double r_k = 0.0;
  double s_mk = 0.0;
  double r_mk = 0.0;
};

// Requires m >= 2 and 0 <= k <= m-2; asserts r_mk < s_mk.
RadiusTriple radii(const ConeParams& params, int m, int k);

// Width of the radius-s sphere slice of an s_beta-neighborhood:
// s_beta = asinh(sinh(s) sin(beta)). Requires s > 0 and beta in (0, pi/2].
double sphere_slice_width(double s, double beta);

// Splits a cone point across the cone of delta. Throws when x lies outside
// the star of delta.
ExtensionCoords decompose(const AllRightComplex& P, const ConePoint& p,
                          int delta);
// Inverse of decompose: s and beta are recomputed from the lengths (t, r),
// and the direction is cos(beta) w + sin(beta) u on the simplex spanned by
// the carriers of w and u. Throws when those carriers span no simplex.
ConePoint recompose(const AllRightComplex& P, const ExtensionCoords& e,
                    int delta);

// --------------------------------------------------------------------------
// Fundamental regions.
//
// Neighborhood widths ride the rays: the slice at radius s of the
// membership neighborhood of a k-simplex delta is its spherical beta_k
// neighborhood, and the slice of an exclusion neighborhood of a j-simplex
// is the spherical alpha_j one. Comparisons happen on hyperbolic lengths
// at the point's own radius,
//
//   a_w(s) = asinh(sin(w) sinh(s)),
//
// so thresholds scale with sinh(s) exactly like the perpendicular
// distance a_gamma(s) to a simplex, and edge_tol below means a length.
//
// For a complex P of dimension m and a simplex delta of dimension
// k <= m - 2:
//
//   Y(delta) = points outside the open ball of radius r_{m-2} - (4 + 2 xi)
//              with a_gamma(s) < a_{beta_k}(s) against delta itself and
//              a_gamma'(s) > a_{alpha_j}(s) against every simplex delta'
//              of dimension j < k
//   Y(top)   = points outside the same ball clearing the alpha_j exclusion
//              for every simplex of dimension j <= m - 2
//
// X(delta) and X(top) are the same sets with ball radius r_{m-2} instead.
// Z regions live on cubical complexes and are decided by the cubical layer.

enum class RegionKind { kYSimplex, kYTop, kXSimplex, kXTop, kZCube };

struct RegionPredicate {
  RegionKind kind = RegionKind::kYTop;
  const AllRightComplex* complex = nullptr;  // not owned
  ConeParams params;
  int simplex = -1;  // the simplex for the kSimplex kinds, else unused
};

// Builders validate params, m <= xi, r > 6 + 2 xi, and (for the simplex
// kinds) m >= 2 and dim(delta) <= m - 2. The top kinds allow m >= 1 (the
// exclusion union is then empty for m = 1).
RegionPredicate y_region(const AllRightComplex& P, const ConeParams& params,
                         int delta);
RegionPredicate y_region(const AllRightComplex& P, const ConeParams& params);
RegionPredicate x_region(const AllRightComplex& P, const ConeParams& params,
                         int delta);
RegionPredicate x_region(const AllRightComplex& P, const ConeParams& params);

// Membership with a knife-edge marker: comparisons landing within edge_tol
// of a threshold set `boundary` and resolve inclusively for the closed
// exclusion neighborhoods and the ball complement, exclusively for the open
// membership neighborhood. Property tests skip boundary-flagged samples.
struct MembershipVerdict {
  bool inside = false;
  bool boundary = false;
};

MembershipVerdict y_membership(const ConePoint& p,
                               const RegionPredicate& region,
                               double edge_tol = 1e-9);

// --------------------------------------------------------------------------
// Radial stability. R_{x,b}(s) = (s+b) x is the shifted ray through x; the
// question is whether it eventually lies in the width-a_theta(s)
// neighborhood of C delta, where a_theta(s) = asinh(sinh(s) sin(theta)).
// Membership at parameter s is equivalent to
//   sin(gamma) sinh(s+b) <= sin(theta) sinh(s),   gamma = d(x, delta),
// and sinh(s+b)/sinh(s) tends monotonically to e^b, so the sign of
// e^b sin(gamma) - sin(theta) decides the tail behavior.

enum class RayCase {
  kC1,  // e^b sin(gamma) < sin(theta): member for every s beyond s0
  kC2,  // e^b sin(gamma) > sin(theta): not a member past s0
  kC3,  // equality: approaches the boundary, never a member
};

struct RadialCaseResult {
  RayCase kind = RayCase::kC2;
  // kC1: the ray is a strict member for s > s0 and, when s0 > 0, sits
  // exactly on the boundary at s = s0; zero when membership starts at once.
  // kC2 with b < 0: the ray starts at the cone vertex inside the
  // neighborhood and leaves it for good at s0; zero when b >= 0, where
  // there is no transient.
  double s0 = 0.0;
  double margin = 0.0;  // e^b sin(gamma) - sin(theta); +inf outside the star
  double gamma = 0.0;   // star-local distance from x to delta; pi/2 outside
};

// Requires theta in (0, pi/2). Points outside the star of delta never meet
// the neighborhood and are reported as kC2 with infinite margin.
RadialCaseResult radial_case(const AllRightComplex& P, const SimplexPoint& x,
                             double b, int delta, double theta);

// Verdict of the stage-by-stage ray classification: the shifted ray through
// x settles either in Y(simplex) for the reported simplex or in Y(top), for
// every r_{m-2} > r_prime (regions built with base radius
// r = asinh(sinh(r_{m-2}) sin(alpha_{m-2}))).
struct StabilityVerdict {
  bool top = false;
  int simplex = -1;     // settling simplex when !top
  double r_prime = 0.0; // threshold in the r_{m-2} variable
};

// Walks dimensions k = 0..m-2: the first k-simplex whose ray case against
// width alpha_k is kC1 or kC3 wins (membership threshold then computed
// against the wider beta_k); if every simplex of every dimension is kC2 the
// ray settles in Y(top). Requires b >= -(4 + 2 xi): deeper shifts keep the
// ray inside the excluded ball forever, so no region ever holds it.
StabilityVerdict radial_stability(const AllRightComplex& P,
                                  const SimplexPoint& x, double b,
                                  const ConeParams& params);

}  // namespace conesmith
