#include "conesmith/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace conesmith {
namespace {

constexpr double kWidthBudget = 0.018315638888734179;  // e^-4
constexpr double kHalfPi = 1.5707963267948966;

// Smallest s >= 0 past which sin(gamma) sinh(s + b) <= sin(theta) sinh(s)
// holds, given e^b sin(gamma) < sin(theta); zero when the inequality already
// holds from s = 0 on. The equality rearranges to
// e^{2s} = (sin(gamma) e^{-b} - sin(theta)) / (sin(gamma) e^b - sin(theta)),
// which has a root above one exactly when that ratio exceeds one.
double entry_threshold(double sin_gamma, double sin_theta, double b) {
  if (sin_gamma <= 0.0) return 0.0;
  const double num = sin_gamma * std::exp(-b) - sin_theta;
  const double den = sin_gamma * std::exp(b) - sin_theta;
  const double ratio = num / den;
  if (!(ratio > 1.0)) return 0.0;
  return 0.5 * std::log(ratio);
}

// Exit time of a transient membership in the never-a-member case
// (e^b sin(gamma) > sin(theta)): for b < 0 the ray starts at the cone
// vertex, inside every neighborhood, and leaves for good at the same
// closed-form root. Zero when there is no transient (b >= 0).
double exit_threshold(double sin_gamma, double sin_theta, double b) {
  if (sin_gamma <= 0.0 || b >= 0.0) return 0.0;
  const double num = sin_gamma * std::exp(-b) - sin_theta;
  const double den = sin_gamma * std::exp(b) - sin_theta;
  const double ratio = num / den;
  if (!(ratio > 1.0)) return 0.0;
  return 0.5 * std::log(ratio);
}

double ln_cosh(double x) {
  return x - std::log(2.0) + std::log1p(std::exp(-2.0 * x));
}

void check_region_data(const AllRightComplex& P, const ConeParams& params) {
  params.validate();
  const int m = P.dim();
  if (m < 1) throw std::invalid_argument("regions need a complex of dimension at least one");
  if (static_cast<double>(m) > params.xi)
    throw std::invalid_argument("regions need the complex dimension to stay within xi");
  if (!(params.r > 6.0 + 2.0 * params.xi))
    throw std::invalid_argument("regions need the base radius above 6 + 2 xi");
}

RegionPredicate make_region(RegionKind kind, const AllRightComplex& P,
                            const ConeParams& params, int delta) {
  check_region_data(P, params);
  if (delta >= 0) {
    if (P.dim() < 2)
      throw std::invalid_argument("simplex regions need a complex of dimension at least two");
    if (delta >= P.simplex_count())
      throw std::invalid_argument("no such simplex in the complex");
    if (P.simplex_dim(delta) > P.dim() - 2)
      throw std::invalid_argument("regions exist only for simplices of codimension at least two");
  }
  RegionPredicate region;
  region.kind = kind;
  region.complex = &P;
  region.params = params;
  region.simplex = delta;
  return region;
}

}  // namespace

double ConeParams::depth(int i) const {
  const int slot = i - 2;
  if (i < 2 || slot >= static_cast<int>(d.size()))
    throw std::out_of_range("no forcing depth listed for dimension " + std::to_string(i));
  return d[slot];
}

void ConeParams::validate() const {
  if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("the width ratio sigma must lie in (0, 1)");
  if (!(c > 1.0)) throw std::invalid_argument("the width scale c must exceed one");
  if (!(c * sigma < kWidthBudget))
    throw std::invalid_argument("the width budget c * sigma must stay below e^-4");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 6.0 + 2.0 * xi))
      throw std::invalid_argument("every forcing depth must exceed 6 + 2 xi");
    if (!(r > 2.0 * d[i]))
      throw std::invalid_argument("the base radius must exceed twice every forcing depth");
  }
}

double asinh_scaled_sinh(double s, double factor) {
  if (!(s >= 0.0) || !(factor >= 0.0))
    throw std::invalid_argument("asinh_scaled_sinh needs s >= 0 and factor >= 0");
  if (s == 0.0 || factor == 0.0) return 0.0;
  if (s < 350.0 && std::log(factor) + s < 700.0)
    return std::asinh(factor * std::sinh(s));
  // The argument is astronomically large; asinh(y) = log(2y) to the last bit.
  return std::log(factor) + s + std::log1p(-std::exp(-2.0 * s));
}

double nested_radius(const ConeParams& params, int j) {
  if (j < -1) throw std::out_of_range("nested radius index starts at -1");
  if (j == -1) return params.r;
  return asinh_scaled_sinh(params.r, 1.0 / width_sine(params.alpha_widths(), j));
}

RadiusTriple radii(const ConeParams& params, int m, int k) {
  params.validate();
  if (m < 2) throw std::out_of_range("radius triples need ambient dimension at least two");
  if (k < 0 || k > m - 2)
    throw std::out_of_range("radius triples exist for 0 <= k <= m - 2");
  RadiusTriple out;
  out.r_k = nested_radius(params, k);
  const double ratio = width_sine(params.beta_widths(), k) /
                       width_sine(params.alpha_widths(), m - 2);
  out.s_mk = asinh_scaled_sinh(params.r, ratio);
  out.r_mk = nested_radius(params, m - k - 3);
  if (!(out.r_mk < out.s_mk))
    throw std::logic_error("radius ladder violated: exclusion width reached the membership width");
  return out;
}

double sphere_slice_width(double s, double beta) {
  if (!(s > 0.0)) throw std::invalid_argument("slice widths need s > 0");
  if (!(beta > 0.0 && beta <= kHalfPi))
    throw std::invalid_argument("slice widths need beta in (0, pi/2]");
  return asinh_scaled_sinh(s, std::sin(beta));
}

ExtensionCoords decompose(const AllRightComplex& P, const ConePoint& p,
                          int delta) {
  if (!(p.s >= 0.0)) throw std::invalid_argument("cone points need s >= 0");
  auto split = star_split(P, p.x, delta);
  if (!split)
    throw std::invalid_argument("cone point lies outside the star of the simplex");

  ExtensionCoords e;
  e.beta = split->beta;
  e.w = split->w;
  e.u = split->u;
  if (e.u.simplex < 0) {  // x lies on the simplex: no normal part
    e.r = 0.0;
    e.t = p.s;
  } else if (e.w.simplex < 0) {  // x at a right angle: no tangential part
    e.r = p.s;
    e.t = 0.0;
  } else if (p.s < 350.0) {
    const double sb = std::sin(e.beta);
    const double cb = std::cos(e.beta);
    const double sh = std::sinh(p.s);
    e.r = std::asinh(sb * sh);
    e.t = std::asinh(cb * sh / std::sqrt(1.0 + sb * sb * sh * sh));
  } else {
    const double sb = std::sin(e.beta);
    const double cb = std::cos(e.beta);
    e.r = asinh_scaled_sinh(p.s, sb);
    // The foot of the perpendicular converges as s grows; the correction
    // is below double resolution once s passes the branch point.
    e.t = std::asinh(cb / sb);
  }
  return e;
}

ConePoint recompose(const AllRightComplex& P, const ExtensionCoords& e,
                    int delta) {
  if (!(e.t >= 0.0) || !(e.r >= 0.0))
    throw std::invalid_argument("extension coordinates need t >= 0 and r >= 0");

  double s = 0.0;
  double beta = 0.0;
  if (e.t + e.r < 700.0) {
    // sinh^2(s) = sinh^2(r) cosh^2(t) + sinh^2(t); the angle at the cone
    // vertex satisfies tan(beta) = sinh(r) / (sinh(t) cosh(r)).
    s = std::asinh(std::hypot(std::sinh(e.r) * std::cosh(e.t), std::sinh(e.t)));
    beta = std::atan2(std::sinh(e.r), std::sinh(e.t) * std::cosh(e.r));
  } else {
    s = ln_cosh(e.r) + ln_cosh(e.t) + std::log(2.0);
    const double ln_sin_beta = (e.r - std::log(2.0) + std::log1p(-std::exp(-2.0 * e.r))) -
                               (s - std::log(2.0) + std::log1p(-std::exp(-2.0 * s)));
    beta = std::asin(std::min(1.0, std::exp(ln_sin_beta)));
  }

  const bool have_w = e.w.simplex >= 0;
  const bool have_u = e.u.simplex >= 0;
  if (e.t > 0.0 && !have_w)
    throw std::invalid_argument("a positive projection length needs a direction on the simplex");
  if (e.r > 0.0 && !have_u)
    throw std::invalid_argument("a positive normal distance needs a link direction");
  if (have_w && !P.is_face(e.w.simplex, delta))
    throw std::invalid_argument("w must lie on the simplex being extended over");
  if (have_u) {
    std::vector<int> joined = P.simplex(delta);
    const std::vector<int>& uv = P.simplex(e.u.simplex);
    joined.insert(joined.end(), uv.begin(), uv.end());
    std::sort(joined.begin(), joined.end());
    if (std::adjacent_find(joined.begin(), joined.end()) != joined.end() ||
        P.simplex_id(joined) < 0)
      throw std::invalid_argument("u must lie on the link of the simplex");
  }

  ConePoint p;
  p.s = s;
  if (!have_u || e.r == 0.0) {
    p.x = have_w ? e.w : e.u;
  } else if (!have_w || e.t == 0.0) {
    p.x = e.u;
  } else {
    std::vector<int> verts;
    const std::vector<int>& wv = P.simplex(e.w.simplex);
    const std::vector<int>& uv = P.simplex(e.u.simplex);
    std::set_union(wv.begin(), wv.end(), uv.begin(), uv.end(),
                   std::back_inserter(verts));
    const int join = P.simplex_id(verts);
    if (join < 0)
      throw std::invalid_argument("the carriers of w and u span no simplex of the complex");
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(verts.size());
    const double cb = std::cos(beta);
    const double sb = std::sin(beta);
    for (int i = 0; i < static_cast<int>(wv.size()); ++i) {
      auto it = std::lower_bound(verts.begin(), verts.end(), wv[i]);
      dir[it - verts.begin()] = cb * e.w.dir[i];
    }
    for (int i = 0; i < static_cast<int>(uv.size()); ++i) {
      auto it = std::lower_bound(verts.begin(), verts.end(), uv[i]);
      dir[it - verts.begin()] = sb * e.u.dir[i];
    }
    p.x.simplex = join;
    p.x.dir = dir;
  }
  validate_point(P, p.x, 1e-9, 1e-9);
  return p;
}

RegionPredicate y_region(const AllRightComplex& P, const ConeParams& params,
                         int delta) {
  return make_region(RegionKind::kYSimplex, P, params, delta);
}

RegionPredicate y_region(const AllRightComplex& P, const ConeParams& params) {
  return make_region(RegionKind::kYTop, P, params, -1);
}

RegionPredicate x_region(const AllRightComplex& P, const ConeParams& params,
                         int delta) {
  return make_region(RegionKind::kXSimplex, P, params, delta);
}

RegionPredicate x_region(const AllRightComplex& P, const ConeParams& params) {
  return make_region(RegionKind::kXTop, P, params, -1);
}

MembershipVerdict y_membership(const ConePoint& p,
                               const RegionPredicate& region,
                               double edge_tol) {
  if (region.complex == nullptr)
    throw std::invalid_argument("region predicate carries no complex");
  if (region.kind == RegionKind::kZCube)
    throw std::logic_error("Z regions are decided by the cubical layer");
  if (!(p.s >= 0.0)) throw std::invalid_argument("cone points need s >= 0");
  const AllRightComplex& P = *region.complex;
  const ConeParams& params = region.params;
  const int m = P.dim();
  const bool simplex_kind = region.kind == RegionKind::kYSimplex ||
                            region.kind == RegionKind::kXSimplex;
  const bool shallow_ball = region.kind == RegionKind::kYSimplex ||
                            region.kind == RegionKind::kYTop;

  bool band = false;
  const double ball = nested_radius(params, m - 2) -
                      (shallow_ball ? 4.0 + 2.0 * params.xi : 0.0);
  if (p.s < ball - edge_tol) return {false, false};
  if (p.s < ball + edge_tol) band = true;  // complement is closed: kept

  const std::map<int, double> dists = star_distances(P, p.x);

  // Neighborhood widths ride the rays: the slice at radius s of the
  // membership neighborhood of a k-simplex is the spherical beta_k
  // neighborhood, and the exclusion slices are the alpha_j ones. Both are
  // compared as lengths at the point's own radius, where they scale by
  // sinh(s) exactly like the distance itself.
  if (simplex_kind) {
    auto it = dists.find(region.simplex);
    if (it == dists.end()) return {false, band};
    const int k = P.simplex_dim(region.simplex);
    const double dist = asinh_scaled_sinh(p.s, std::sin(it->second));
    const double w = asinh_scaled_sinh(p.s, width_sine(params.beta_widths(), k));
    // Open membership neighborhood: the band resolves to outside.
    if (dist > w - edge_tol) return {false, band || dist < w + edge_tol};
  }

  const int j_max = simplex_kind ? P.simplex_dim(region.simplex) - 1 : m - 2;
  for (const auto& [id, gamma] : dists) {
    const int j = P.simplex_dim(id);
    if (j > j_max) continue;
    const double dist = asinh_scaled_sinh(p.s, std::sin(gamma));
    const double excl = asinh_scaled_sinh(p.s, width_sine(params.alpha_widths(), j));
    // Closed exclusion neighborhood: the band resolves to inside it.
    if (dist < excl + edge_tol) return {false, band || dist > excl - edge_tol};
  }
  return {true, band};
}

RadialCaseResult radial_case(const AllRightComplex& P, const SimplexPoint& x,
                             double b, int delta, double theta) {
  if (!(theta > 0.0 && theta < kHalfPi))
    throw std::invalid_argument("ray cases need theta in (0, pi/2)");
  RadialCaseResult out;
  const auto gamma = star_local_distance(P, x, delta);
  if (!gamma) {
    out.kind = RayCase::kC2;
    out.gamma = kHalfPi;
    out.margin = std::numeric_limits<double>::infinity();
    return out;
  }
  out.gamma = *gamma;
  const double sin_gamma = std::sin(*gamma);
  const double sin_theta = std::sin(theta);
  out.margin = std::exp(b) * sin_gamma - sin_theta;
  if (out.margin < 0.0) {
    out.kind = RayCase::kC1;
    out.s0 = entry_threshold(sin_gamma, sin_theta, b);
  } else if (out.margin > 0.0) {
    out.kind = RayCase::kC2;
    out.s0 = exit_threshold(sin_gamma, sin_theta, b);
  } else {
    out.kind = RayCase::kC3;
  }
  return out;
}

StabilityVerdict radial_stability(const AllRightComplex& P,
                                  const SimplexPoint& x, double b,
                                  const ConeParams& params) {
  params.validate();
  const int m = P.dim();
  if (m < 1)
    throw std::invalid_argument("radial stability needs a complex of dimension at least one");
  if (static_cast<double>(m) > params.xi)
    throw std::invalid_argument("radial stability needs the complex dimension within xi");
  if (b < -(4.0 + 2.0 * params.xi))
    throw std::invalid_argument(
        "the shift keeps the ray inside the excluded ball; no region ever holds it");

  // Regions exist once the base radius clears 6 + 2 xi; in the r_{m-2}
  // variable that is this floor.
  const double floor_rm2 = asinh_scaled_sinh(
      6.0 + 2.0 * params.xi, 1.0 / width_sine(params.alpha_widths(), m - 2));
  const double eb = std::exp(b);
  const std::map<int, double> dists = star_distances(P, x);

  StabilityVerdict verdict;
  double max_exit = 0.0;
  for (int k = 0; k <= m - 2; ++k) {
    const double sin_alpha = width_sine(params.alpha_widths(), k);
    const double sin_beta = width_sine(params.beta_widths(), k);
    int winner = -1;
    double winner_margin = 0.0;
    double winner_sin_gamma = 0.0;
    double stage_exit = 0.0;
    for (int id : P.simplices_of_dim(k)) {
      const auto it = dists.find(id);
      if (it == dists.end()) continue;  // outside the star: never a member
      const double sin_gamma = std::sin(it->second);
      const double margin = eb * sin_gamma - sin_alpha;
      if (margin <= 0.0) {
        if (winner < 0 || margin < winner_margin) {
          winner = id;
          winner_margin = margin;
          winner_sin_gamma = sin_gamma;
        }
      } else {
        // A shifted-in ray (b < 0) starts at the cone vertex inside this
        // neighborhood and leaves it for good at the exit time; the verdict
        // threshold must wait that out.
        stage_exit = std::max(stage_exit, exit_threshold(sin_gamma, sin_alpha, b));
      }
    }
    if (winner >= 0) {
      verdict.top = false;
      verdict.simplex = winner;
      // Strict membership against the wider beta width (a kC3 tie against
      // alpha is still strictly inside the beta neighborhood eventually).
      const double s0 = entry_threshold(winner_sin_gamma, sin_beta, b);
      verdict.r_prime = std::max({floor_rm2, s0, max_exit});
      return verdict;
    }
    max_exit = std::max(max_exit, stage_exit);
  }
  verdict.top = true;
  verdict.simplex = -1;
  verdict.r_prime = std::max(floor_rm2, max_exit);
  return verdict;
}

}  // namespace conesmith
