#include "conesmith/smoothing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "conesmith/sampling.hpp"
#include "conesmith/widths.hpp"

namespace conesmith {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;

// Evaluations of the patched metric this far below the forcing radius are
// still accepted; anything deeper is a caller error.
constexpr double kDomainTol = 1e-9;

// Candidate agreement on region overlaps: componentwise
// |a - b| <= kAgreeRel * max(|a|, |b|) + kAgreeRel * kAgreeFloor * S where S
// is the largest component magnitude of either candidate. The floor absorbs
// cancellation noise in components whose true value is zero while the
// matrix itself is huge.
constexpr double kAgreeRel = 1e-9;
constexpr double kAgreeFloor = 1e-3;

double positive_fmod(double x, double period) {
  double y = std::fmod(x, period);
  if (y < 0.0) y += period;
  return y;
}

// Shifts the value into (-pi, pi] without touching derivatives: the shift is
// locally constant.
Jet wrap_angle(const Jet& a) {
  Jet r = a;
  r.v = std::remainder(r.v, 2.0 * kPi);
  return r;
}

// --------------------------------------------------------------------------
// Jet composition. `f` is a jet with respect to a set of intermediate
// variables; `args` gives each intermediate variable as a jet with respect
// to the caller's variables (possibly constants). Returns f o args by the
// chain rule. Exact for values and gradients; the Hessian is exact when f's
// own Hessian is.

Jet compose_jet(const Jet& f, const JetVec& args) {
  Jet out(f.v);
  if (f.constant()) return out;
  const int n = f.vars();
  if (static_cast<int>(args.size()) != n)
    throw std::logic_error("compose_jet: wrong argument count");
  int outer = 0;
  for (const Jet& a : args)
    if (!a.constant()) {
      outer = a.vars();
      break;
    }
  if (outer == 0) return out;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(outer);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(outer, outer);
  for (int k = 0; k < n; ++k) {
    const double fk = f.d[k];
    if (fk == 0.0 || args[k].constant()) continue;
    g += fk * args[k].d;
    if (args[k].h.size() != 0) h += fk * args[k].h;
  }
  if (f.h.size() != 0) {
    for (int k = 0; k < n; ++k) {
      if (args[k].constant()) continue;
      for (int l = 0; l < n; ++l) {
        if (args[l].constant()) continue;
        const double fkl = f.h(k, l);
        if (fkl == 0.0) continue;
        h += fkl * (args[k].d * args[l].d.transpose());
      }
    }
  }
  out.d = std::move(g);
  out.h = std::move(h);
  return out;
}

// d(coordinate function) / d(seed a) as a jet: value from the gradient,
// gradient from the Hessian row, second derivatives dropped. This is the
// one approximation in the pullback; metric values and first derivatives
// stay exact.
Jet seed_partial(const Jet& f, int a) {
  if (f.constant()) return Jet(0.0);
  Jet g(f.d[a]);
  if (f.h.size() != 0) g.d = f.h.row(a).transpose();
  return g;
}

using SplitFn = std::function<JetVec(const JetVec&, const Jet&)>;

// Pullback of a patch metric through its split map, as a jet function of
// the caller's variables. The split map is re-evaluated on internal seeds
// so the Jacobian is available even when the incoming jets are constants.
JetMatrix pullback_block(const CenteredPtr& patch, const SplitFn& split,
                         const JetVec& uin, const Jet& tin, int out_dim) {
  const int n = static_cast<int>(uin.size()) + 1;
  JetVec xin = uin;
  xin.push_back(tin);
  JetVec useed(n - 1);
  for (int i = 0; i + 1 < n; ++i) useed[i] = Jet::variable(xin[i].v, i, n);
  const Jet tseed = Jet::variable(tin.v, n - 1, n);
  const JetVec pi = split(useed, tseed);
  if (static_cast<int>(pi.size()) != patch->dim())
    throw std::logic_error("patch split map has the wrong target dimension");
  const JetMatrix big = patch->components(pi);
  const int pd = patch->dim();
  std::vector<Jet> jac(static_cast<size_t>(pd) * out_dim);
  for (int i = 0; i < pd; ++i)
    for (int a = 0; a < out_dim; ++a)
      jac[i * out_dim + a] = seed_partial(pi[i], a);
  JetMatrix out(out_dim, out_dim);
  for (int a = 0; a < out_dim; ++a) {
    for (int b = a; b < out_dim; ++b) {
      Jet s(0.0);
      for (int i = 0; i < pd; ++i) {
        const Jet& ja = jac[i * out_dim + a];
        if (ja.constant() && ja.v == 0.0) continue;
        for (int j = 0; j < pd; ++j) {
          const Jet& jb = jac[j * out_dim + b];
          if (jb.constant() && jb.v == 0.0) continue;
          const Jet& e = big(i, j);
          if (e.constant() && e.v == 0.0) continue;
          s = s + ja * jb * e;
        }
      }
      const Jet composed = compose_jet(s, xin);
      out(a, b) = composed;
      out(b, a) = composed;
    }
  }
  return out;
}

class PulledBackPatch final : public Metric {
 public:
  PulledBackPatch(CenteredPtr patch, SplitFn split, int dim)
      : patch_(std::move(patch)), split_(std::move(split)), n_(dim) {}
  int dim() const override { return n_; }
  JetMatrix components(const JetVec& x) const override {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("patch pullback: point has wrong size");
    const JetVec u(x.begin(), x.end() - 1);
    return pullback_block(patch_, split_, u, x.back(), n_);
  }

 private:
  CenteredPtr patch_;
  SplitFn split_;
  int n_;
};

// --------------------------------------------------------------------------
// Chart metrics: hyperspherical coordinates, innermost circle first, scaled
// along the circle by k.

class HypersphericalMetric final : public Metric {
 public:
  HypersphericalMetric(int m, double k) : m_(m), k2_(k * k) {
    if (m < 1 || m > 3)
      throw std::invalid_argument("hyperspherical chart: dimension 1..3");
  }
  int dim() const override { return m_; }
  JetMatrix components(const JetVec& u) const override {
    if (static_cast<int>(u.size()) != m_)
      throw std::invalid_argument("hyperspherical chart: wrong point size");
    JetMatrix g = JetMatrix::zero(m_);
    if (m_ == 1) {
      g(0, 0) = Jet(k2_);
      return g;
    }
    if (m_ == 2) {
      g(0, 0) = k2_ * sq(sin(u[1]));
      g(1, 1) = Jet(1.0);
      return g;
    }
    const Jet s2 = sq(sin(u[2]));
    g(0, 0) = k2_ * s2 * sq(sin(u[1]));
    g(1, 1) = s2;
    g(2, 2) = Jet(1.0);
    return g;
  }

 private:
  int m_;
  double k2_;
};

// Hyperbolic base factor of a patch in polar coordinates around the cone of
// the simplex: chart (t) for a ray, (phi, t) for a plane, with the radius
// last in either case.
class PolarBase final : public CenteredMetric {
 public:
  explicit PolarBase(int n) : n_(n) {
    if (n < 1 || n > 2)
      throw std::invalid_argument("polar base factor: dimension 1 or 2");
  }
  int dim() const override { return n_; }
  JetMatrix components(const JetVec& x) const override {
    JetMatrix g = JetMatrix::zero(n_);
    if (n_ == 2) g(0, 0) = sq(sinh(x[1]));
    g(n_ - 1, n_ - 1) = Jet(1.0);
    return g;
  }
  Jet center_distance(const JetVec& x) const override { return x.back(); }

 private:
  int n_;
};

// --------------------------------------------------------------------------
// Split maps: global hyperspherical chart -> per-simplex product chart
// (base polar coords..., link chart coords..., fiber radius). All use the
// right-triangle identities sinh(rho) = sin(gamma) sinh(t) and
// cosh(t_base) = cosh(t) / cosh(rho).

std::array<Jet, 2> fiber_and_base(const Jet& singamma, const Jet& t) {
  const Jet rf = asinh(singamma * sinh(t));
  const Jet tb = acosh(cosh(t) / cosh(rf));
  return {tb, rf};
}

// Suspension pole or octahedron pole (the vertex on the polar chart axis).
// The fiber circle is the equator; its angle is the chart's own psi.
SplitFn make_pole_split() {
  return [](const JetVec& u, const Jet& t) -> JetVec {
    const auto s = fiber_and_base(sin(u[1]), t);
    return {s[0], u[0], s[1]};
  };
}

// Equator vertex at circle angle psi_v. The link is a 4-cycle through the
// two poles and the two circle neighbors; its angle is measured from the
// equator direction toward the north pole.
SplitFn make_equator_split(double psi_v, double k_factor) {
  return [psi_v, k_factor](const JetVec& u, const Jet& t) -> JetVec {
    const Jet delta = k_factor * wrap_angle(u[0] - psi_v);
    const Jet a = sin(u[1]) * sin(delta);
    const Jet b = cos(u[1]);
    const auto s = fiber_and_base(sqrt(sq(a) + sq(b)), t);
    return {s[0], atan2(b, a), s[1]};
  };
}

std::array<Jet, 4> sphere3_ambient(const JetVec& u) {
  const Jet schi = sin(u[2]);
  const Jet sth = sin(u[1]);
  return {schi * sth * cos(u[0]), schi * sth * sin(u[0]), schi * cos(u[1]),
          cos(u[2])};
}

// Vertex of the 3-sphere complex. fam maps each axis of the link
// octahedron's own chart to the ambient slot and sign it occupies in the
// parent chart; the fiber point is the normalized complementary 3-vector
// read in the link's chart.
SplitFn make_sphere3_vertex_split(std::array<std::pair<int, double>, 3> fam) {
  return [fam](const JetVec& u, const Jet& t) -> JetVec {
    const auto x = sphere3_ambient(u);
    const Jet u0 = fam[0].second * x[fam[0].first];
    const Jet u1 = fam[1].second * x[fam[1].first];
    const Jet u2 = fam[2].second * x[fam[2].first];
    const Jet w = sqrt(sq(u0) + sq(u1));
    const auto s = fiber_and_base(sqrt(sq(w) + sq(u2)), t);
    return {s[0], atan2(u1, u0), atan2(w, u2), s[1]};
  };
}

// Edge of the 3-sphere complex: base plane spanned by the two endpoint
// axes, fiber 4-cycle on the two complementary axes.
SplitFn make_sphere3_edge_split(int slot_a, double sign_a, int slot_b,
                                double sign_b, int comp_a, int comp_b) {
  return [=](const JetVec& u, const Jet& t) -> JetVec {
    const auto x = sphere3_ambient(u);
    const Jet phi = atan2(sign_b * x[slot_b], sign_a * x[slot_a]);
    const Jet c0 = x[comp_a];
    const Jet c1 = x[comp_b];
    const auto s = fiber_and_base(sqrt(sq(c0) + sq(c1)), t);
    return {phi, s[0], atan2(c1, c0), s[1]};
  };
}

// --------------------------------------------------------------------------
// Canonical chart detection helpers.

std::vector<std::vector<bool>> adjacency(const AllRightComplex& P) {
  const int n = P.vertex_count();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  if (P.dim() >= 1)
    for (int e : P.simplices_of_dim(1)) {
      const auto& vs = P.simplex(e);
      adj[vs[0]][vs[1]] = adj[vs[1]][vs[0]] = true;
    }
  return adj;
}

// Walks the vertices in `allowed` as a single cycle: start at the smallest,
// step toward the smaller neighbor first. Empty when they do not form one.
std::vector<int> walk_cycle(const std::vector<std::vector<bool>>& adj,
                            const std::vector<int>& allowed) {
  if (allowed.size() < 3) return {};
  std::vector<bool> in(adj.size(), false);
  for (int v : allowed) in[v] = true;
  auto neighbors = [&](int v) {
    std::vector<int> out;
    for (size_t w = 0; w < adj.size(); ++w)
      if (in[w] && adj[v][w]) out.push_back(static_cast<int>(w));
    return out;
  };
  for (int v : allowed)
    if (neighbors(v).size() != 2) return {};
  const int start = *std::min_element(allowed.begin(), allowed.end());
  std::vector<int> cycle{start};
  int prev = -1, cur = start;
  do {
    const auto nb = neighbors(cur);
    const int next = (nb[0] == prev) ? nb[1] : nb[0];
    if (next != start) cycle.push_back(next);
    prev = cur;
    cur = next;
  } while (cur != start && cycle.size() <= allowed.size());
  if (cycle.size() != allowed.size()) return {};
  return cycle;
}

std::optional<CanonicalChart> try_circle(const AllRightComplex& P) {
  const int kp = P.vertex_count();
  if (P.dim() != 1 || kp < 3) return std::nullopt;
  if (static_cast<int>(P.simplices_of_dim(1).size()) != kp) return std::nullopt;
  std::vector<int> all(kp);
  for (int i = 0; i < kp; ++i) all[i] = i;
  std::vector<int> cycle = walk_cycle(adjacency(P), all);
  if (cycle.empty()) return std::nullopt;
  CanonicalChart c;
  c.family = ChartFamily::kCircle;
  c.m = 1;
  c.k_factor = kp / 4.0;
  c.cycle = std::move(cycle);
  return c;
}

std::optional<CanonicalChart> try_sphere(const AllRightComplex& P) {
  const int m = P.dim();
  const int n = m + 1;
  if (P.vertex_count() != 2 * n) return std::nullopt;
  const auto adj = adjacency(P);
  std::vector<int> antipode(2 * n, -1);
  for (int v = 0; v < 2 * n; ++v) {
    for (int w = 0; w < 2 * n; ++w) {
      if (w == v || adj[v][w]) continue;
      if (antipode[v] != -1) return std::nullopt;  // two non-neighbors
      antipode[v] = w;
    }
    if (antipode[v] == -1) return std::nullopt;
  }
  for (int v = 0; v < 2 * n; ++v)
    if (antipode[antipode[v]] != v) return std::nullopt;
  std::vector<std::array<int, 2>> axes;
  for (int v = 0; v < 2 * n; ++v)
    if (v < antipode[v]) axes.push_back({v, antipode[v]});
  if (static_cast<int>(axes.size()) != n) return std::nullopt;
  // Every sign orthant must span a maximal simplex.
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> verts(n);
    for (int i = 0; i < n; ++i) verts[i] = axes[i][(mask >> i) & 1];
    std::sort(verts.begin(), verts.end());
    if (P.simplex_id(verts) < 0) return std::nullopt;
  }
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  if (P.simplex_count() != total - 1) return std::nullopt;
  CanonicalChart c;
  c.family = ChartFamily::kSphere;
  c.m = m;
  c.k_factor = 1.0;
  c.axes = std::move(axes);
  return c;
}

std::optional<CanonicalChart> try_suspension(const AllRightComplex& P) {
  if (P.dim() != 2) return std::nullopt;
  const int n = P.vertex_count();
  const auto adj = adjacency(P);
  // Poles: mutually sole non-neighbors.
  std::vector<std::array<int, 2>> pairs;
  for (int v = 0; v < n; ++v) {
    std::vector<int> non;
    for (int w = 0; w < n; ++w)
      if (w != v && !adj[v][w]) non.push_back(w);
    if (non.size() != 1) continue;
    const int w = non[0];
    if (w < v) continue;
    std::vector<int> back;
    for (int x = 0; x < n; ++x)
      if (x != w && !adj[w][x]) back.push_back(x);
    if (back.size() == 1 && back[0] == v) pairs.push_back({v, w});
  }
  if (pairs.size() != 1) return std::nullopt;
  const int north = pairs[0][0], south = pairs[0][1];
  std::vector<int> base;
  for (int v = 0; v < n; ++v)
    if (v != north && v != south) base.push_back(v);
  std::vector<int> cycle = walk_cycle(adj, base);
  if (cycle.empty()) return std::nullopt;
  const int kp = static_cast<int>(cycle.size());
  // Each pole joins every cycle edge into a triangle, and nothing else is
  // maximal: the face counts pin the closure.
  for (int i = 0; i < kp; ++i) {
    for (int pole : {north, south}) {
      std::vector<int> tri{pole, cycle[i], cycle[(i + 1) % kp]};
      std::sort(tri.begin(), tri.end());
      if (P.simplex_id(tri) < 0) return std::nullopt;
    }
  }
  const auto f = P.f_vector();
  if (f.size() != 3 || f[0] != kp + 2 || f[1] != 3LL * kp || f[2] != 2LL * kp)
    return std::nullopt;
  CanonicalChart c;
  c.family = ChartFamily::kSuspension;
  c.m = 2;
  c.k_factor = kp / 4.0;
  c.cycle = std::move(cycle);
  c.north = north;
  c.south = south;
  return c;
}

// Point on the carrier simplex spanned by weighted vertices. Weights may be
// zero; they must be nonnegative and normalized by the caller.
SimplexPoint weighted_point(const AllRightComplex& P,
                            std::vector<std::pair<int, double>> parts) {
  std::sort(parts.begin(), parts.end());
  std::vector<int> verts;
  Eigen::VectorXd dir(static_cast<int>(parts.size()));
  for (size_t i = 0; i < parts.size(); ++i) {
    verts.push_back(parts[i].first);
    dir[static_cast<int>(i)] = std::abs(parts[i].second);
  }
  SimplexPoint x;
  x.simplex = P.simplex_id(verts);
  if (x.simplex < 0)
    throw std::logic_error("chart point landed outside the complex");
  x.dir = dir;
  return x;
}

int cycle_position(const std::vector<int>& cycle, int v) {
  for (size_t i = 0; i < cycle.size(); ++i)
    if (cycle[i] == v) return static_cast<int>(i);
  return -1;
}

// Arc length along the cycle (in the complex's own metric, edge length
// pi/2) of a point supported on at most one cycle edge.
double cycle_arc(const std::vector<int>& cycle,
                 const std::vector<std::pair<int, double>>& comps) {
  const int kp = static_cast<int>(cycle.size());
  std::vector<std::pair<int, double>> on;  // (cycle position, weight)
  for (const auto& [v, c] : comps) {
    if (std::abs(c) < 1e-14) continue;
    const int pos = cycle_position(cycle, v);
    if (pos < 0) throw std::logic_error("point touches a non-cycle vertex");
    on.push_back({pos, c});
  }
  if (on.empty()) return 0.0;
  if (on.size() == 1) return on[0].first * kHalfPi;
  if (on.size() != 2) throw std::logic_error("point spans no cycle edge");
  std::sort(on.begin(), on.end());
  const auto [i, ci] = on[0];
  const auto [j, cj] = on[1];
  if (j == i + 1) return i * kHalfPi + std::atan2(cj, ci);
  if (i == 0 && j == kp - 1) return j * kHalfPi + std::atan2(ci, cj);
  throw std::logic_error("point spans no cycle edge");
}

}  // namespace

// --------------------------------------------------------------------------
// Dimension one.

double Dim1Smoothing::mu(double t) const {
  return 1.0 + (k() - 1.0) * bump((t - (r - d2)) / d2);
}

Jet Dim1Smoothing::mu(const Jet& t) const {
  return 1.0 + (k() - 1.0) * bump((t - (r - d2)) * (1.0 / d2));
}

RadialPtr Dim1Smoothing::metric() const {
  const Dim1Smoothing self = *this;
  return warped_product([self](const Jet& t) { return sinh(t) * self.mu(t); },
                        euclidean_metric(1));
}

RadialPtr Dim1Smoothing::forced() const {
  Eigen::MatrixXd g(1, 1);
  g(0, 0) = k() * k();
  return hyp_force(hyperbolic_cone(constant_metric(g)), r, d2,
                   euclidean_metric(1));
}

MetricPtr Dim1Smoothing::cut_limit(double b) const {
  const double m = 1.0 + (k() - 1.0) * bump(1.0 + b / d2);
  Eigen::MatrixXd g(1, 1);
  g(0, 0) = m * m;
  return constant_metric(g);
}

Dim1Smoothing smooth_cone_dim1(int segments, double r, double d2) {
  if (segments < 3)
    throw std::invalid_argument("circle smoothing needs at least 3 edges");
  if (!(r > d2 && d2 > 0.0))
    throw std::invalid_argument("circle smoothing needs r > d2 > 0");
  return Dim1Smoothing{segments, r, d2};
}

MetricFamily dim1_family(int segments, double d2, double xi) {
  MetricFamily out;
  out.xi = xi;
  out.at = [segments, d2](double lambda) {
    return smooth_cone_dim1(segments, lambda, d2).metric();
  };
  return out;
}

// --------------------------------------------------------------------------
// Canonical charts.

SimplexPoint CanonicalChart::point_of_chart(const AllRightComplex& P,
                                            const Eigen::VectorXd& u) const {
  if (static_cast<int>(u.size()) != m)
    throw std::invalid_argument("chart point has the wrong dimension");
  switch (family) {
    case ChartFamily::kCircle: {
      const int kp = static_cast<int>(cycle.size());
      const double arc = positive_fmod(u[0], 2.0 * kPi) * k_factor;
      const int seg = std::min(static_cast<int>(arc / kHalfPi), kp - 1);
      const double local = arc - seg * kHalfPi;
      return weighted_point(P, {{cycle[seg], std::cos(local)},
                                {cycle[(seg + 1) % kp], std::sin(local)}});
    }
    case ChartFamily::kSuspension: {
      const double theta = std::clamp(u[1], 0.0, kPi);
      const int pole = theta <= kHalfPi ? north : south;
      const double polar = theta <= kHalfPi ? theta : kPi - theta;
      const int kp = static_cast<int>(cycle.size());
      const double arc = positive_fmod(u[0], 2.0 * kPi) * k_factor;
      const int seg = std::min(static_cast<int>(arc / kHalfPi), kp - 1);
      const double local = arc - seg * kHalfPi;
      const double sp = std::sin(polar);
      return weighted_point(
          P, {{pole, std::cos(polar)},
              {cycle[seg], sp * std::cos(local)},
              {cycle[(seg + 1) % kp], sp * std::sin(local)}});
    }
    case ChartFamily::kSphere: {
      Eigen::VectorXd x(m + 1);
      if (m == 2) {
        x[0] = std::sin(u[1]) * std::cos(u[0]);
        x[1] = std::sin(u[1]) * std::sin(u[0]);
        x[2] = std::cos(u[1]);
      } else {
        const double sc = std::sin(u[2]);
        x[0] = sc * std::sin(u[1]) * std::cos(u[0]);
        x[1] = sc * std::sin(u[1]) * std::sin(u[0]);
        x[2] = sc * std::cos(u[1]);
        x[3] = std::cos(u[2]);
      }
      std::vector<std::pair<int, double>> parts;
      for (int i = 0; i <= m; ++i)
        parts.push_back({axes[i][x[i] >= 0.0 ? 0 : 1], std::abs(x[i])});
      return weighted_point(P, std::move(parts));
    }
  }
  throw std::logic_error("unknown chart family");
}

Eigen::VectorXd CanonicalChart::chart_of_point(const AllRightComplex& P,
                                               const SimplexPoint& x) const {
  validate_point(P, x, 1e-9, 1e-9);
  const auto& verts = P.simplex(x.simplex);
  auto comp = [&](int v) -> double {
    for (size_t i = 0; i < verts.size(); ++i)
      if (verts[i] == v) return x.dir[static_cast<int>(i)];
    return 0.0;
  };
  Eigen::VectorXd u(m);
  switch (family) {
    case ChartFamily::kCircle: {
      std::vector<std::pair<int, double>> comps;
      for (size_t i = 0; i < verts.size(); ++i)
        comps.push_back({verts[i], x.dir[static_cast<int>(i)]});
      u[0] = cycle_arc(cycle, comps) / k_factor;
      return u;
    }
    case ChartFamily::kSuspension: {
      const double cn = comp(north), cs = comp(south);
      std::vector<std::pair<int, double>> basec;
      double b2 = 0.0;
      for (size_t i = 0; i < verts.size(); ++i) {
        const int v = verts[i];
        if (v == north || v == south) continue;
        const double c = x.dir[static_cast<int>(i)];
        basec.push_back({v, c});
        b2 += c * c;
      }
      u[1] = std::atan2(std::sqrt(b2), cn - cs);
      u[0] = b2 > 1e-28 ? cycle_arc(cycle, basec) / k_factor : 0.0;
      return u;
    }
    case ChartFamily::kSphere: {
      Eigen::VectorXd xc(m + 1);
      for (int i = 0; i <= m; ++i)
        xc[i] = comp(axes[i][0]) - comp(axes[i][1]);
      u[0] = std::atan2(xc[1], xc[0]);
      u[1] = std::atan2(std::hypot(xc[0], xc[1]), xc[2]);
      if (m == 3) u[2] = std::atan2(xc.head<3>().norm(), xc[3]);
      return u;
    }
  }
  throw std::logic_error("unknown chart family");
}

MetricPtr CanonicalChart::model() const {
  return std::make_shared<HypersphericalMetric>(m, k_factor);
}

MetricPtr CanonicalChart::round() const {
  return std::make_shared<HypersphericalMetric>(m, 1.0);
}

CanonicalChart canonical_chart(const AllRightComplex& P) {
  const int m = P.dim();
  if (m == 1) {
    if (auto c = try_circle(P)) return *c;
  } else if (m == 2 || m == 3) {
    if (auto c = try_sphere(P)) return *c;
    if (m == 2)
      if (auto c = try_suspension(P)) return *c;
  }
  throw std::invalid_argument(
      "complex carries no canonical sphere identification (supported: "
      "circles, suspensions of circles, octahedral sphere triangulations)");
}

// --------------------------------------------------------------------------
// Inputs.

void SmoothingInput::validate() const {
  params.validate();
  const int m = P.dim();
  if (m < 1)
    throw std::invalid_argument("smoothing needs a complex of dimension >= 1");
  if (!(m + 1 <= params.xi))
    throw std::invalid_argument(
        "smoothing needs chart excess xi >= dim(P) + 1");
  for (int i = 2; i <= m + 1; ++i) params.depth(i);
  canonical_chart(P);
}

// --------------------------------------------------------------------------
// Patch charts and the patched metric.

struct SmoothedCone::PatchChart {
  int simplex = -1;
  int k = 0;
  CenteredPtr metric;
  SplitFn split;
};

// The patched metric in the global chart. Every evaluation classifies the
// direction into the fundamental regions at its radius; each holding region
// supplies a candidate (its patch pullback, or the plain cone metric for
// the top region) and all candidates must agree within tolerance. The
// lowest-dimensional patch is the primary value.
struct PatchedRadial final : public RadialMetric {
  explicit PatchedRadial(const SmoothedCone* owner) : owner_(owner) {}

  int link_dim() const override { return owner_->m_; }

  std::vector<int> holders(const Eigen::VectorXd& u, double t) const {
    const SmoothedCone& sc = *owner_;
    SimplexPoint x = sc.chart_.point_of_chart(sc.input_.P, u);
    x = canonicalize(sc.input_.P, x);
    const ConePoint p{x, t};
    std::vector<int> out;
    for (int sid : sc.patch_order_)
      if (y_membership(p, sc.regions_[sid]).inside) out.push_back(sid);
    if (y_membership(p, sc.top_region_).inside) out.push_back(-1);
    return out;
  }

  JetMatrix candidate(int holder, const JetVec& u, const Jet& t) const {
    const SmoothedCone& sc = *owner_;
    if (holder < 0) return sq(sinh(t)) * sc.model_->components(u);
    const auto& pc = *sc.patch_charts_[holder];
    return pullback_block(pc.metric, pc.split, u, t, sc.m_);
  }

  std::vector<SmoothedCone::Candidate> value_candidates(
      const std::vector<int>& hold, const Eigen::VectorXd& u, double t) const {
    JetVec uj(u.size());
    for (int i = 0; i < u.size(); ++i) uj[i] = Jet(u[i]);
    const Jet tj(t);
    std::vector<SmoothedCone::Candidate> out;
    for (int h : hold)
      out.push_back({h, candidate(h, uj, tj).values()});
    return out;
  }

  JetMatrix link_components(const JetVec& u, const Jet& t) const override {
    const SmoothedCone& sc = *owner_;
    if (t.v < sc.forcing_radius_ - kDomainTol) {
      std::ostringstream msg;
      msg << "patched cone metric evaluated at radius " << t.v
          << ", inside its domain boundary " << sc.forcing_radius_;
      throw std::domain_error(msg.str());
    }
    Eigen::VectorXd uval(u.size());
    for (size_t i = 0; i < u.size(); ++i)
      uval[static_cast<int>(i)] = u[i].v;
    const std::vector<int> hold = holders(uval, t.v);
    if (hold.empty())
      throw std::runtime_error(
          "no fundamental region holds the evaluation direction");
    if (hold.size() > 1) {
      const auto cands = value_candidates(hold, uval, t.v);
      const double worst = worst_disagreement(cands);
      if (worst > kAgreeRel) {
        std::ostringstream msg;
        msg << "patch candidates disagree (relative error " << worst
            << ") at radius " << t.v << " between regions";
        for (const auto& c : cands) msg << ' ' << c.simplex;
        throw std::runtime_error(msg.str());
      }
    }
    return candidate(hold.front(), u, t);
  }

  static double worst_disagreement(
      const std::vector<SmoothedCone::Candidate>& cands) {
    double scale = 0.0;
    for (const auto& c : cands)
      scale = std::max(scale, c.link_values.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (size_t a = 0; a + 1 < cands.size(); ++a)
      for (size_t b = a + 1; b < cands.size(); ++b) {
        const Eigen::MatrixXd& ga = cands[a].link_values;
        const Eigen::MatrixXd& gb = cands[b].link_values;
        for (int i = 0; i < ga.rows(); ++i)
          for (int j = 0; j < ga.cols(); ++j) {
            const double denom = std::max(std::abs(ga(i, j)),
                                          std::abs(gb(i, j))) +
                                 kAgreeFloor * scale;
            if (denom > 0.0)
              worst =
                  std::max(worst, std::abs(ga(i, j) - gb(i, j)) / denom);
          }
      }
    return worst;
  }

  const SmoothedCone* owner_;
};

// --------------------------------------------------------------------------
// SmoothedCone.

SmoothedCone::SmoothedCone(SmoothingInput input) : input_(std::move(input)) {
  input_.validate();
  m_ = input_.P.dim();
  chart_ = canonical_chart(input_.P);
  model_ = chart_.model();
  round_ = chart_.round();
  forcing_radius_ = nested_radius(input_.params, m_ - 2);
  depth_ = input_.params.depth(m_ + 1);
  build_charts();
  build_patches();
}

void SmoothedCone::build_charts() {
  if (m_ < 2) return;
  const AllRightComplex& P = input_.P;
  const ConeParams& params = input_.params;
  links_.resize(P.simplex_count());
  patch_charts_.resize(P.simplex_count());
  regions_.resize(P.simplex_count());
  for (int k = 0; k <= m_ - 2; ++k) {
    std::vector<int> ids = P.simplices_of_dim(k);
    std::sort(ids.begin(), ids.end());
    for (int sid : ids) {
      LinkSmoothing ls;
      ls.simplex = sid;
      ls.k = k;
      ls.link = simplicial_link(P, sid);
      if (ls.link.complex.dim() == 1) {
        ls.circle = std::make_shared<Dim1Smoothing>(smooth_cone_dim1(
            ls.link.complex.vertex_count(), params.r, params.depth(2)));
        ls.fiber = ls.circle->metric();
      } else {
        ls.cone = smooth_cone(ls.link.complex, params);
        ls.fiber = RadialPtr(ls.cone, ls.cone->metric().get());
      }
      ls.patch =
          hyp_extension(std::make_shared<PolarBase>(k + 1), ls.fiber);

      SplitFn split;
      if (chart_.family == ChartFamily::kSuspension) {
        const int v = P.simplex(sid)[0];
        if (v == chart_.north || v == chart_.south) {
          split = make_pole_split();
        } else {
          const int pos = cycle_position(chart_.cycle, v);
          if (pos < 0) throw std::logic_error("vertex missing from the cycle");
          split = make_equator_split(pos * kHalfPi / chart_.k_factor,
                                     chart_.k_factor);
        }
      } else if (m_ == 2) {  // octahedral sphere
        const int v = P.simplex(sid)[0];
        int slot = -1;
        double sign = 0.0;
        for (int i = 0; i < 3; ++i) {
          if (chart_.axes[i][0] == v) { slot = i; sign = 1.0; }
          if (chart_.axes[i][1] == v) { slot = i; sign = -1.0; }
        }
        if (slot == 2) {
          split = make_pole_split();
        } else {
          const double psi_v = (slot == 0) ? (sign > 0 ? 0.0 : kPi)
                                           : (sign > 0 ? kHalfPi : -kHalfPi);
          split = make_equator_split(psi_v, 1.0);
        }
      } else if (k == 0) {  // 3-sphere vertex
        const CanonicalChart& fc = ls.cone->chart();
        std::array<std::pair<int, double>, 3> fam;
        for (int a = 0; a < 3; ++a) {
          const int pv_plus = ls.link.vertex_to_parent[fc.axes[a][0]];
          const int pv_minus = ls.link.vertex_to_parent[fc.axes[a][1]];
          int slot = -1;
          double sign = 0.0;
          for (int i = 0; i < 4; ++i) {
            if (chart_.axes[i][0] == pv_plus) { slot = i; sign = 1.0; }
            if (chart_.axes[i][1] == pv_plus) { slot = i; sign = -1.0; }
          }
          if (slot < 0)
            throw std::logic_error("link axis lands on no chart axis");
          const int expect = sign > 0 ? chart_.axes[slot][1]
                                      : chart_.axes[slot][0];
          if (pv_minus != expect)
            throw std::logic_error("link axes are not antipodal in the chart");
          fam[a] = {slot, sign};
        }
        split = make_sphere3_vertex_split(fam);
      } else {  // 3-sphere edge
        const auto& vs = P.simplex(sid);
        int slots[2] = {-1, -1};
        double signs[2] = {0.0, 0.0};
        for (int e = 0; e < 2; ++e)
          for (int i = 0; i < 4; ++i) {
            if (chart_.axes[i][0] == vs[e]) { slots[e] = i; signs[e] = 1.0; }
            if (chart_.axes[i][1] == vs[e]) { slots[e] = i; signs[e] = -1.0; }
          }
        std::vector<int> comp;
        for (int i = 0; i < 4; ++i)
          if (i != slots[0] && i != slots[1]) comp.push_back(i);
        split = make_sphere3_edge_split(slots[0], signs[0], slots[1],
                                        signs[1], comp[0], comp[1]);
      }

      auto pc = std::make_shared<PatchChart>();
      pc->simplex = sid;
      pc->k = k;
      pc->metric = ls.patch;
      pc->split = std::move(split);
      patch_charts_[sid] = std::move(pc);
      regions_[sid] = y_region(P, params, sid);
      patch_order_.push_back(sid);
      links_[sid] = std::move(ls);
    }
  }
  top_region_ = y_region(P, params);
}

void SmoothedCone::build_patches() {
  if (m_ == 1) {
    const Dim1Smoothing d1 =
        smooth_cone_dim1(static_cast<int>(chart_.cycle.size()),
                         input_.params.r, input_.params.depth(2));
    patched_ = hyperbolic_cone(model_);
    metric_ = d1.metric();
    return;
  }
  patched_ = std::make_shared<PatchedRadial>(this);
  metric_ = hyp_force(patched_, forcing_radius_, depth_, round_);
}

const LinkSmoothing& SmoothedCone::link_smoothing(int simplex) const {
  if (simplex < 0 || simplex >= static_cast<int>(links_.size()) ||
      links_[simplex].simplex != simplex)
    throw std::invalid_argument("no patch is built around this simplex");
  return links_[simplex];
}

SmoothedCone::Evaluation SmoothedCone::evaluate(const Eigen::VectorXd& u,
                                                double t) const {
  Evaluation ev;
  if (m_ == 1) {
    JetVec uj{Jet(u[0])};
    Candidate c;
    c.simplex = -1;
    c.link_values = (sq(sinh(Jet(t))) * model_->components(uj)).values();
    ev.candidates.push_back(std::move(c));
    ev.chosen = -1;
    return ev;
  }
  const auto* pr = static_cast<const PatchedRadial*>(patched_.get());
  const std::vector<int> hold = pr->holders(u, t);
  if (hold.empty()) return ev;
  ev.candidates = pr->value_candidates(hold, u, t);
  ev.chosen = hold.front();
  ev.disagreement = PatchedRadial::worst_disagreement(ev.candidates);
  return ev;
}

Eigen::VectorXd SmoothedCone::product_point(int simplex,
                                            const Eigen::VectorXd& u,
                                            double t) const {
  if (simplex < 0 || simplex >= static_cast<int>(patch_charts_.size()) ||
      !patch_charts_[simplex])
    throw std::invalid_argument("no patch is built around this simplex");
  const PatchChart& pc = *patch_charts_[simplex];
  JetVec uj(u.size());
  for (int i = 0; i < u.size(); ++i) uj[i] = Jet(u[i]);
  const JetVec pi = pc.split(uj, Jet(t));
  Eigen::VectorXd out(static_cast<int>(pi.size()));
  for (size_t i = 0; i < pi.size(); ++i) out[static_cast<int>(i)] = pi[i].v;
  return out;
}

MetricPtr SmoothedCone::patch_pullback(int simplex) const {
  if (simplex < 0 || simplex >= static_cast<int>(patch_charts_.size()) ||
      !patch_charts_[simplex])
    throw std::invalid_argument("no patch is built around this simplex");
  const auto& pc = patch_charts_[simplex];
  return std::make_shared<PulledBackPatch>(pc->metric, pc->split, m_ + 1);
}

SmoothedConePtr smooth_cone(const AllRightComplex& P,
                            const ConeParams& params) {
  return std::make_shared<SmoothedCone>(SmoothingInput{P, params});
}

MetricFamily smoothed_family(const AllRightComplex& P,
                             const ConeParams& params) {
  SmoothingInput{P, params}.validate();
  const double sin_alpha =
      width_sine(params.alpha_widths(), P.dim() - 2);
  MetricFamily out;
  out.xi = params.xi;
  const AllRightComplex Pc = P;
  const ConeParams base = params;
  out.at = [Pc, base, sin_alpha](double lambda) -> RadialPtr {
    ConeParams p = base;
    p.r = asinh_scaled_sinh(lambda, sin_alpha);
    SmoothedConePtr sc = smooth_cone(Pc, p);
    return RadialPtr(sc, sc->metric().get());
  };
  return out;
}

// --------------------------------------------------------------------------
// Independence from the membership width scale.

CIndependenceReport c_independence_check(const AllRightComplex& P,
                                         const ConeParams& params,
                                         double c_prime, long long samples,
                                         uint64_t seed) {
  if (!(c_prime > params.c))
    throw std::invalid_argument(
        "scale independence check needs c_prime > c");
  ConeParams alt = params;
  alt.c = c_prime;
  const SmoothedConePtr a = smooth_cone(P, params);
  const SmoothedConePtr b = smooth_cone(P, alt);

  CIndependenceReport rep;
  rep.samples = samples;
  rep.seed = seed;

  Sampler smp(seed);
  const int n = P.dim() + 1;
  const double r0 = a->forcing_radius();
  double worst = 0.0;
  for (long long i = 0; i < samples; ++i) {
    const SimplexPoint x = smp.point(P);
    const Eigen::VectorXd u = a->chart().chart_of_point(P, x);
    Eigen::VectorXd p(n);
    p.head(n - 1) = u;
    p[n - 1] = r0 + 10.0 * smp.uniform();
    const Eigen::MatrixXd ga = metric_values(*a->metric(), p);
    const Eigen::MatrixXd gb = metric_values(*b->metric(), p);
    const double scale =
        std::max(ga.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const double denom =
            std::max(std::abs(ga(r, c)), std::abs(gb(r, c))) +
            kAgreeFloor * scale;
        if (denom > 0.0)
          worst = std::max(worst, std::abs(ga(r, c) - gb(r, c)) / denom);
      }
  }
  rep.max_disagreement = worst;
  rep.values_agree = worst <= kAgreeRel;

  // Membership widths grow with the scale: s'_{m,k} - s_{m,k} must clear
  // ln(c'/c) - 1 for every admissible (m, k) at every base radius.
  const double bound = std::log(c_prime / params.c) - 1.0;
  double min_margin = std::numeric_limits<double>::infinity();
  ConeParams pa = params;
  ConeParams pb = alt;
  pa.d.clear();
  pb.d.clear();
  for (int i = 0; i < 200; ++i) {
    const int mm = 2 + static_cast<int>(smp.rng()() % 2ull);
    const int kk = static_cast<int>(smp.rng()() % static_cast<uint64_t>(mm - 1));
    const double rr = 10.0 + 30.0 * smp.uniform();
    pa.r = rr;
    pb.r = rr;
    const double gap = radii(pb, mm, kk).s_mk - radii(pa, mm, kk).s_mk;
    min_margin = std::min(min_margin, gap - bound);
  }
  rep.min_gap_margin = min_margin;
  rep.gaps_hold = min_margin > 0.0;
  return rep;
}

// --------------------------------------------------------------------------
// Closed link manifolds.

RadialPtr manifold_force(RadialPtr g, MetricPtr h, double r0, double d) {
  if (!g || !h) throw std::invalid_argument("manifold forcing: null metric");
  if (h->dim() != g->link_dim())
    throw std::invalid_argument(
        "manifold forcing: link metric dimension mismatch");
  if (!(d > 0.0 && r0 - 2.0 * d > 0.0))
    throw std::invalid_argument("manifold forcing: need r0 > 2 d > 0");
  // Outside the seam: sinh^2(t) (h + rho(t)(g_cut - h)) + dt^2 across
  // [r0 - d, r0], the warp-forced input beyond.
  RadialPtr outer = radial_blend(
      [r0, d](const Jet& t) { return bump((t - (r0 - d)) * (1.0 / d)); },
      hyperbolic_cone(h), warp_force(std::move(g), r0));
  // Inside: mu(t)^2 h + dt^2 with mu running from e^t/2 to sinh(t) across
  // [r0 - 2d, r0 - d]; defined for every real t.
  Profile mu = [r0, d](const Jet& t) {
    return (exp(t) -
            bump((t - (r0 - 2.0 * d)) * (1.0 / d)) * exp(-t)) *
           0.5;
  };
  RadialPtr inner = warped_product(std::move(mu), h);
  // The branches meet at r0 - d with flat contact (both transition
  // profiles have flat tails there), so a hard selector keeps each side's
  // jets exact.
  const double seam = r0 - d;
  return radial_blend(
      [seam](const Jet& t) { return Jet(t.v < seam ? 0.0 : 1.0); },
      std::move(inner), std::move(outer));
}

ManifoldSmoothing smooth_cone_manifold(const AllRightComplex& P, MetricPtr h,
                                       const ConeParams& params) {
  SmoothingInput{P, params}.validate();
  const int m = P.dim();
  if (!h || h->dim() != m)
    throw std::invalid_argument(
        "manifold smoothing: link metric must match the complex dimension");
  const double r0 = nested_radius(params, m - 2);
  const double d = params.depth(m + 1);
  if (!(r0 - 2.0 * d > 0.0))
    throw std::invalid_argument(
        "manifold smoothing: forcing radius must exceed twice the top depth");
  const SmoothedConePtr cone = smooth_cone(P, params);
  ManifoldSmoothing out;
  out.forcing_radius = r0;
  out.depth = d;
  out.metric =
      manifold_force(RadialPtr(cone, cone->metric().get()), h, r0, d);
  if (m + 1 > 4)
    out.warnings.push_back(
        "link-manifold smoothing above dimension 4 relies on a vanishing "
        "Whitehead-group hypothesis that this tool does not check");
  return out;
}

// --------------------------------------------------------------------------
// Split radii.

SplitRadii split_radii(double s, double beta) {
  if (s < 0.0)
    throw std::invalid_argument("split radii: radius must be nonnegative");
  SplitRadii out;
  out.fiber_r = asinh_scaled_sinh(s, std::abs(std::sin(beta)));
  const double ratio = std::cosh(s) / std::cosh(out.fiber_r);
  out.base_t = std::acosh(std::max(1.0, ratio));
  return out;
}

}  // namespace conesmith
