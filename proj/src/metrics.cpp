#include "conesmith/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conesmith {

namespace {

// Arguments this close to the flat tails are clamped onto them. The true
// value there is below double underflow anyway; clamping keeps the jet
// chain rule away from 0 * inf.
constexpr double kTailGuard = 1e-12;

}  // namespace

double bump(double x) {
  if (x <= kTailGuard) return 0.0;
  if (x >= 1.0 - kTailGuard) return 1.0;
  const double ea = std::exp(-1.0 / x);
  const double eb = std::exp(-1.0 / (1.0 - x));
  return ea / (ea + eb);
}

Jet bump(const Jet& x) {
  if (x.v <= kTailGuard) return Jet(0.0);
  if (x.v >= 1.0 - kTailGuard) return Jet(1.0);
  const Jet ea = exp(-1.0 / x);
  const Jet eb = exp(-1.0 / (1.0 - x));
  return ea / (ea + eb);
}

double bump_ad(double a, double d, double t) {
  if (d <= 0.0) throw std::invalid_argument("bump_ad: d must be positive");
  return bump(2.0 * (t - a) / d);
}

Jet bump_ad(double a, double d, const Jet& t) {
  if (d <= 0.0) throw std::invalid_argument("bump_ad: d must be positive");
  return bump((t - a) * (2.0 / d));
}

double bump_from(double r0, double t) { return bump(2.0 * t - 2.0 * r0); }

Jet bump_from(double r0, const Jet& t) { return bump((t - r0) * 2.0); }

// --------------------------------------------------------------------------

JetMatrix RadialMetric::components(const JetVec& x) const {
  const int n = dim();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("radial metric: chart point has wrong size");
  JetVec u(x.begin(), x.end() - 1);
  JetMatrix out = JetMatrix::zero(n);
  set_block(out, 0, link_components(u, x.back()));
  out(n - 1, n - 1) = Jet(1.0);
  return out;
}

JetVec seed_chart(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  JetVec p(n);
  for (int i = 0; i < n; ++i) p[i] = Jet::variable(x[i], i, n);
  return p;
}

Eigen::MatrixXd metric_values(const Metric& m, const Eigen::VectorXd& x) {
  if (static_cast<int>(x.size()) != m.dim())
    throw std::invalid_argument("metric_values: point has wrong size");
  JetVec p(x.size());
  for (int i = 0; i < x.size(); ++i) p[i] = Jet(x[i]);
  return m.components(p).values();
}

Eigen::MatrixXd metric_values_checked(const Metric& m,
                                      const Eigen::VectorXd& x) {
  Eigen::MatrixXd g = metric_values(m, x);
  const double scale = 1.0 + g.cwiseAbs().maxCoeff();
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::runtime_error("metric components are not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (g + g.transpose()));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "metric components are not positive-definite at the sampled point");
  return g;
}

// --------------------------------------------------------------------------
// Leaves

namespace {

class EuclideanMetric final : public Metric {
 public:
  EuclideanMetric(int n, double scale) : n_(n), s2_(scale * scale) {
    if (n < 1) throw std::invalid_argument("euclidean_metric: dim < 1");
    if (scale <= 0.0)
      throw std::invalid_argument("euclidean_metric: scale must be positive");
  }
  int dim() const override { return n_; }
  JetMatrix components(const JetVec&) const override {
    JetMatrix g = JetMatrix::zero(n_);
    for (int i = 0; i < n_; ++i) g(i, i) = Jet(s2_);
    return g;
  }

 private:
  int n_;
  double s2_;
};

class ConstantMetric final : public Metric {
 public:
  explicit ConstantMetric(const Eigen::MatrixXd& g) : g_(g) {
    if (g.rows() != g.cols() || g.rows() < 1)
      throw std::invalid_argument("constant_metric: matrix must be square");
    if ((g - g.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("constant_metric: matrix must be symmetric");
  }
  int dim() const override { return static_cast<int>(g_.rows()); }
  JetMatrix components(const JetVec&) const override {
    const int n = dim();
    JetMatrix g = JetMatrix::zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = Jet(g_(i, j));
    return g;
  }

 private:
  Eigen::MatrixXd g_;
};

// Chart point zeta stands for the unit vector (sqrt(1 - |zeta|^2), zeta).
class RoundSphereChartMetric final : public Metric {
 public:
  explicit RoundSphereChartMetric(int k) : k_(k) {
    if (k < 1) throw std::invalid_argument("round_sphere_chart: dim < 1");
  }
  int dim() const override { return k_; }
  JetMatrix components(const JetVec& z) const override {
    Jet s(0.0);
    for (const Jet& zi : z) s = s + sq(zi);
    const Jet inv = 1.0 / (1.0 - s);
    JetMatrix g = JetMatrix::zero(k_);
    for (int i = 0; i < k_; ++i) {
      for (int j = i; j < k_; ++j) {
        g(i, j) = z[i] * z[j] * inv;
        if (i == j) g(i, j) = g(i, j) + 1.0;
        g(j, i) = g(i, j);
      }
    }
    return g;
  }

 private:
  int k_;
};

class PoincareBallMetric final : public CenteredMetric {
 public:
  explicit PoincareBallMetric(int k) : k_(k) {
    if (k < 1) throw std::invalid_argument("poincare_ball: dim < 1");
  }
  int dim() const override { return k_; }
  JetMatrix components(const JetVec& w) const override {
    Jet s(0.0);
    for (const Jet& wi : w) s = s + sq(wi);
    const Jet f = sq(2.0 / (1.0 - s));
    JetMatrix g = JetMatrix::zero(k_);
    for (int i = 0; i < k_; ++i) g(i, i) = f;
    return g;
  }
  // Not differentiable at the center itself; center_cosh is, use that in
  // anything that has to stay smooth across w = 0.
  Jet center_distance(const JetVec& w) const override {
    Jet s(0.0);
    for (const Jet& wi : w) s = s + sq(wi);
    if (s.v <= 0.0) return Jet(0.0);
    return 2.0 * atanh(sqrt(s));
  }
  Jet center_cosh(const JetVec& w) const override {
    Jet s(0.0);
    for (const Jet& wi : w) s = s + sq(wi);
    return (1.0 + s) / (1.0 - s);
  }

 private:
  int k_;
};

}  // namespace

MetricPtr euclidean_metric(int n, double scale) {
  return std::make_shared<EuclideanMetric>(n, scale);
}

MetricPtr constant_metric(const Eigen::MatrixXd& g) {
  return std::make_shared<ConstantMetric>(g);
}

MetricPtr round_sphere_chart(int k) {
  return std::make_shared<RoundSphereChartMetric>(k);
}

CenteredPtr poincare_ball(int k) {
  return std::make_shared<PoincareBallMetric>(k);
}

// --------------------------------------------------------------------------
// Radial combinators

namespace {

class WarpedProductMetric final : public RadialMetric {
 public:
  WarpedProductMetric(Profile f, MetricPtr link)
      : f_(std::move(f)), link_(std::move(link)) {
    if (!f_ || !link_)
      throw std::invalid_argument("warped_product: null profile or link");
  }
  int link_dim() const override { return link_->dim(); }
  JetMatrix link_components(const JetVec& u, const Jet& t) const override {
    return sq(f_(t)) * link_->components(u);
  }

 private:
  Profile f_;
  MetricPtr link_;
};

class RadialBlendMetric final : public RadialMetric {
 public:
  RadialBlendMetric(Profile phi, RadialPtr a, RadialPtr b)
      : phi_(std::move(phi)), a_(std::move(a)), b_(std::move(b)) {
    if (!phi_ || !a_ || !b_)
      throw std::invalid_argument("radial_blend: null argument");
    if (a_->link_dim() != b_->link_dim())
      throw std::invalid_argument("radial_blend: link dimensions differ");
  }
  int link_dim() const override { return a_->link_dim(); }
  JetMatrix link_components(const JetVec& u, const Jet& t) const override {
    const Jet p = phi_(t);
    // Skip the side whose weight is exactly zero so evaluation never leaves
    // the region where that side's formula is defined.
    if (p.constant() && p.v == 0.0) return a_->link_components(u, t);
    if (p.constant() && p.v == 1.0) return b_->link_components(u, t);
    const JetMatrix ga = a_->link_components(u, t);
    const JetMatrix gb = b_->link_components(u, t);
    // a + p (b - a) rather than (1-p) a + p b: the blend is then exact
    // wherever the two sides agree.
    JetMatrix out(ga.rows(), ga.cols());
    for (int i = 0; i < ga.rows(); ++i)
      for (int j = 0; j < ga.cols(); ++j)
        out(i, j) = ga(i, j) + p * (gb(i, j) - ga(i, j));
    return out;
  }

 private:
  Profile phi_;
  RadialPtr a_, b_;
};

class FixedCutMetric final : public Metric {
 public:
  FixedCutMetric(RadialPtr g, double r0) : g_(std::move(g)), r0_(r0) {
    if (!g_) throw std::invalid_argument("spherical_cut: null metric");
    if (r0 <= 0.0)
      throw std::invalid_argument("spherical_cut: radius must be positive");
    inv_ = 1.0 / (std::sinh(r0) * std::sinh(r0));
  }
  int dim() const override { return g_->link_dim(); }
  JetMatrix components(const JetVec& u) const override {
    return Jet(inv_) * g_->link_components(u, Jet(r0_));
  }

 private:
  RadialPtr g_;
  double r0_;
  double inv_;
};

}  // namespace

RadialPtr warped_product(Profile f, MetricPtr link) {
  return std::make_shared<WarpedProductMetric>(std::move(f), std::move(link));
}

RadialPtr hyperbolic_cone(MetricPtr link) {
  return warped_product([](const Jet& t) { return sinh(t); }, std::move(link));
}

RadialPtr radial_blend(Profile phi, RadialPtr a, RadialPtr b) {
  return std::make_shared<RadialBlendMetric>(std::move(phi), std::move(a),
                                             std::move(b));
}

MetricPtr spherical_cut(RadialPtr g, double r0) {
  return std::make_shared<FixedCutMetric>(std::move(g), r0);
}

RadialPtr warp_force(RadialPtr g, double r0) {
  RadialPtr forced = hyperbolic_cone(spherical_cut(g, r0));
  return radial_blend([r0](const Jet& t) { return bump_from(r0, t); },
                      std::move(forced), std::move(g));
}

RadialPtr two_var_deform(RadialPtr g, double a, double d, MetricPtr round) {
  if (d <= 0.0)
    throw std::invalid_argument("two_var_deform: d must be positive");
  if (!round || round->dim() != g->link_dim())
    throw std::invalid_argument(
        "two_var_deform: round metric does not match the link chart");
  // sinh^2(t) ((1 - rho) round + rho g_t / sinh^2(t)) + dt^2 folds into a
  // plain blend of the round cone with g.
  RadialPtr round_cone = hyperbolic_cone(std::move(round));
  return radial_blend([a, d](const Jet& t) { return bump_ad(a, d, t); },
                      std::move(round_cone), std::move(g));
}

RadialPtr hyp_force(RadialPtr g, double r0, double d, MetricPtr round) {
  if (!(r0 > d && d > 0.0))
    throw std::invalid_argument("hyp_force: need r0 > d > 0");
  return two_var_deform(warp_force(std::move(g), r0), r0 - d, d,
                        std::move(round));
}

// --------------------------------------------------------------------------
// Extensions

namespace {

class ExtensionMetric final : public CenteredMetric {
 public:
  ExtensionMetric(CenteredPtr base, CenteredPtr fiber)
      : base_(std::move(base)), fiber_(std::move(fiber)) {
    if (!base_ || !fiber_)
      throw std::invalid_argument("hyp_extension: null factor");
  }
  int dim() const override { return base_->dim() + fiber_->dim(); }
  JetMatrix components(const JetVec& x) const override {
    if (static_cast<int>(x.size()) != dim())
      throw std::invalid_argument("hyp_extension: chart point has wrong size");
    const int bd = base_->dim();
    const JetVec w(x.begin(), x.begin() + bd);
    const JetVec y(x.begin() + bd, x.end());
    JetMatrix out = JetMatrix::zero(dim());
    set_block(out, 0, sq(fiber_->center_cosh(y)) * base_->components(w));
    set_block(out, bd, fiber_->components(y));
    return out;
  }
  Jet center_cosh(const JetVec& x) const override {
    const int bd = base_->dim();
    const JetVec w(x.begin(), x.begin() + bd);
    const JetVec y(x.begin() + bd, x.end());
    return base_->center_cosh(w) * fiber_->center_cosh(y);
  }
  Jet center_distance(const JetVec& x) const override {
    const Jet c = center_cosh(x);
    if (c.v <= 1.0) return Jet(0.0);
    return acosh(c);
  }

 private:
  CenteredPtr base_, fiber_;
};

}  // namespace

CenteredPtr hyp_extension(CenteredPtr base, CenteredPtr fiber) {
  return std::make_shared<ExtensionMetric>(std::move(base), std::move(fiber));
}

CenteredPtr hyp_extension_k(int k, CenteredPtr fiber) {
  return hyp_extension(poincare_ball(k), std::move(fiber));
}

// --------------------------------------------------------------------------
// Families

MetricFamily family_force(const MetricFamily& F, double d, MetricPtr round) {
  MetricFamily out;
  out.xi = F.xi;
  auto at = F.at;
  out.at = [at, d, round](double lambda) {
    return hyp_force(at(lambda), lambda, d, round);
  };
  return out;
}

double theta_reparam(double lambda_prime, double theta) {
  constexpr double half_pi = 1.5707963267948966;
  if (!(theta > 0.0 && theta <= half_pi + 1e-15))
    throw std::invalid_argument("theta_reparam: theta outside (0, pi/2]");
  return std::asinh(std::sinh(lambda_prime) * std::sin(theta));
}

MetricFamily theta_reparam_family(const MetricFamily& F, double theta) {
  MetricFamily out;
  out.xi = F.xi;
  auto at = F.at;
  out.at = [at, theta](double lambda_prime) {
    return at(theta_reparam(lambda_prime, theta));
  };
  return out;
}

// --------------------------------------------------------------------------
// Grid comparison and cut limits

namespace {

double grid_distance(const Metric& a, const Metric& b, const GridSpec& grid,
                     bool with_derivatives) {
  const int n = a.dim();
  if (b.dim() != n)
    throw std::invalid_argument("grid distance: metric dimensions differ");
  if (grid.lo.size() != n || grid.hi.size() != n)
    throw std::invalid_argument("grid distance: box has wrong dimension");
  if (grid.points_per_axis < 2)
    throw std::invalid_argument("grid distance: need 2+ points per axis");

  // Axes pinned to a single value (lo == hi) contribute one grid point.
  std::vector<int> counts(n);
  for (int i = 0; i < n; ++i)
    counts[i] = (grid.hi[i] - grid.lo[i] > 1e-15) ? grid.points_per_axis : 1;

  std::vector<int> idx(n, 0);
  Eigen::VectorXd x(n);
  double worst = 0.0;
  for (;;) {
    for (int i = 0; i < n; ++i)
      x[i] = counts[i] == 1 ? grid.lo[i]
                            : grid.lo[i] + (grid.hi[i] - grid.lo[i]) * idx[i] /
                                               (counts[i] - 1);
    const JetVec p = with_derivatives ? seed_chart(x) : [&] {
      JetVec q(n);
      for (int i = 0; i < n; ++i) q[i] = Jet(x[i]);
      return q;
    }();
    const JetMatrix ga = a.components(p);
    const JetMatrix gb = b.components(p);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const Jet diff = ga(i, j) - gb(i, j);
        worst = std::max(worst, std::abs(diff.v));
        if (diff.d.size() > 0)
          worst = std::max(worst, diff.d.cwiseAbs().maxCoeff());
        if (diff.h.size() > 0)
          worst = std::max(worst, diff.h.cwiseAbs().maxCoeff());
      }
    }
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == counts[axis]) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return worst;
}

}  // namespace

double c2_distance(const Metric& a, const Metric& b, const GridSpec& grid) {
  return grid_distance(a, b, grid, true);
}

double c0_distance(const Metric& a, const Metric& b, const GridSpec& grid) {
  return grid_distance(a, b, grid, false);
}

CutLimit cut_limit_probe(const MetricFamily& F, double b,
                         const std::vector<double>& lambdas,
                         const GridSpec& grid) {
  if (lambdas.size() < 2)
    throw std::invalid_argument("cut_limit_probe: need at least 2 indices");
  std::vector<double> schedule = lambdas;
  std::sort(schedule.begin(), schedule.end());

  std::vector<MetricPtr> cuts;
  cuts.reserve(schedule.size());
  for (double lambda : schedule)
    cuts.push_back(spherical_cut(F.at(lambda), lambda + b));

  CutLimit out;
  out.b = b;
  out.limit = cuts.back();
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    out.deviations.push_back(c2_distance(*cuts[i], *out.limit, grid));
  out.achieved = out.deviations.back();

  out.cauchy = true;
  for (size_t i = 0; i + 1 < out.deviations.size(); ++i) {
    const double slack = std::max(1e-12, 1e-9 * out.deviations[i]);
    if (out.deviations[i + 1] > out.deviations[i] + slack) out.cauchy = false;
  }
  return out;
}

}  // namespace conesmith
