#include "conesmith/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace conesmith {

namespace {

// J^T G J for a jet-valued Jacobian J. A model chart's Jacobian entries are
// affine in the chart coordinates, so the congruence keeps exact jets.
JetMatrix congruence(const JetMatrix& jac, const JetMatrix& g) {
  const int rows = static_cast<int>(jac.rows());
  const int cols = static_cast<int>(jac.cols());
  JetMatrix half(cols, rows);  // J^T G
  for (int i = 0; i < cols; ++i)
    for (int b = 0; b < rows; ++b) {
      Jet acc(0.0);
      for (int r = 0; r < rows; ++r) acc = acc + g(r, b) * jac(r, i);
      half(i, b) = acc;
    }
  JetMatrix out(cols, cols);
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < cols; ++j) {
      Jet acc(0.0);
      for (int b = 0; b < rows; ++b) acc = acc + half(i, b) * jac(b, j);
      out(i, j) = acc;
    }
  return out;
}

// Derivative of ModelChart::embed at x, as jets in the chart variables.
JetMatrix chart_jacobian(const ModelChart& chart, const JetVec& x) {
  const int rows = static_cast<int>(chart.frame.rows());
  const int cols = static_cast<int>(chart.frame.cols());
  JetMatrix jac(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      Jet entry(chart.frame(i, j));
      if (static_cast<size_t>(i) < chart.quad.size())
        for (int a = 0; a < chart.quad[i].cols(); ++a) {
          const double coeff = chart.quad[i](j, a);
          if (coeff != 0.0) entry = entry + x[a] * coeff;
        }
      jac(i, j) = entry;
    }
  return jac;
}

// Accumulates squared entries of a jet per derivative order. Frobenius
// norms across whole orders are invariant under the orthogonal rotation
// freedom of a chart frame, unlike a max over raw entries.
void accumulate_c2_squares(const Jet& j, double* val_sq, double* grad_sq,
                           double* hess_sq) {
  *val_sq += j.v * j.v;
  for (int k = 0; k < j.d.size(); ++k) *grad_sq += j.d(k) * j.d(k);
  for (int k = 0; k < j.h.rows(); ++k)
    for (int l = 0; l < j.h.cols(); ++l) *hess_sq += j.h(k, l) * j.h(k, l);
}

// Kronecker-sequence points in a box: the additive recurrence with the
// generalized plastic ratio, a standard low-discrepancy choice.
std::vector<Eigen::VectorXd> low_discrepancy_box(int count,
                                                 const Eigen::VectorXd& lo,
                                                 const Eigen::VectorXd& hi) {
  const int d = static_cast<int>(lo.size());
  if (d == 0) return {Eigen::VectorXd(0)};
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
  Eigen::VectorXd alpha(d);
  for (int j = 0; j < d; ++j) alpha(j) = std::pow(1.0 / phi, j + 1);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) {
      double frac = 0.5 + (i + 1) * alpha(j);
      frac -= std::floor(frac);
      x(j) = lo(j) + frac * (hi(j) - lo(j));
    }
    out.push_back(x);
  }
  return out;
}

std::vector<Eigen::MatrixXd> gamma_from(
    const Eigen::MatrixXd& ginv, const std::vector<Eigen::MatrixXd>& dg) {
  const int n = static_cast<int>(ginv.rows());
  auto tsym = [&](int d, int b, int c) {
    return dg[b](d, c) + dg[c](d, b) - dg[d](b, c);
  };
  std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        double acc = 0.0;
        for (int d = 0; d < n; ++d) acc += ginv(a, d) * tsym(d, b, c);
        gamma[a](b, c) = 0.5 * acc;
        gamma[a](c, b) = gamma[a](b, c);
      }
  return gamma;
}

Eigen::MatrixXd inverse_or_throw(const Eigen::MatrixXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(
        "metric is not positive definite at the probe point");
  return llt.solve(Eigen::MatrixXd::Identity(g.rows(), g.cols()));
}

std::vector<double> axis_values(double lo, double hi, int points) {
  if (points < 2 || hi - lo <= 1e-15) return {0.5 * (lo + hi)};
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return out;
}

}  // namespace

// --------------------------------------------------------------------------
// Model charts

Eigen::VectorXd ModelChart::embed(const Eigen::VectorXd& x) const {
  if (x.size() != frame.cols())
    throw std::invalid_argument("chart point has the wrong dimension");
  Eigen::VectorXd out = center + frame * x;
  for (size_t i = 0; i < quad.size(); ++i)
    out(static_cast<int>(i)) += 0.5 * x.dot(quad[i] * x);
  return out;
}

JetVec ModelChart::embed(const JetVec& x) const {
  if (static_cast<int>(x.size()) != frame.cols())
    throw std::invalid_argument("chart point has the wrong dimension");
  JetVec out(frame.rows());
  for (int i = 0; i < frame.rows(); ++i) {
    Jet acc(center(i));
    for (int j = 0; j < frame.cols(); ++j) acc = acc + x[j] * frame(i, j);
    if (static_cast<size_t>(i) < quad.size())
      for (int a = 0; a < quad[i].rows(); ++a)
        for (int b = 0; b < quad[i].cols(); ++b) {
          const double coeff = 0.5 * quad[i](a, b);
          if (coeff != 0.0) acc = acc + (x[a] * x[b]) * coeff;
        }
    out[i] = acc;
  }
  return out;
}

ModelChart radial_chart(const Eigen::VectorXd& u0, double a,
                        const Eigen::MatrixXd& link_frame, double xi) {
  if (link_frame.rows() != link_frame.cols() ||
      link_frame.rows() != u0.size())
    throw std::invalid_argument("link frame must be square over the link");
  const int l = static_cast<int>(u0.size()) + 1;
  ModelChart chart;
  chart.xi = xi;
  chart.frame = Eigen::MatrixXd::Zero(l, l);
  chart.frame.topLeftCorner(l - 1, l - 1) = link_frame;
  chart.frame(l - 1, l - 1) = 1.0;
  chart.center = Eigen::VectorXd::Zero(l);
  chart.center.head(l - 1) = u0;
  chart.center(l - 1) = a;
  return chart;
}

ModelChart radial_normal_chart(const RadialPtr& g, const Eigen::VectorXd& u0,
                               double a, const Eigen::MatrixXd& link_frame,
                               double xi) {
  if (!g) throw std::invalid_argument("metric is null");
  ModelChart chart = radial_chart(u0, a, link_frame, xi);
  const int l = chart.dim();
  if (l < 2) return chart;  // no link directions to straighten
  // Christoffel symbols are scale invariant, so the normalized cut of the
  // radius-a slice carries the same ones as the slice itself.
  const std::vector<Eigen::MatrixXd> gamma =
      christoffel(*spherical_cut(g, a), u0);
  chart.quad.assign(l, Eigen::MatrixXd::Zero(l, l));
  for (int m = 0; m + 1 < l; ++m)
    chart.quad[m].topLeftCorner(l - 1, l - 1) =
        -link_frame.transpose() * gamma[m] * link_frame;
  return chart;
}

ModelChart radial_normal_chart(const RadialPtr& g, const Eigen::VectorXd& u0,
                               double a, double xi) {
  if (!g) throw std::invalid_argument("metric is null");
  return radial_normal_chart(g, u0, a, normalizing_link_frame(*g, u0, a), xi);
}

Eigen::MatrixXd normalizing_link_frame(const RadialMetric& g,
                                       const Eigen::VectorXd& u0, double a) {
  const int l = g.link_dim();
  if (u0.size() != l)
    throw std::invalid_argument("link point has the wrong dimension");
  JetVec u(l);
  for (int i = 0; i < l; ++i) u[i] = Jet(u0(i));
  const Eigen::MatrixXd values = g.link_components(u, Jet(a)).values();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(values);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument(
        "link components are not positive definite at the chart center");
  return eig.operatorInverseSqrt();
}

std::vector<Eigen::MatrixXd> christoffel(const Metric& g,
                                         const Eigen::VectorXd& p) {
  const int n = g.dim();
  if (p.size() != n)
    throw std::invalid_argument("point has the wrong dimension");
  const JetMatrix comp = g.components(seed_chart(p));
  Eigen::MatrixXd values(n, n);
  std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet& c = comp(i, j);
      values(i, j) = c.v;
      for (int k = 0; k < c.d.size(); ++k) dg[k](i, j) = c.d(k);
    }
  return gamma_from(inverse_or_throw(values), dg);
}

double c2_deviation(const Metric& g, const ModelChart& chart,
                    int points_per_axis) {
  const int l = chart.dim();
  if (g.dim() != l)
    throw std::invalid_argument("chart and metric dimensions differ");
  if (points_per_axis < 2)
    throw std::invalid_argument("need at least two points per axis");

  // Link axes stay inside the unit ball; the inscribed cube keeps the grid
  // admissible for every dimension.
  const double box = l > 1 ? 1.0 / std::sqrt(static_cast<double>(l - 1)) : 0.0;
  const double span = 1.0 + chart.xi;

  std::vector<std::vector<double>> axes(l);
  for (int i = 0; i + 1 < l; ++i)
    axes[i] = axis_values(-box, box, points_per_axis);
  axes[l - 1] = axis_values(-span, span, points_per_axis);

  std::vector<int> idx(l, 0);
  double worst = 0.0;
  for (;;) {
    JetVec x(l);
    for (int i = 0; i < l; ++i)
      x[i] = Jet::variable(axes[i][idx[i]], i, l);
    const JetMatrix pulled =
        congruence(chart_jacobian(chart, x), g.components(chart.embed(x)));
    const Jet scale = sq(exp(x[l - 1]));
    double val_sq = 0.0, grad_sq = 0.0, hess_sq = 0.0;
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) {
        Jet ref(0.0);
        if (i == j) ref = (i == l - 1) ? Jet(1.0) : scale;
        const Jet diff = pulled(i, j) - ref;
        if (!std::isfinite(diff.v))
          throw std::domain_error("chart grid left the metric's domain");
        accumulate_c2_squares(diff, &val_sq, &grad_sq, &hess_sq);
      }
    worst = std::max(worst,
                     std::sqrt(std::max({val_sq, grad_sq, hess_sq})));

    int axis = l - 1;
    while (axis >= 0 && ++idx[axis] == static_cast<int>(axes[axis].size()))
      idx[axis--] = 0;
    if (axis < 0) break;
  }
  return worst;
}

double chart_center_path_length(const Metric& g, const ModelChart& chart,
                                const Eigen::VectorXd& x, int steps) {
  const int l = chart.dim();
  if (x.size() != l)
    throw std::invalid_argument("chart point has the wrong dimension");
  if (steps < 2) throw std::invalid_argument("need at least two steps");

  // Chart velocities are constant along each segment; the image velocity
  // picks up the quadratic term's derivative where one is present.
  auto segment = [&](const Eigen::VectorXd& from, const Eigen::VectorXd& to) {
    const Eigen::VectorXd w = to - from;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double s = static_cast<double>(i) / steps;
      const Eigen::VectorXd x = from + s * w;
      Eigen::VectorXd vel = chart.frame * w;
      for (size_t q = 0; q < chart.quad.size(); ++q)
        vel(static_cast<int>(q)) += x.dot(chart.quad[q] * w);
      const Eigen::VectorXd p = chart.embed(x);
      const double speed = std::sqrt(vel.dot(metric_values(g, p) * vel));
      sum += (i == 0 || i == steps) ? 0.5 * speed : speed;
    }
    return sum / steps;
  };

  Eigen::VectorXd drop = x;
  drop(l - 1) = 0.0;
  return segment(x, drop) + segment(drop, Eigen::VectorXd::Zero(l));
}

// --------------------------------------------------------------------------
// Sectional curvature

CurvatureProbe::CurvatureProbe(const Metric& g, const Eigen::VectorXd& p) {
  n_ = g.dim();
  if (p.size() != n_)
    throw std::invalid_argument("probe point has the wrong dimension");
  const JetMatrix comp = g.components(seed_chart(p));
  g_ = Eigen::MatrixXd(n_, n_);
  dg_.assign(n_, Eigen::MatrixXd::Zero(n_, n_));
  d2g_.assign(n_, std::vector<Eigen::MatrixXd>(
                      n_, Eigen::MatrixXd::Zero(n_, n_)));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      const Jet& c = comp(i, j);
      g_(i, j) = c.v;
      for (int k = 0; k < c.d.size(); ++k) dg_[k](i, j) = c.d(k);
      for (int k = 0; k < c.h.rows(); ++k)
        for (int l = 0; l < c.h.cols(); ++l) d2g_[k][l](i, j) = c.h(k, l);
    }
  assemble();
}

CurvatureProbe CurvatureProbe::finite_difference(const Metric& g,
                                                 const Eigen::VectorXd& p,
                                                 double h) {
  const int n = g.dim();
  if (p.size() != n)
    throw std::invalid_argument("probe point has the wrong dimension");
  if (h <= 0.0) throw std::invalid_argument("step must be positive");

  auto at = [&](const Eigen::VectorXd& q) { return metric_values(g, q); };
  auto shifted = [&](int k, double dk, int l, double dl) {
    Eigen::VectorXd q = p;
    q(k) += dk;
    if (l >= 0) q(l) += dl;
    return at(q);
  };

  CurvatureProbe probe;
  probe.n_ = n;
  probe.g_ = at(p);
  probe.dg_.assign(n, Eigen::MatrixXd::Zero(n, n));
  probe.d2g_.assign(n, std::vector<Eigen::MatrixXd>(
                           n, Eigen::MatrixXd::Zero(n, n)));

  auto first = [&](int k, double s) {
    return ((shifted(k, s, -1, 0.0) - shifted(k, -s, -1, 0.0)) / (2.0 * s))
        .eval();
  };
  auto second = [&](int k, double s) {
    return ((shifted(k, s, -1, 0.0) - 2.0 * probe.g_ +
             shifted(k, -s, -1, 0.0)) /
            (s * s))
        .eval();
  };
  auto mixed = [&](int k, int l, double s) {
    return ((shifted(k, s, l, s) - shifted(k, s, l, -s) -
             shifted(k, -s, l, s) + shifted(k, -s, l, -s)) /
            (4.0 * s * s))
        .eval();
  };

  // Richardson extrapolation of the central differences: the h and h/2
  // stencils combine to cancel the leading error term.
  for (int k = 0; k < n; ++k) {
    probe.dg_[k] = (4.0 * first(k, h / 2.0) - first(k, h)) / 3.0;
    probe.d2g_[k][k] = (4.0 * second(k, h / 2.0) - second(k, h)) / 3.0;
    for (int l = k + 1; l < n; ++l) {
      probe.d2g_[k][l] = (4.0 * mixed(k, l, h / 2.0) - mixed(k, l, h)) / 3.0;
      probe.d2g_[l][k] = probe.d2g_[k][l];
    }
  }
  probe.assemble();
  return probe;
}

void CurvatureProbe::assemble() {
  const int n = n_;
  const Eigen::MatrixXd ginv = inverse_or_throw(g_);

  // T[d](b,c) = d_b g_dc + d_c g_db - d_d g_bc
  auto tsym = [&](int d, int b, int c) {
    return dg_[b](d, c) + dg_[c](d, b) - dg_[d](b, c);
  };
  // dT[k][d](b,c): the same with one more derivative.
  auto dtsym = [&](int k, int d, int b, int c) {
    return d2g_[k][b](d, c) + d2g_[k][c](d, b) - d2g_[k][d](b, c);
  };

  const std::vector<Eigen::MatrixXd> gamma = gamma_from(ginv, dg_);

  std::vector<Eigen::MatrixXd> dginv(n);
  for (int k = 0; k < n; ++k) dginv[k] = -ginv * dg_[k] * ginv;

  // dgamma[k][a](b,c) = d_k Gamma^a_{bc}
  std::vector<std::vector<Eigen::MatrixXd>> dgamma(
      n, std::vector<Eigen::MatrixXd>(n));
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a) {
      dgamma[k][a] = Eigen::MatrixXd::Zero(n, n);
      for (int b = 0; b < n; ++b)
        for (int c = b; c < n; ++c) {
          double acc = 0.0;
          for (int d = 0; d < n; ++d)
            acc += dginv[k](a, d) * tsym(d, b, c) +
                   ginv(a, d) * dtsym(k, d, b, c);
          dgamma[k][a](b, c) = 0.5 * acc;
          dgamma[k][a](c, b) = dgamma[k][a](b, c);
        }
    }

  // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
  //           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb},
  // lowered with g. On the unit round sphere this gives R_{1212} = +1 at
  // the chart origin, so sectional curvature carries the usual sign.
  rlow_.assign(static_cast<size_t>(n) * n * n * n, 0.0);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d) {
        Eigen::VectorXd rup(n);
        for (int a = 0; a < n; ++a) {
          double acc = dgamma[c][a](d, b) - dgamma[d][a](c, b);
          for (int e = 0; e < n; ++e)
            acc += gamma[a](c, e) * gamma[e](d, b) -
                   gamma[a](d, e) * gamma[e](c, b);
          rup(a) = acc;
        }
        for (int a = 0; a < n; ++a) {
          double low = 0.0;
          for (int e = 0; e < n; ++e) low += g_(a, e) * rup(e);
          rlow_[((static_cast<size_t>(a) * n + b) * n + c) * n + d] = low;
        }
      }
}

double CurvatureProbe::sectional(const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& v) const {
  if (u.size() != n_ || v.size() != n_)
    throw std::invalid_argument("plane vectors have the wrong dimension");
  const double uu = u.dot(g_ * u);
  const double vv = v.dot(g_ * v);
  const double uv = u.dot(g_ * v);
  const double gram = uu * vv - uv * uv;
  if (!(gram > 1e-12 * std::max(uu * vv, 1e-300)))
    throw std::invalid_argument("plane is degenerate");

  double num = 0.0;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) {
      if (u(a) == 0.0 || v(b) == 0.0) continue;
      for (int c = 0; c < n_; ++c)
        for (int d = 0; d < n_; ++d)
          num += rlow(a, b, c, d) * u(a) * v(b) * u(c) * v(d);
    }
  return num / gram;
}

double sectional_curvature(const Metric& g, const Eigen::VectorXd& p,
                           const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
  return CurvatureProbe(g, p).sectional(u, v);
}

double sectional_curvature_fd(const Metric& g, const Eigen::VectorXd& p,
                              const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v, double h) {
  return CurvatureProbe::finite_difference(g, p, h).sectional(u, v);
}

double warp_oracle_curvature(const Profile& f, double t) {
  const Jet ft = f(Jet::variable(t, 0, 1));
  if (!(ft.v > 0.0))
    throw std::invalid_argument("warp profile must be positive");
  const double second = ft.h.size() > 0 ? ft.h(0, 0) : 0.0;
  return -second / ft.v;
}

// --------------------------------------------------------------------------
// Ball closeness verdicts

BallCloseVerdict is_ball_eps_close(const RadialPtr& g, double a, double eps,
                                   double xi, const ChartSchedule& schedule) {
  if (!g) throw std::invalid_argument("metric is null");
  if (!(a > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const int ldim = g->link_dim();
  if (schedule.dir_lo.size() != ldim || schedule.dir_hi.size() != ldim)
    throw std::invalid_argument("direction box does not match the link");
  if (schedule.directions < 1)
    throw std::invalid_argument("need at least one direction");

  const std::vector<Eigen::VectorXd> dirs =
      low_discrepancy_box(schedule.directions, schedule.dir_lo,
                          schedule.dir_hi);

  BallCloseVerdict verdict;

  // (1) The metric must be exactly the warped form sinh^2(t) ghat + dt^2 on
  // the ball, with ghat recovered from the cut at radius a.
  const MetricPtr cut = spherical_cut(g, a);
  for (const Eigen::VectorXd& u : dirs) {
    JetVec uj(ldim);
    for (int i = 0; i < ldim; ++i) uj[i] = Jet(u(i));
    const Eigen::MatrixXd ghat = metric_values(*cut, u);
    for (double t : axis_values(std::max(0.05, 0.05 * a), a, 10)) {
      const Eigen::MatrixXd gt = g->link_components(uj, Jet(t)).values();
      const Eigen::MatrixXd ref = std::sinh(t) * std::sinh(t) * ghat;
      const double dev = (gt - ref).cwiseAbs().maxCoeff() /
                         (1.0 + ref.cwiseAbs().maxCoeff());
      verdict.inside_deviation = std::max(verdict.inside_deviation, dev);
    }
  }
  verdict.warped_inside = verdict.inside_deviation <= 1e-9;

  // (2) Every scheduled chart outside the ball must be eps-close to the
  // model in C^2. Charts that would dip below the cone tip are skipped.
  verdict.worst_center = Eigen::VectorXd::Zero(ldim + 1);
  for (double s = schedule.s_min; s <= schedule.s_max + 1e-9; s += 0.5) {
    if (s - (1.0 + xi) <= 1e-6) continue;
    for (const Eigen::VectorXd& u0 : dirs) {
      const ModelChart chart = radial_normal_chart(g, u0, s, xi);
      const double dev = c2_deviation(*g, chart, 7);
      ++verdict.charts_checked;
      if (dev > verdict.worst_deviation) {
        verdict.worst_deviation = dev;
        verdict.worst_center.head(ldim) = u0;
        verdict.worst_center(ldim) = s;
      }
    }
  }

  verdict.pass = verdict.warped_inside && verdict.charts_checked > 0 &&
                 verdict.worst_deviation <= eps;
  return verdict;
}

// --------------------------------------------------------------------------
// Pinch reports

PinchReport pinch_report(
    const Metric& g, const std::function<Eigen::VectorXd(Sampler&)>& draw,
    int samples, int planes_per_point, std::uint64_t seed,
    const std::function<std::string(const Eigen::VectorXd&)>& classify) {
  if (!draw) throw std::invalid_argument("point sampler is null");
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  if (planes_per_point < 1)
    throw std::invalid_argument("need at least one plane per point");

  const int n = g.dim();
  struct Item {
    double k;
    std::string region;
  };
  std::vector<std::vector<Item>> per_chunk(kSampleChunks);
  std::vector<std::exception_ptr> failures(kSampleChunks);

  run_chunked(samples, seed, [&](int chunk, long long count, uint64_t cs) {
    try {
      Sampler smp(cs);
      auto& out = per_chunk[chunk];
      out.reserve(static_cast<size_t>(count) * planes_per_point);
      for (long long i = 0; i < count; ++i) {
        const Eigen::VectorXd p = draw(smp);
        const std::string region = classify ? classify(p) : "all";
        const CurvatureProbe probe(g, p);
        for (int j = 0; j < planes_per_point; ++j) {
          Eigen::VectorXd u(n), v(n);
          do {
            for (int k = 0; k < n; ++k) u(k) = smp.gaussian();
          } while (u.norm() < 1e-8);
          for (;;) {
            for (int k = 0; k < n; ++k) v(k) = smp.gaussian();
            v -= u * (u.dot(v) / u.squaredNorm());
            if (v.norm() > 1e-6) break;
          }
          out.push_back({probe.sectional(u, v), region});
        }
      }
    } catch (...) {
      failures[chunk] = std::current_exception();
    }
  });
  for (const std::exception_ptr& e : failures)
    if (e) std::rethrow_exception(e);

  PinchReport report;
  report.samples = samples;
  report.planes_per_point = planes_per_point;
  report.seed = seed;
  report.min_k = std::numeric_limits<double>::infinity();
  report.max_k = -std::numeric_limits<double>::infinity();

  std::vector<double> ks;
  ks.reserve(static_cast<size_t>(samples) * planes_per_point);
  for (const auto& chunk : per_chunk)
    for (const Item& item : chunk) {
      ks.push_back(item.k);
      report.min_k = std::min(report.min_k, item.k);
      report.max_k = std::max(report.max_k, item.k);
      report.max_abs_k_plus_1 =
          std::max(report.max_abs_k_plus_1, std::abs(item.k + 1.0));
      auto [it, fresh] = report.regions.try_emplace(item.region);
      RegionStat& stat = it->second;
      if (fresh) {
        stat.min_k = item.k;
        stat.max_k = item.k;
      }
      ++stat.count;
      stat.min_k = std::min(stat.min_k, item.k);
      stat.max_k = std::max(stat.max_k, item.k);
    }

  constexpr int kBins = 20;
  report.histogram.assign(kBins, 0);
  const double width = report.max_k - report.min_k;
  for (double k : ks) {
    int bin = 0;
    if (width > 0.0)
      bin = std::min(kBins - 1,
                     static_cast<int>((k - report.min_k) / width * kBins));
    ++report.histogram[bin];
  }
  return report;
}

}  // namespace conesmith
