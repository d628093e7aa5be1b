#include "conesmith/jet.hpp"

namespace conesmith {

namespace {
// Sum of derivative payloads where either side may be the empty
// (identically zero) representation.
Eigen::VectorXd add_grad(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  return a + b;
}
Eigen::MatrixXd add_hess(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  return a + b;
}
Eigen::MatrixXd outer_sym(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          double w) {
  // w * (a b^T + b a^T), empty-aware.
  if (a.size() == 0 || b.size() == 0 || w == 0.0) return {};
  return w * (a * b.transpose() + b * a.transpose());
}
}  // namespace

Jet chain(const Jet& a, double f, double fp, double fpp) {
  Jet r(f);
  if (!a.constant()) {
    r.d = fp * a.d;
    Eigen::MatrixXd h = fpp * (a.d * a.d.transpose());
    if (a.h.size() != 0) h += fp * a.h;
    r.h = std::move(h);
  }
  return r;
}

Jet binary_chain(const Jet& a, const Jet& b, double f, double fa, double fb,
                 double faa, double fab, double fbb) {
  detail::require_compatible(a, b);
  Jet r(f);
  if (a.constant() && b.constant()) return r;
  Eigen::VectorXd g;
  if (!a.constant()) g = fa * a.d;
  if (!b.constant()) g = add_grad(g, Eigen::VectorXd(fb * b.d));
  Eigen::MatrixXd h;
  if (!a.constant()) {
    h = faa * (a.d * a.d.transpose());
    if (a.h.size() != 0) h += fa * a.h;
  }
  if (!b.constant()) {
    h = add_hess(h, Eigen::MatrixXd(fbb * (b.d * b.d.transpose())));
    if (b.h.size() != 0) h = add_hess(h, Eigen::MatrixXd(fb * b.h));
  }
  if (!a.constant() && !b.constant())
    h = add_hess(h, outer_sym(a.d, b.d, fab));
  r.d = std::move(g);
  r.h = std::move(h);
  return r;
}

Jet operator+(const Jet& a, const Jet& b) {
  detail::require_compatible(a, b);
  Jet r(a.v + b.v);
  r.d = add_grad(a.d, b.d);
  r.h = add_hess(a.h, b.h);
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  detail::require_compatible(a, b);
  Jet r(a.v - b.v);
  if (b.constant()) {
    r.d = a.d;
    r.h = a.h;
  } else if (a.constant()) {
    r.d = -b.d;
    r.h = (b.h.size() != 0) ? Eigen::MatrixXd(-b.h) : Eigen::MatrixXd();
  } else {
    r.d = a.d - b.d;
    r.h = add_hess(a.h, Eigen::MatrixXd(-b.h));
  }
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  return binary_chain(a, b, a.v * b.v, b.v, a.v, 0.0, 1.0, 0.0);
}

Jet operator/(const Jet& a, const Jet& b) {
  const double bv = b.v, iv = 1.0 / bv;
  return binary_chain(a, b, a.v * iv, iv, -a.v * iv * iv, 0.0, -iv * iv,
                      2.0 * a.v * iv * iv * iv);
}

Jet operator-(const Jet& a) {
  Jet r(-a.v);
  if (!a.constant()) {
    r.d = -a.d;
    if (a.h.size() != 0) r.h = -a.h;
  }
  return r;
}

Jet operator*(const Jet& a, double c) {
  Jet r(a.v * c);
  if (!a.constant()) {
    r.d = c * a.d;
    if (a.h.size() != 0) r.h = c * a.h;
  }
  return r;
}

Jet operator/(double c, const Jet& a) {
  const double iv = 1.0 / a.v;
  return chain(a, c * iv, -c * iv * iv, 2.0 * c * iv * iv * iv);
}

Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
Jet log(const Jet& a) {
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
Jet tan(const Jet& a) {
  const double t = std::tan(a.v), s = 1.0 + t * t;
  return chain(a, t, s, 2.0 * t * s);
}
Jet asin(const Jet& a) {
  const double u = 1.0 - a.v * a.v, ru = std::sqrt(u);
  return chain(a, std::asin(a.v), 1.0 / ru, a.v / (u * ru));
}
Jet acos(const Jet& a) {
  const double u = 1.0 - a.v * a.v, ru = std::sqrt(u);
  return chain(a, std::acos(a.v), -1.0 / ru, -a.v / (u * ru));
}
Jet atan(const Jet& a) {
  const double u = 1.0 + a.v * a.v;
  return chain(a, std::atan(a.v), 1.0 / u, -2.0 * a.v / (u * u));
}
Jet sinh(const Jet& a) { return chain(a, std::sinh(a.v), std::cosh(a.v), std::sinh(a.v)); }
Jet cosh(const Jet& a) { return chain(a, std::cosh(a.v), std::sinh(a.v), std::cosh(a.v)); }
Jet tanh(const Jet& a) {
  const double t = std::tanh(a.v), s = 1.0 - t * t;
  return chain(a, t, s, -2.0 * t * s);
}
Jet asinh(const Jet& a) {
  const double u = 1.0 + a.v * a.v, ru = std::sqrt(u);
  return chain(a, std::asinh(a.v), 1.0 / ru, -a.v / (u * ru));
}
Jet acosh(const Jet& a) {
  const double u = a.v * a.v - 1.0, ru = std::sqrt(u);
  return chain(a, std::acosh(a.v), 1.0 / ru, -a.v / (u * ru));
}
Jet atanh(const Jet& a) {
  const double u = 1.0 - a.v * a.v;
  return chain(a, std::atanh(a.v), 1.0 / u, 2.0 * a.v / (u * u));
}

Jet atan2(const Jet& y, const Jet& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  const double fy = x.v / r2, fx = -y.v / r2;
  const double fyy = -2.0 * x.v * y.v / (r2 * r2);
  const double fyx = (y.v * y.v - x.v * x.v) / (r2 * r2);
  const double fxx = 2.0 * x.v * y.v / (r2 * r2);
  return binary_chain(y, x, std::atan2(y.v, x.v), fy, fx, fyy, fyx, fxx);
}

Jet pow_int(const Jet& a, int n) {
  if (n == 0) return Jet(1.0);
  if (n < 0) return 1.0 / pow_int(a, -n);
  Jet r = a;
  for (int i = 1; i < n; ++i) r = r * a;
  return r;
}

Jet dot(const JetVec& a, const JetVec& b) {
  Jet s(0.0);
  for (size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

Jet norm(const JetVec& a) { return sqrt(dot(a, a)); }

JetMatrix JetMatrix::identity(int n) {
  JetMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Jet(1.0);
  return m;
}

JetMatrix& JetMatrix::operator+=(const JetMatrix& o) {
  for (size_t i = 0; i < a_.size(); ++i) a_[i] = a_[i] + o.a_[i];
  return *this;
}

JetMatrix operator*(const Jet& s, JetMatrix m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = s * m(i, j);
  return m;
}

Eigen::MatrixXd JetMatrix::values() const {
  Eigen::MatrixXd v(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) v(i, j) = (*this)(i, j).v;
  return v;
}

void set_block(JetMatrix& into, int at, const JetMatrix& block) {
  for (int i = 0; i < block.rows(); ++i)
    for (int j = 0; j < block.cols(); ++j) into(at + i, at + j) = block(i, j);
}

}  // namespace conesmith
