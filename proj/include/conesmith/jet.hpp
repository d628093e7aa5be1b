#pragma once

// Second-order forward-mode differentiation scalar.
//
// A Jet carries a value together with its gradient and Hessian with respect
// to a fixed set of chart variables. Seeding the chart coordinates as
// variables and evaluating a metric expression produces every component
// with exact first and second derivatives, which is all the curvature
// assembly needs. Finite differences are kept elsewhere purely as an
// independent oracle.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace conesmith {

struct Jet {
  double v = 0.0;
  // Empty vectors/matrices stand for identically-zero derivatives, so plain
  // constants stay cheap no matter how many variables are in scope.
  Eigen::VectorXd d;
  Eigen::MatrixXd h;

  Jet() = default;
  explicit Jet(double value) : v(value) {}

  int vars() const { return static_cast<int>(d.size()); }
  bool constant() const { return d.size() == 0; }

  static Jet variable(double value, int index, int nvars) {
    Jet j(value);
    j.d = Eigen::VectorXd::Zero(nvars);
    j.d[index] = 1.0;
    // h stays empty: the Hessian of a coordinate is identically zero
    return j;
  }
};

using JetVec = std::vector<Jet>;

namespace detail {
inline void require_compatible(const Jet& a, const Jet& b) {
  if (!a.constant() && !b.constant() && a.vars() != b.vars())
    throw std::logic_error("jet arithmetic on mismatched variable counts");
}
}  // namespace detail

// f(a) with f, f', f'' evaluated at a.v.
Jet chain(const Jet& a, double f, double fp, double fpp);

// F(a, b) with first and second partials of F at (a.v, b.v).
Jet binary_chain(const Jet& a, const Jet& b, double f, double fa, double fb,
                 double faa, double fab, double fbb);

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);

inline Jet operator+(const Jet& a, double c) { Jet r = a; r.v += c; return r; }
inline Jet operator+(double c, const Jet& a) { return a + c; }
inline Jet operator-(const Jet& a, double c) { Jet r = a; r.v -= c; return r; }
inline Jet operator-(double c, const Jet& a) { return -(a - c); }
Jet operator*(const Jet& a, double c);
inline Jet operator*(double c, const Jet& a) { return a * c; }
inline Jet operator/(const Jet& a, double c) { return a * (1.0 / c); }
Jet operator/(double c, const Jet& a);

inline bool operator<(const Jet& a, const Jet& b) { return a.v < b.v; }
inline bool operator>(const Jet& a, const Jet& b) { return a.v > b.v; }
inline bool operator<=(const Jet& a, const Jet& b) { return a.v <= b.v; }
inline bool operator>=(const Jet& a, const Jet& b) { return a.v >= b.v; }
inline bool operator<(const Jet& a, double b) { return a.v < b; }
inline bool operator<(double a, const Jet& b) { return a < b.v; }
inline bool operator>(const Jet& a, double b) { return a.v > b; }
inline bool operator>(double a, const Jet& b) { return a > b.v; }
inline bool operator<=(const Jet& a, double b) { return a.v <= b; }
inline bool operator>=(const Jet& a, double b) { return a.v >= b; }

Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet asin(const Jet& a);
Jet acos(const Jet& a);
Jet atan(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet tanh(const Jet& a);
Jet asinh(const Jet& a);
Jet acosh(const Jet& a);
Jet atanh(const Jet& a);
Jet atan2(const Jet& y, const Jet& x);
Jet pow_int(const Jet& a, int n);
inline Jet sq(const Jet& a) { return a * a; }

// Dot product and norm of jet-valued vectors (used by unit-vector charts).
Jet dot(const JetVec& a, const JetVec& b);
Jet norm(const JetVec& a);

// Small dense matrix of jets. Deliberately dumb: only the handful of
// operations the metric combinators need.
class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Jet& operator()(int i, int j) { return a_[i * cols_ + j]; }
  const Jet& operator()(int i, int j) const { return a_[i * cols_ + j]; }

  static JetMatrix zero(int n) { return JetMatrix(n, n); }
  static JetMatrix identity(int n);

  JetMatrix& operator+=(const JetMatrix& o);
  friend JetMatrix operator+(JetMatrix a, const JetMatrix& b) { return a += b; }
  friend JetMatrix operator*(const Jet& s, JetMatrix m);

  // Values only, derivatives dropped.
  Eigen::MatrixXd values() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Jet> a_;
};

// Places `block` at diagonal offset (at, at) of `into`.
void set_block(JetMatrix& into, int at, const JetMatrix& block);

}  // namespace conesmith
