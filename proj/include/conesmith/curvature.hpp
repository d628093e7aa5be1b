#pragma once

// Curvature and closeness-to-hyperbolic verification.
//
// Model charts map chart coordinates into a metric's own chart by a
// constant frame plus an optional quadratic correction. Both have vanishing
// third derivatives, so pulled-back components keep exact jet derivatives
// (no third derivatives of a curved transition ever enter).
// Sectional curvature is assembled from metric components and their first
// and second derivatives; the same assembly runs either on analytic jets
// or on Richardson-extrapolated finite differences as an oracle.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "conesmith/metrics.hpp"
#include "conesmith/sampling.hpp"

namespace conesmith {

// --------------------------------------------------------------------------
// Model charts: B^{l-1} x I_xi with reference metric e^{2t} delta + dt^2,
// embedded affinely. The last chart coordinate is t.

struct ModelChart {
  double xi = 2.0;
  Eigen::MatrixXd frame;   // l x l linear part
  Eigen::VectorXd center;  // image of the chart origin
  // Optional quadratic term: coordinate i picks up x^T quad[i] x / 2.
  // Empty means the chart is affine.
  std::vector<Eigen::MatrixXd> quad;

  int dim() const { return static_cast<int>(frame.rows()); }
  Eigen::VectorXd embed(const Eigen::VectorXd& x) const;
  JetVec embed(const JetVec& x) const;
};

// Affine radial chart centered over link point u0 at radius a: the link
// block of the frame is link_frame and the t axis maps to t + a.
ModelChart radial_chart(const Eigen::VectorXd& u0, double a,
                        const Eigen::MatrixXd& link_frame, double xi);

// Radial chart whose link map also carries the second-order normal
// coordinate correction -Gamma(By, By)/2 of the radius-a slice. The
// correction removes the slice's chart Christoffels at the center, so the
// deviation measures geometry rather than how the link chart was drawn.
ModelChart radial_normal_chart(const RadialPtr& g, const Eigen::VectorXd& u0,
                               double a, const Eigen::MatrixXd& link_frame,
                               double xi);
ModelChart radial_normal_chart(const RadialPtr& g, const Eigen::VectorXd& u0,
                               double a, double xi);

// Inverse symmetric square root of the link components at (u0, a): the
// link frame that makes the pulled-back metric the identity at the chart
// center. Any rotation of it is equally admissible.
Eigen::MatrixXd normalizing_link_frame(const RadialMetric& g,
                                       const Eigen::VectorXd& u0, double a);

// Christoffel symbols at p: the returned tensor holds Gamma^a_{bc} at
// [a](b, c).
std::vector<Eigen::MatrixXd> christoffel(const Metric& g,
                                         const Eigen::VectorXd& p);

// Sup over a chart grid of the C^2 magnitude of (pullback of g) minus the
// reference. Each derivative order contributes its Frobenius norm, so the
// result does not depend on which rotation of an admissible frame was
// picked. Throws when the grid leaves the metric's domain.
double c2_deviation(const Metric& g, const ModelChart& chart,
                    int points_per_axis = 9);

// Length in g of the broken chart path from x = (y, t) to the chart
// center: straight down to t = 0 first coordinate-wise in t, then straight
// to y = 0 along the t = 0 slice.
double chart_center_path_length(const Metric& g, const ModelChart& chart,
                                const Eigen::VectorXd& x, int steps = 64);

// --------------------------------------------------------------------------
// Sectional curvature

// Per-point assembly: components and their derivatives are extracted once,
// then any number of planes can be evaluated cheaply.
class CurvatureProbe {
 public:
  CurvatureProbe(const Metric& g, const Eigen::VectorXd& p);
  static CurvatureProbe finite_difference(const Metric& g,
                                          const Eigen::VectorXd& p,
                                          double h = 1e-4);

  double sectional(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  const Eigen::MatrixXd& metric() const { return g_; }

 private:
  CurvatureProbe() = default;
  void assemble();

  int n_ = 0;
  Eigen::MatrixXd g_;
  std::vector<Eigen::MatrixXd> dg_;                // [k](i,j) = d_k g_ij
  std::vector<std::vector<Eigen::MatrixXd>> d2g_;  // [k][l](i,j)
  std::vector<double> rlow_;                       // R_{abcd}, flat
  double rlow(int a, int b, int c, int d) const {
    return rlow_[((a * n_ + b) * n_ + c) * n_ + d];
  }
};

double sectional_curvature(const Metric& g, const Eigen::VectorXd& p,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& v);
double sectional_curvature_fd(const Metric& g, const Eigen::VectorXd& p,
                              const Eigen::VectorXd& u,
                              const Eigen::VectorXd& v, double h = 1e-4);

// K(t) = -f''(t) / f(t): curvature of f(t)^2 dθ² + dt², evaluated without
// any tensor machinery.
double warp_oracle_curvature(const Profile& f, double t);

// --------------------------------------------------------------------------
// Ball closeness verdicts

struct ChartSchedule {
  double s_min = 0.0;      // first chart-center radius
  double s_max = 0.0;      // last one; centers are spaced 0.5 apart
  int directions = 8;      // low-discrepancy link directions per radius
  Eigen::VectorXd dir_lo;  // link chart box the directions are drawn from
  Eigen::VectorXd dir_hi;
};

struct BallCloseVerdict {
  bool pass = false;
  bool warped_inside = false;  // exact warped-hyperbolic form on the ball
  double inside_deviation = 0.0;
  double worst_deviation = 0.0;  // worst chart C^2 deviation outside
  Eigen::VectorXd worst_center;  // (link point, radius) of the worst chart
  int charts_checked = 0;
};

// Checks that g is a warped hyperbolic cone on B_a (minus the tip) and
// that every scheduled radial chart outside is within eps of the model in
// C^2. Chart centers whose image would leave t > 0 are skipped.
BallCloseVerdict is_ball_eps_close(const RadialPtr& g, double a, double eps,
                                   double xi, const ChartSchedule& schedule);

// --------------------------------------------------------------------------
// Pinch reports

struct RegionStat {
  int count = 0;
  double min_k = 0.0;
  double max_k = 0.0;
};

struct PinchReport {
  int samples = 0;
  int planes_per_point = 0;
  std::uint64_t seed = 0;
  double min_k = 0.0;
  double max_k = 0.0;
  double max_abs_k_plus_1 = 0.0;
  std::vector<int> histogram;  // 20 uniform bins over [min_k, max_k]
  std::map<std::string, RegionStat> regions;
};

// Samples points from `draw` and seeded Gaussian planes at each; the
// partition into chunks is fixed, so results do not depend on the worker
// count. `classify` labels each sample's region ("all" when absent).
PinchReport pinch_report(
    const Metric& g, const std::function<Eigen::VectorXd(Sampler&)>& draw,
    int samples, int planes_per_point, std::uint64_t seed,
    const std::function<std::string(const Eigen::VectorXd&)>& classify = {});

}  // namespace conesmith
