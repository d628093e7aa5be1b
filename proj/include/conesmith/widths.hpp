#pragma once

// Width calculus for normal neighborhoods of simplices.
//
// A width set assigns to each dimension k an angle beta_k < pi/2, the width
// of the normal neighborhoods of k-simplices. The geometric families used
// here have sin(beta_k) = c * sigma^{k+1}. The central property a pair of
// width sets (B, A) can have is disjointness: beta-neighborhoods of
// different k-simplices meet only inside the alpha-neighborhood of the
// (k-1)-skeleton. The algebraic criterion is sin(beta_k)/sin(alpha_{k-1})
// <= sqrt(2)/2 for every k, with alpha_{-1} = pi/2 by convention.

#include <cstdint>
#include <optional>

#include "conesmith/complexes.hpp"

namespace conesmith {

// Geometric width family: sin(width i) = c * sigma^{i+1}.
struct WidthSet {
  double sigma = 0.0;  // ratio in (0, 1)
  double c = 1.0;      // scale >= 1; valid while c * sigma < 1

  static WidthSet natural(double sigma) { return {sigma, 1.0}; }
  static WidthSet scaled(double sigma, double c) { return {sigma, c}; }
};

// sin of width i; exact product form, no trig roundtrip.
double width_sine(const WidthSet& W, int i);
// arcsin(c * sigma^{i+1}); width(-1) = pi/2 by convention. Throws when the
// sine argument leaves [0, 1].
double width(const WidthSet& W, int i);

inline constexpr double kHalfRootTwo = 0.70710678118654752440;

struct DnpCheck {
  bool ok = true;
  int witness = -1;   // smallest violating k when !ok
  double ratio = 0.0; // the binding ratio: largest when ok, violating when not
};

// Algebraic disjointness test over every k >= 0. The ratios form a
// geometric sequence in k, so the decision needs only k = 0, k = 1, and the
// growth direction, but it covers all k.
DnpCheck check_dnp(const WidthSet& B, const WidthSet& A);

// Width set induced on the linked sphere of a k-simplex:
// sin(induced width l) = sin(beta_{k+l+1}) / sin(beta_k). For this
// parametrized family the result is the natural set of the same ratio,
// independent of k and of the scale.
WidthSet induced_widths(const WidthSet& B, int k);

struct DnpCounterexample {
  SimplexPoint x;
  int k = -1;
  int simplex_a = -1;
  int simplex_b = -1;
};

struct BruteVerdict {
  bool ok = true;
  long long samples = 0;
  uint64_t seed = 0;
  std::optional<DnpCounterexample> counterexample;
};

// Statistical check of the disjointness property on a finite complex: a
// sampled point within beta_k of two different k-simplices must lie within
// alpha_j of some j-simplex, j < k. Deterministic for a fixed seed
// regardless of thread count; reports the violation from the earliest chunk
// and sample.
BruteVerdict dnp_brute_check(const AllRightComplex& P, const WidthSet& B,
                             const WidthSet& A, long long samples,
                             uint64_t seed);

}  // namespace conesmith
