#include "conesmith/widths.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "conesmith/sampling.hpp"

namespace conesmith {

double width_sine(const WidthSet& W, int i) {
  if (i == -1) return 1.0;
  if (i < -1) throw std::invalid_argument("width index below -1");
  return W.c * std::pow(W.sigma, i + 1);
}

double width(const WidthSet& W, int i) {
  if (i == -1) return M_PI / 2.0;
  const double s = width_sine(W, i);
  if (s <= 0.0 || s > 1.0)
    throw std::invalid_argument("width sine outside (0, 1]");
  return std::asin(s);
}

namespace {

// sin(beta_k) / sin(alpha_{k-1}) for the two geometric families.
double dnp_ratio(const WidthSet& B, const WidthSet& A, int k) {
  return width_sine(B, k) / width_sine(A, k - 1);
}

}  // namespace

DnpCheck check_dnp(const WidthSet& B, const WidthSet& A) {
  if (width_sine(B, 0) >= 1.0 || width_sine(A, 0) >= 1.0)
    throw std::invalid_argument("invalid width set: c * sigma must be < 1");

  DnpCheck result;
  const double r0 = dnp_ratio(B, A, 0);  // = sin(beta_0), alpha_{-1} = pi/2
  if (r0 > kHalfRootTwo) {
    result.ok = false;
    result.witness = 0;
    result.ratio = r0;
    return result;
  }
  // For k >= 1 the ratio is r1 * (B.sigma / A.sigma)^{k-1}.
  const double r1 = dnp_ratio(B, A, 1);
  const double growth = B.sigma / A.sigma;
  if (growth <= 1.0) {
    // largest remaining ratio is at k = 1
    if (r1 > kHalfRootTwo) {
      result.ok = false;
      result.witness = 1;
      result.ratio = r1;
      return result;
    }
    result.ratio = std::max(r0, r1);
    return result;
  }
  // Growing ratios eventually violate the bound; find the smallest k.
  int k = 1;
  double r = r1;
  while (r <= kHalfRootTwo) {
    r *= growth;
    ++k;
  }
  result.ok = false;
  result.witness = k;
  result.ratio = r;
  return result;
}

WidthSet induced_widths(const WidthSet& B, int k) {
  (void)k;  // the induced sines are sigma^{l+1} for every k and scale
  return WidthSet::natural(B.sigma);
}

BruteVerdict dnp_brute_check(const AllRightComplex& P, const WidthSet& B,
                             const WidthSet& A, long long samples,
                             uint64_t seed) {
  BruteVerdict verdict;
  verdict.samples = samples;
  verdict.seed = seed;

  const int m = P.dim();
  std::vector<double> beta(m), alpha(m);
  for (int k = 0; k < m; ++k) {
    beta[k] = width(B, k);
    alpha[k] = width(A, k);
  }

  struct Hit {
    long long index;
    DnpCounterexample ce;
  };
  std::vector<std::optional<Hit>> hits(kSampleChunks);

  run_chunked(samples, seed,
              [&](int chunk, long long count, uint64_t cseed) {
    Sampler sampler(cseed);
    for (long long i = 0; i < count && !hits[chunk]; ++i) {
      const SimplexPoint x = sampler.point(P);
      const std::map<int, double> dist = star_distances(P, x);

      // group the nearby simplices by dimension
      std::vector<std::vector<int>> within(m);
      bool relevant = false;
      for (const auto& [id, d] : dist) {
        const int k = P.simplex_dim(id);
        if (k < m && d <= beta[k]) {
          within[k].push_back(id);
          if (within[k].size() > 1) relevant = true;
        }
      }
      if (!relevant) continue;

      for (int k = 0; k < m; ++k) {
        if (within[k].size() < 2) continue;
        bool protected_by_skeleton = false;
        for (const auto& [id, d] : dist) {
          const int j = P.simplex_dim(id);
          if (j < k && d <= alpha[j]) {
            protected_by_skeleton = true;
            break;
          }
        }
        if (!protected_by_skeleton) {
          Hit hit;
          hit.index = i;
          hit.ce.x = x;
          hit.ce.k = k;
          hit.ce.simplex_a = within[k][0];
          hit.ce.simplex_b = within[k][1];
          hits[chunk] = hit;
          break;
        }
      }
    }
  });

  for (const auto& hit : hits)
    if (hit) {
      verdict.ok = false;
      verdict.counterexample = hit->ce;
      break;
    }
  return verdict;
}

}  // namespace conesmith
