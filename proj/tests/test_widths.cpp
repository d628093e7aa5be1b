#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <random>

#include "conesmith/sampling.hpp"
#include "conesmith/widths.hpp"

using namespace conesmith;

TEST_CASE("width formula and the minus-one convention") {
  WidthSet b = WidthSet::natural(0.1);
  CHECK_THAT(width(b, 0), Catch::Matchers::WithinAbs(std::asin(0.1), 1e-16));
  WidthSet b2 = WidthSet::scaled(0.1, 2.0);
  CHECK_THAT(width(b2, 1), Catch::Matchers::WithinAbs(std::asin(0.02), 1e-16));
  CHECK(width(b, -1) == M_PI / 2.0);
  CHECK(width(b2, -1) == M_PI / 2.0);
  CHECK(width_sine(b2, -1) == 1.0);
  CHECK_THROWS_AS(width(b, -2), std::invalid_argument);
}

TEST_CASE("widths decrease and stay in the open quarter-turn range") {
  for (WidthSet W : {WidthSet::natural(0.3), WidthSet::scaled(0.2, 3.0),
                     WidthSet::scaled(0.7, 1.2)}) {
    double prev = M_PI / 2.0;
    for (int i = 0; i <= 10; ++i) {
      const double w = width(W, i);
      CHECK(w > 0.0);
      CHECK(w < prev);
      prev = w;
    }
  }
}

TEST_CASE("algebraic disjointness accepts and rejects the textbook cases") {
  // natural set against itself: every ratio equals the base ratio
  DnpCheck same = check_dnp(WidthSet::natural(0.1), WidthSet::natural(0.1));
  CHECK(same.ok);
  CHECK_THAT(same.ratio, Catch::Matchers::WithinAbs(0.1, 1e-15));

  // base ratio too large: fails already at the vertex level
  DnpCheck big = check_dnp(WidthSet::natural(0.8), WidthSet::natural(0.8));
  CHECK_FALSE(big.ok);
  CHECK(big.witness == 0);
  CHECK_THAT(big.ratio, Catch::Matchers::WithinAbs(0.8, 1e-15));

  // scaled pair within both the k = 0 and the k >= 1 bounds
  DnpCheck pair =
      check_dnp(WidthSet::scaled(0.3, 1.5), WidthSet::scaled(0.3, 2.0));
  CHECK(pair.ok);
  CHECK_THAT(pair.ratio, Catch::Matchers::WithinAbs(0.45, 1e-15));

  // first failure strictly above the vertex level
  DnpCheck k1 = check_dnp(WidthSet::natural(0.5), WidthSet::natural(0.2));
  CHECK_FALSE(k1.ok);
  CHECK(k1.witness == 1);
  CHECK_THAT(k1.ratio, Catch::Matchers::WithinAbs(0.25 / 0.2, 1e-15));

  // growing ratios violate the bound at an interior index
  DnpCheck k2 = check_dnp(WidthSet::natural(0.5), WidthSet::natural(0.4));
  CHECK_FALSE(k2.ok);
  CHECK(k2.witness == 2);
  CHECK_THAT(k2.ratio,
             Catch::Matchers::WithinAbs(0.5 * 0.5 * 0.5 / (0.4 * 0.4), 1e-15));

  CHECK_THROWS_AS(check_dnp(WidthSet::scaled(0.5, 2.5), WidthSet::natural(0.5)),
                  std::invalid_argument);
}

TEST_CASE("for same-ratio pairs the vertex level dominates") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> usigma(0.05, 0.9), uc(1.0, 1.8);
  for (int trial = 0; trial < 200; ++trial) {
    const double sigma = usigma(rng);
    double cb = uc(rng), ca = uc(rng);
    if (cb * sigma >= 1.0 || ca * sigma >= 1.0) continue;
    DnpCheck d = check_dnp(WidthSet::scaled(sigma, cb),
                           WidthSet::scaled(sigma, ca));
    CHECK(d.ok == (cb * sigma <= kHalfRootTwo));
    if (!d.ok) CHECK(d.witness == 0);
  }
}

TEST_CASE("induced width sets reproduce the natural family") {
  WidthSet ind = induced_widths(WidthSet::scaled(0.2, 2.0), 0);
  CHECK_THAT(width_sine(ind, 0), Catch::Matchers::WithinAbs(0.2, 1e-15));
  CHECK(ind.c == 1.0);
  CHECK_THAT(width_sine(induced_widths(WidthSet::scaled(0.1, 3.0), 1), 0),
             Catch::Matchers::WithinAbs(0.1, 1e-15));

  // the defining relation: sin(induced_l) = sin(beta_{k+l+1}) / sin(beta_k)
  WidthSet B = WidthSet::scaled(0.3, 1.7);
  for (int k = 0; k <= 2; ++k) {
    WidthSet I = induced_widths(B, k);
    for (int l = 0; l <= 4; ++l)
      CHECK_THAT(width_sine(I, l),
                 Catch::Matchers::WithinRel(
                     width_sine(B, k + l + 1) / width_sine(B, k), 1e-12));
  }

  // nesting: inducing twice equals inducing once at the combined dimension
  for (int j = 0; j <= 2; ++j)
    for (int l = 0; l <= 2; ++l) {
      WidthSet twice = induced_widths(induced_widths(B, j), l);
      WidthSet once = induced_widths(B, j + l + 1);
      CHECK(twice.sigma == once.sigma);
      CHECK(twice.c == once.c);
    }
}

TEST_CASE("brute-force disjointness agrees on the easy verdicts") {
  AllRightComplex P = AllRightComplex::canonical_sphere(2);

  BruteVerdict pass = dnp_brute_check(P, WidthSet::natural(0.1),
                                      WidthSet::natural(0.1), 10000, 7);
  CHECK(pass.ok);
  CHECK(pass.samples == 10000);
  CHECK(pass.seed == 7);

  BruteVerdict fail = dnp_brute_check(P, WidthSet::natural(0.9),
                                      WidthSet::natural(0.9), 10000, 7);
  REQUIRE_FALSE(fail.ok);
  REQUIRE(fail.counterexample.has_value());
  const DnpCounterexample& ce = *fail.counterexample;
  CHECK(ce.k == 0);
  CHECK(ce.simplex_a != ce.simplex_b);
  validate_point(P, ce.x);
  // the counterexample point really is close to both simplices
  auto da = star_local_distance(P, ce.x, ce.simplex_a);
  auto db = star_local_distance(P, ce.x, ce.simplex_b);
  REQUIRE(da.has_value());
  REQUIRE(db.has_value());
  CHECK(*da <= width(WidthSet::natural(0.9), ce.k));
  CHECK(*db <= width(WidthSet::natural(0.9), ce.k));

  AllRightComplex C = AllRightComplex::circle_complex(5);
  CHECK(dnp_brute_check(C, WidthSet::natural(0.5), WidthSet::natural(0.5),
                        5000, 11)
            .ok);
  CHECK_FALSE(dnp_brute_check(C, WidthSet::natural(0.8),
                              WidthSet::natural(0.8), 5000, 11)
                  .ok);
}

TEST_CASE("brute verdicts are reproducible across thread counts") {
  AllRightComplex P = AllRightComplex::canonical_sphere(2);
  WidthSet B = WidthSet::natural(0.75);

  setenv("CONESMITH_THREADS", "1", 1);
  BruteVerdict serial = dnp_brute_check(P, B, B, 4000, 99);
  setenv("CONESMITH_THREADS", "7", 1);
  BruteVerdict threaded = dnp_brute_check(P, B, B, 4000, 99);
  unsetenv("CONESMITH_THREADS");

  CHECK(serial.ok == threaded.ok);
  REQUIRE(serial.counterexample.has_value());
  REQUIRE(threaded.counterexample.has_value());
  CHECK(serial.counterexample->k == threaded.counterexample->k);
  CHECK(serial.counterexample->simplex_a == threaded.counterexample->simplex_a);
  CHECK(serial.counterexample->x.simplex == threaded.counterexample->x.simplex);
  CHECK(serial.counterexample->x.dir == threaded.counterexample->x.dir);
}

TEST_CASE("algebraic and brute-force disjointness agree on spheres") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> usigma(0.1, 0.85), uc(1.0, 1.6);
  std::vector<AllRightComplex> spheres;
  spheres.push_back(AllRightComplex::canonical_sphere(2));
  spheres.push_back(AllRightComplex::canonical_sphere(3));

  int tested = 0;
  for (int trial = 0; trial < 200 && tested < 50; ++trial) {
    const double sigma = usigma(rng);
    const double cb = uc(rng), ca = uc(rng);
    if (cb * sigma >= 0.98 || ca * sigma >= 0.98) continue;
    WidthSet B = WidthSet::scaled(sigma, cb), A = WidthSet::scaled(sigma, ca);
    DnpCheck algebraic = check_dnp(B, A);
    // skip the blurry band around the threshold where sampling may miss
    if (!algebraic.ok && algebraic.ratio <= kHalfRootTwo + 0.05) continue;
    ++tested;
    for (const AllRightComplex& P : spheres) {
      BruteVerdict brute = dnp_brute_check(
          P, B, A, 10000, 1000 + static_cast<uint64_t>(trial));
      if (algebraic.ok) {
        CHECK(brute.ok);
      } else {
        CHECK_FALSE(brute.ok);
      }
    }
  }
  CHECK(tested == 50);
}

TEST_CASE("beta neighborhoods of simplices stay inside scaled alpha "
          "neighborhoods") {
  // two simplices within beta and gamma of a point pin its distance to
  // their common face, provided both sine ratios clear the bound
  AllRightComplex S = AllRightComplex::suspension(
      AllRightComplex::circle_complex(5));
  const double alpha = 0.4;
  const double beta = std::asin(std::sin(alpha) * 0.65);
  const double gamma = std::asin(std::sin(alpha) * 0.7);

  Sampler sampler(31);
  for (int i = 0; i < 4000; ++i) {
    SimplexPoint x = sampler.point(S);
    std::map<int, double> dist = star_distances(S, x);
    for (int a = 0; a < S.simplex_count(); ++a) {
      auto ita = dist.find(a);
      if (ita == dist.end() || ita->second > beta) continue;
      for (int b = 0; b < S.simplex_count(); ++b) {
        if (b == a) continue;
        auto itb = dist.find(b);
        if (itb == dist.end() || itb->second > gamma) continue;
        const int common = S.intersect(a, b);
        if (common < 0) continue;
        auto itc = dist.find(common);
        REQUIRE(itc != dist.end());
        CHECK(itc->second <= alpha + 1e-12);
      }
    }
  }
}

TEST_CASE("disjoint width pairs protect overlaps through the skeleton") {
  // whenever the algebraic test passes, a point near two incomparable
  // simplices of any dimensions is always near the lower skeleton
  std::vector<AllRightComplex> cases;
  cases.push_back(AllRightComplex::canonical_sphere(2));
  cases.push_back(AllRightComplex::suspension(
      AllRightComplex::circle_complex(5)));
  WidthSet B = WidthSet::natural(0.5);
  REQUIRE(check_dnp(B, B).ok);

  Sampler sampler(77);
  for (const AllRightComplex& P : cases) {
    const int m = P.dim();
    for (int i = 0; i < 4000; ++i) {
      SimplexPoint x = sampler.point(P);
      std::map<int, double> dist = star_distances(P, x);
      for (const auto& [a, da] : dist) {
        const int k = P.simplex_dim(a);
        if (k >= m || da > width(B, k)) continue;
        for (const auto& [b, db] : dist) {
          const int l = P.simplex_dim(b);
          if (l >= m || l < k || (l == k && b <= a)) continue;
          if (db > width(B, l)) continue;
          if (P.is_face(a, b) || P.is_face(b, a)) continue;
          bool protected_by_skeleton = false;
          for (const auto& [c, dc] : dist) {
            const int j = P.simplex_dim(c);
            if (j < k && dc <= width(B, j)) {
              protected_by_skeleton = true;
              break;
            }
          }
          CHECK(protected_by_skeleton);
        }
      }
    }
  }
}
