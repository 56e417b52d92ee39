#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "delone/circumsphere.hpp"
#include "delone/errors.hpp"
#include "delone/robustness.hpp"
#include "oracle.hpp"

using namespace delone;

namespace {

std::vector<Vector> random_simplex(Rng& rng, std::size_t n, double min_det = 1e-3) {
  while (true) {
    std::vector<Vector> pts;
    for (std::size_t i = 0; i <= n; ++i) pts.push_back(oracle::random_vector(rng, n));
    Matrix e(n);
    for (std::size_t k = 0; k < n; ++k) e[k] = sub(pts[k], pts[n]);
    if (std::abs(determinant(e)) > min_det) return pts;
  }
}

}  // namespace

TEST(Circumcenter, RightTriangle) {
  const CircumSphere s = circumcenter({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_NEAR(s.center[0], 0.5, 1e-15);
  EXPECT_NEAR(s.center[1], 0.5, 1e-15);
  EXPECT_NEAR(s.radius, std::sqrt(2.0) / 2, 1e-15);
}

TEST(Circumcenter, UnitTetrahedron) {
  const CircumSphere s = circumcenter({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  for (double c : s.center) EXPECT_NEAR(c, 0.5, 1e-15);
  EXPECT_NEAR(s.radius, std::sqrt(3.0) / 2, 1e-15);
}

TEST(Circumcenter, CollinearIsDegenerate) { EXPECT_THROW(circumcenter({{0, 0}, {1, 0}, {2, 0}}), Degenerate); }

TEST(Circumcenter, MatchesNormalEquationOracle) {
  Rng rng(21);
  for (std::size_t n = 2; n <= 5; ++n)
    for (int t = 0; t < 500; ++t) {
      const auto pts = random_simplex(rng, n);
      const CircumSphere s = circumcenter(pts);
      const Vector want = oracle::from_eigen(oracle::circumcenter(pts));
      EXPECT_LE(dist(s.center, want), 1e-8 * std::max(1.0, s.radius));
      for (const auto& p : pts) EXPECT_LE(std::abs(dist(s.center, p) - s.radius), 1e-9 * s.radius);
    }
}

TEST(Circumcenter, OrderIndependent) {
  Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    auto pts = random_simplex(rng, 3);
    const CircumSphere a = circumcenter(pts);
    std::reverse(pts.begin(), pts.end());
    const CircumSphere b = circumcenter(pts);
    EXPECT_LE(dist(a.center, b.center), 1e-9 * std::max(1.0, a.radius));
  }
}

TEST(Circumcenter, RigidMotionEquivariant) {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    const auto pts = random_simplex(rng, 2);
    const double a = rng.uniform(0, 6.28);
    const Vector shift = oracle::random_vector(rng, 2, -3, 3);
    auto move = [&](const Vector& p) {
      return Vector{std::cos(a) * p[0] - std::sin(a) * p[1] + shift[0], std::sin(a) * p[0] + std::cos(a) * p[1] + shift[1]};
    };
    std::vector<Vector> moved;
    for (const auto& p : pts) moved.push_back(move(p));
    EXPECT_LE(dist(move(circumcenter(pts).center), circumcenter(moved).center), 1e-9 * std::max(1.0, circumcenter(pts).radius));
  }
}

TEST(PerturbationBudget, Validation) {
  EXPECT_NO_THROW(PerturbationBudget::make(1, 2, 0.5, 0.01, 1));
  EXPECT_THROW(PerturbationBudget::make(2, 1, 0.5, 0.01, 1), InvalidBudget);
  EXPECT_THROW(PerturbationBudget::make(1, 2, 0, 0.01, 1), InvalidBudget);
  EXPECT_THROW(PerturbationBudget::make(1, 2, 0.5, 0.01, 0), InvalidBudget);
  PerturbationBudget b = PerturbationBudget::make(1, 2, 0.5, 0.01, 1);
  b.e3 = 5;
  EXPECT_THROW(b.validate(), InvalidBudget);
}

TEST(DisplacementBound, ZeroEps) { EXPECT_EQ(displacement_bound(PerturbationBudget::make(1, 2, 0.5, 0, 1), 2), 0.0); }

TEST(DisplacementBound, DirectEvaluation) {
  // eps{1 + n^{3/2} 2^{n+1} e3^n/delta + 2 n^3 2^{2n} e3^{2n}/delta^2}, n=2, e3=2.01.
  EXPECT_NEAR(displacement_bound(PerturbationBudget::make(1, 2, 0.5, 0.01, 1), 2), 42.70953477973495, 1e-12);
}

TEST(DisplacementBound, ScaleInvariant) {
  for (int n = 2; n <= 4; ++n) {
    const double s = 2.0;
    const auto a = PerturbationBudget::make(1, 2, 0.5, 0.01, 1);
    const auto b = PerturbationBudget::make(s, 2 * s, 0.5 * s, 0.01 * s, std::pow(s, n));
    EXPECT_NEAR(displacement_bound(b, n), s * displacement_bound(a, n), 1e-12 * displacement_bound(b, n));
  }
}

TEST(StabilityRadius, Formula) {
  const auto b = PerturbationBudget::make(1, 2, 0.5, 0.0, 0.3);
  EXPECT_NEAR(stability_radius(b, 3), 0.3 / (16 * std::pow(3, 1.5) * 4), 1e-15);
}

TEST(StabilityRadius, VanishingRobustnessAndPlaneCase) {
  const double v2 = v2_constant(1, 2);
  // delta = V2 rho^{n-2}
  const double small = stability_radius(PerturbationBudget::make(1, 2, 1e-12, 0, v2 * 1e-12), 3);
  EXPECT_LT(small, 1e-12);
  const double a = stability_radius(PerturbationBudget::make(1, 2, 0.1, 0, v2), 2);
  const double b = stability_radius(PerturbationBudget::make(1, 2, 0.9, 0, v2), 2);
  EXPECT_EQ(a, b);
}

TEST(RefineCenter, ExactGuess) {
  const std::vector<Vector> pts = {{0, 0}, {1, 0}, {0, 1}};
  const auto r = refine_center(pts, {0.5, 0.5}, 1e-14);
  EXPECT_LT(r.drift_bound, 1e-12);
  EXPECT_EQ(r.sphere.center, circumcenter(pts).center);
}

TEST(RefineCenter, RightTriangleGuess) {
  const std::vector<Vector> pts = {{0, 0}, {1, 0}, {0, 1}};
  const Vector guess = {0.5, 0.6};
  const auto r = refine_center(pts, guess, 0.12);
  const double drift = dist(guess, r.sphere.center);
  EXPECT_NEAR(drift, 0.1, 1e-12);
  EXPECT_GE(r.drift_bound, drift);
}

TEST(RefineCenter, SampledDriftWithinBound) {
  Rng rng(24);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 2 + t % 2;
    const auto pts = random_simplex(rng, n, 0.05);
    if (robustness_of(pts).rho < 0.05) continue;
    const CircumSphere s = circumcenter(pts);
    const Vector guess = axpy(rng.uniform(0.0, 0.05), oracle::random_vector(rng, n), s.center);
    double lo = 1e300, hi = 0;
    for (const auto& p : pts) lo = std::min(lo, dist(guess, p)), hi = std::max(hi, dist(guess, p));
    const auto r = refine_center(pts, guess, 0.5 * (hi - lo) * 1.01 + 1e-15);
    EXPECT_LE(dist(guess, r.sphere.center), r.drift_bound * (1 + 1e-12));
    EXPECT_LE(dist(r.sphere.center, s.center), 1e-10 * std::max(1.0, s.radius));
  }
}

TEST(EmptySphere, SquareCorners) {
  std::vector<Vector> net = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const CircumSphere s{{0.5, 0.5}, std::sqrt(2.0) / 2};
  EXPECT_TRUE(empty_sphere_test(s, net, {0, 1, 2, 3}, 0.0));
  net.push_back({0.5, 0.5});
  EXPECT_FALSE(empty_sphere_test(s, net, {0, 1, 2, 3}, 0.0));
}

TEST(EmptySphere, SignedMargin) {
  const std::vector<Vector> net = {{0, 0}, {1.05, 0}};
  const CircumSphere s{{0, 0}, 1.0};
  EXPECT_TRUE(empty_sphere_test(s, net, {0}, 0.0));
  EXPECT_TRUE(empty_sphere_test(s, net, {0}, -0.04));
  EXPECT_FALSE(empty_sphere_test(s, net, {0}, -0.06));
}

TEST(EmptySphere, MatchesExhaustiveScan) {
  Rng rng(25);
  for (int t = 0; t < 300; ++t) {
    std::vector<Vector> net;
    for (int i = 0; i < 20; ++i) net.push_back(oracle::random_vector(rng, 2));
    const CircumSphere s{oracle::random_vector(rng, 2), rng.uniform(0.1, 1.0)};
    bool empty = true;
    for (std::size_t i = 2; i < net.size(); ++i)
      if ((oracle::to_eigen(net[i]) - oracle::to_eigen(s.center)).norm() < s.radius) empty = false;
    EXPECT_EQ(empty_sphere_test(s, net, {0, 1}, 0.0), empty);
  }
}
