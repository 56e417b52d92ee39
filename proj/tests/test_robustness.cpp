#include <gtest/gtest.h>

#include <cmath>

#include "delone/errors.hpp"
#include "delone/robustness.hpp"
#include "oracle.hpp"

using namespace delone;

TEST(RobustnessOf, Examples) {
  const auto r = robustness_of({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(r.rho, 1.0);
  ASSERT_EQ(r.per_prefix_distance.size(), 2u);
  EXPECT_NEAR(robustness_of({{0, 0}, {1, 1}, {2, 2}}).rho, 0.0, 1e-15);
}

TEST(RobustnessOf, MatchesLeastSquaresOracle) {
  Rng rng(31);
  for (std::size_t n = 2; n <= 4; ++n)
    for (int t = 0; t < 300; ++t) {
      std::vector<Vector> pts;
      for (std::size_t i = 0; i <= n; ++i) pts.push_back(oracle::random_vector(rng, n));
      double want = 1e300;
      for (std::size_t k = 0; k < n; ++k)
        want = std::min(want, oracle::affine_distance(pts[k + 1], std::vector<Vector>(pts.begin(), pts.begin() + k + 1)));
      EXPECT_NEAR(robustness_of(pts).rho, want, 1e-8);
    }
}

TEST(RobustnessOf, PrefixOrderSensitive) {
  const std::vector<Vector> a = {{0, 0}, {1, 0}, {0.5, 0.1}};
  const std::vector<Vector> b = {{0.5, 0.1}, {0, 0}, {1, 0}};
  EXPECT_NE(robustness_of(a).rho, robustness_of(b).rho);
}

TEST(RhoRecursion, NormalizedValues) {
  const double rho0 = 3.0, eps = 0.01;
  EXPECT_DOUBLE_EQ(rho_m_recursion(rho0, eps, 1, 2, 1), rho0 - 2 * eps);
  EXPECT_DOUBLE_EQ(delta_m(rho0, eps, 1, 2, 2), 50.0);
  EXPECT_DOUBLE_EQ(rho_m_recursion(rho0, eps, 1, 2, 2), rho0 - 50 * eps);
}

TEST(RhoRecursion, ZeroEpsIsIdentity) {
  for (int m = 1; m <= 6; ++m) EXPECT_EQ(rho_m_recursion(0.7, 0.0, 1, 2, m), 0.7);
}

TEST(RhoRecursion, ThirdStepByHand) {
  // delta_3 = 2 + 4 e4/e1 + 2 (1 + delta_2) e4/rho_2, e4 = 12, rho_2 = rho0 - 50 eps.
  const double rho0 = 5.0, eps = 0.001;
  const double rho2 = rho0 - 50 * eps;
  const double d3 = 2 + 48 + 2 * 51 * 12 / rho2;
  EXPECT_NEAR(delta_m(rho0, eps, 1, 2, 3), d3, 1e-12 * d3);
  EXPECT_NEAR(rho_m_recursion(rho0, eps, 1, 2, 3), rho0 - eps * d3, 1e-12);
}

TEST(RhoRecursion, ScaleInvariant) {
  Rng rng(32);
  for (int t = 0; t < 200; ++t) {
    const double s = rng.uniform(0.1, 10);
    const double rho0 = rng.uniform(1, 5), eps = rng.uniform(0, 1e-6);
    for (int m = 1; m <= 4; ++m) {
      const double a = rho_m_recursion(s * rho0, s * eps, s, 2 * s, m);
      const double b = s * rho_m_recursion(rho0, eps, 1, 2, m);
      EXPECT_NEAR(a, b, 1e-12 * std::abs(b));
    }
  }
}

TEST(RhoRecursion, MonotoneChain) {
  const auto chain = rho_chain(2.0, 1e-6, 1, 2, 5);
  ASSERT_EQ(chain.size(), 6u);
  for (std::size_t k = 1; k < chain.size(); ++k) EXPECT_LT(chain[k], chain[k - 1]);
}

TEST(RhoRecursion, InvalidBudgets) {
  EXPECT_THROW(rho_m_recursion(1, 0.01, 2, 1, 2), InvalidBudget);
  EXPECT_THROW(rho_m_recursion(1, 0.3, 1, 2, 2), InvalidBudget);
  EXPECT_THROW(rho_m_recursion(1, 0.01, 1, 2, 0), InvalidBudget);
  EXPECT_THROW(rho_m_recursion(0.1, 0.01, 1, 2, 2), InvalidBudget);  // rho_2 < 0
}

TEST(RhoRecursion, PerturbationSoundnessSampled) {
  Rng rng(33);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + t % 2;
    std::vector<Vector> pts;
    for (std::size_t i = 0; i <= n; ++i) pts.push_back(oracle::random_vector(rng, n, 0, 1.5));
    bool ok = true;
    for (std::size_t a = 0; a <= n; ++a)
      for (std::size_t b = a + 1; b <= n; ++b)
        if (dist(pts[a], pts[b]) < 0.5 || dist(pts[a], pts[b]) > 2.0) ok = false;
    const double rho0 = robustness_of(pts).rho;
    if (!ok || rho0 < 0.2) continue;
    const double eps = 1e-5;
    const double bound = rho_m_recursion(rho0, eps, 0.5, 1.0, static_cast<int>(n));
    for (int k = 0; k < 20; ++k) {
      std::vector<Vector> q = pts;
      for (auto& p : q) {
        Vector d = oracle::random_vector(rng, n);
        p = axpy(eps * rng.uniform() / std::max(norm(d), 1e-300), d, p);
      }
      EXPECT_GE(robustness_of(q).rho, bound);
    }
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(V2Constant, ClosedFormOracle) {
  // Minimum over sphere-constrained triples at (e1, e2): an isosceles triangle
  // with two sides e1 on the largest sphere; area e1^2 c/(2 e2) with chord c.
  const double e1 = 1, e2 = 2;
  const double c = 2 * e2 * std::sin(2 * std::asin(e1 / (2 * e2)));
  const double want = e1 * e1 * c / (2 * e2);
  const double got = v2_constant(e1, e2);
  EXPECT_LE(got, want);
  EXPECT_NEAR(got / 0.9, want, 2e-3 * want);
}

TEST(V2Constant, Monotone) {
  EXPECT_LE(v2_constant(0.8, 2), v2_constant(1.0, 2) * (1 + 1e-3));
  EXPECT_GE(v2_constant(1.0, 1.5), v2_constant(1.0, 2) * (1 - 1e-3));
}

TEST(V2Constant, Deterministic) { EXPECT_EQ(v2_constant(1, 2, 5), v2_constant(1, 2, 5)); }

TEST(MetricRobustness, FlatReduction) {
  Rng rng(34);
  for (int t = 0; t < 50; ++t) {
    std::vector<Vector> pts;
    for (int i = 0; i < 3; ++i) pts.push_back(oracle::random_vector(rng, 2));
    EXPECT_EQ(metric_robustness(pts, MetricModel::flat(2)), robustness_of(pts).rho);
  }
}

TEST(MetricRobustness, SphereGreatCircleIsZero) {
  const MetricModel m = MetricModel::sphere(1);
  const double a = 0.05;
  const std::vector<Vector> pts = {{1, 0, 0}, {std::cos(a), std::sin(a), 0}, {std::cos(2 * a), std::sin(2 * a), 0}};
  EXPECT_NEAR(metric_robustness(pts, m, 0.2), 0.0, 1e-9);
}

TEST(MetricRobustness, SphereNearLogMapRobustness) {
  const MetricModel m = MetricModel::sphere(1);
  Rng rng(35);
  const Frame f = default_frame(m, {0, 0, 1});
  for (int t = 0; t < 30; ++t) {
    std::vector<Vector> pts, flat;
    for (int i = 0; i < 3; ++i) {
      const Vector a = oracle::random_vector(rng, 2, -0.03, 0.03);
      pts.push_back(exp_frame(m, f, a));
      flat.push_back(a);
    }
    const double s = 0.06;
    EXPECT_NEAR(metric_robustness(pts, m, 0.1), robustness_of(flat).rho, s * s * s);
  }
}

TEST(MetricRobustness, OutOfChart) {
  const MetricModel m = MetricModel::sphere(1);
  EXPECT_THROW(metric_robustness({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}}, m, 0.2), OutOfChart);
}
