#include <gtest/gtest.h>

#include <cmath>

#include "delone/errors.hpp"
#include "delone/linalg.hpp"
#include "oracle.hpp"

using namespace delone;

TEST(Determinant, Identity) { EXPECT_EQ(determinant(identity(2)), 1.0); }

TEST(Determinant, UnitRightSimplexEdgeMatrix) {
  // Edge matrix of (0,0),(1,0),(0,1): |det| = 2! * (1/2).
  const Matrix e = {{1, 0}, {0, 1}};
  EXPECT_DOUBLE_EQ(std::abs(determinant(e)), 2.0 * 0.5);
}

TEST(Determinant, MatchesEigenUpToEight) {
  Rng rng(11);
  for (std::size_t n = 1; n <= 8; ++n)
    for (int t = 0; t < 200; ++t) {
      const Matrix m = oracle::random_matrix(rng, n);
      const double want = oracle::to_eigen(m).determinant();
      EXPECT_NEAR(determinant(m), want, 1e-12 * std::max(1.0, std::abs(want))) << "n=" << n;
    }
}

TEST(Determinant, Multiplicative) {
  Rng rng(12);
  for (std::size_t n = 2; n <= 6; ++n)
    for (int t = 0; t < 200; ++t) {
      const Matrix a = oracle::random_matrix(rng, n), b = oracle::random_matrix(rng, n);
      const double lhs = determinant(mat_mul(a, b)), rhs = determinant(a) * determinant(b);
      EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(Determinant, SingularIsZero) { EXPECT_EQ(determinant({{1, 2}, {2, 4}}), 0.0); }

TEST(Determinant, RejectsNonSquareAndLarge) {
  EXPECT_THROW(determinant({{1, 2}}), std::invalid_argument);
  EXPECT_THROW(determinant(identity(9)), std::invalid_argument);
}

TEST(SolveLinear, IdentityAndDiagonal) {
  EXPECT_EQ(solve_linear(identity(2), {3, 4}), (Vector{3, 4}));
  const Vector x = solve_linear({{2, 0}, {0, 4}}, {2, 4});
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 1.0);
}

TEST(SolveLinear, ResidualAndRoundTrip) {
  Rng rng(13);
  for (std::size_t n = 1; n <= 8; ++n)
    for (int t = 0; t < 200; ++t) {
      Matrix m = oracle::random_matrix(rng, n);
      for (std::size_t i = 0; i < n; ++i) m[i][i] += 3.0;  // diagonally dominant
      const Vector x = oracle::random_vector(rng, n);
      const Vector b = mat_vec(m, x);
      const Vector got = solve_linear(m, b);
      EXPECT_LE(norm(sub(mat_vec(m, got), b)), 1e-10 * norm(b));
      EXPECT_LE(dist(got, x), 1e-10 * std::max(1.0, norm(x)));
      const Eigen::VectorXd ref = oracle::to_eigen(m).partialPivLu().solve(oracle::to_eigen(b));
      EXPECT_LE(dist(got, oracle::from_eigen(ref)), 1e-10 * std::max(1.0, norm(x)));
    }
}

TEST(SolveLinear, DegenerateThrows) {
  EXPECT_THROW(solve_linear({{1, 2}, {2, 4}}, {1, 1}), Degenerate);
  EXPECT_THROW(solve_linear({{1, 0}, {0, 1e-14}}, {1, 1}), Degenerate);
}

TEST(DegeneracyFloor, ScaleRelative) {
  EXPECT_DOUBLE_EQ(degeneracy_floor(identity(3)), 1e-12);
  EXPECT_NEAR(degeneracy_floor({{2, 0}, {0, 1}}), 1e-12 * 4.0, 1e-27);
}

TEST(InverseNormBound, Examples) {
  EXPECT_DOUBLE_EQ(inverse_norm_bound(identity(2), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(inverse_norm_bound({{1, 0}, {0, 0.1}}, 1.0), 20.0);
  EXPECT_THROW(inverse_norm_bound({{1, 1}, {1, 1}}, 1.0), Degenerate);
}

TEST(InverseNormBound, DominatesSvdOracle) {
  Rng rng(14);
  for (std::size_t n = 1; n <= 5; ++n)
    for (int t = 0; t < 1000; ++t) {
      const Matrix m = oracle::random_matrix(rng, n);
      if (std::abs(determinant(m)) < 1e-9) continue;
      EXPECT_GE(inverse_norm_bound(m, max_column_norm(m)) * (1 + 1e-12), oracle::inverse_operator_norm(m));
    }
}

TEST(AffineSpan, Examples) {
  EXPECT_DOUBLE_EQ(distance_to_affine_span({0, 1}, {{0, 0}, {1, 0}}), 1.0);
  EXPECT_EQ(distance_to_affine_span({1, 0}, {{0, 0}, {1, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(distance_to_affine_span({3, 4}, {{0, 0}}), 5.0);
}

TEST(AffineSpan, MatchesLeastSquaresOracle) {
  Rng rng(15);
  for (std::size_t n = 2; n <= 5; ++n)
    for (std::size_t k = 1; k <= n; ++k)
      for (int t = 0; t < 100; ++t) {
        std::vector<Vector> pts;
        for (std::size_t i = 0; i < k; ++i) pts.push_back(oracle::random_vector(rng, n));
        const Vector q = oracle::random_vector(rng, n);
        EXPECT_NEAR(distance_to_affine_span(q, pts), oracle::affine_distance(q, pts), 1e-8);
        const Vector p = project_to_affine_span(q, pts);
        EXPECT_NEAR(distance_to_affine_span(p, pts), 0.0, 1e-10);
      }
}

TEST(AffineSpan, RigidMotionInvariant) {
  Rng rng(16);
  for (int t = 0; t < 200; ++t) {
    const double a = rng.uniform(0, 6.28);
    const Vector shift = oracle::random_vector(rng, 2, -5, 5);
    auto move = [&](const Vector& p) {
      return Vector{std::cos(a) * p[0] - std::sin(a) * p[1] + shift[0], std::sin(a) * p[0] + std::cos(a) * p[1] + shift[1]};
    };
    const std::vector<Vector> pts = {oracle::random_vector(rng, 2), oracle::random_vector(rng, 2)};
    const Vector q = oracle::random_vector(rng, 2);
    EXPECT_NEAR(distance_to_affine_span(q, pts), distance_to_affine_span(move(q), {move(pts[0]), move(pts[1])}), 1e-10);
  }
}
