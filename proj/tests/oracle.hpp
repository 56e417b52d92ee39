#pragma once

#include <Eigen/Dense>

#include "delone/linalg.hpp"
#include "delone/rng.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const delone::Matrix& m) {
  Eigen::MatrixXd e(m.size(), m.empty() ? 0 : m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) e(i, j) = m[i][j];
  return e;
}

inline Eigen::VectorXd to_eigen(const delone::Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline delone::Vector from_eigen(const Eigen::VectorXd& v) { return delone::Vector(v.data(), v.data() + v.size()); }

inline delone::Vector random_vector(delone::Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  delone::Vector v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline delone::Matrix random_matrix(delone::Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  delone::Matrix m(n);
  for (auto& row : m) row = random_vector(rng, n, lo, hi);
  return m;
}

/// Circumcenter from the normal equations 2(p_i - p_0).c = |p_i|^2 - |p_0|^2.
inline Eigen::VectorXd circumcenter(const std::vector<delone::Vector>& pts) {
  const Eigen::Index n = static_cast<Eigen::Index>(pts[0].size());
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b(n);
  const Eigen::VectorXd p0 = to_eigen(pts[0]);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd p = to_eigen(pts[i + 1]);
    a.row(i) = 2.0 * (p - p0).transpose();
    b(i) = p.squaredNorm() - p0.squaredNorm();
  }
  return a.fullPivLu().solve(b);
}

/// Distance from q to the affine hull of pts via least squares.
inline double affine_distance(const delone::Vector& q, const std::vector<delone::Vector>& pts) {
  const Eigen::VectorXd base = to_eigen(pts[0]);
  const Eigen::VectorXd d = to_eigen(q) - base;
  if (pts.size() == 1) return d.norm();
  Eigen::MatrixXd a(base.size(), static_cast<Eigen::Index>(pts.size() - 1));
  for (std::size_t k = 1; k < pts.size(); ++k) a.col(static_cast<Eigen::Index>(k - 1)) = to_eigen(pts[k]) - base;
  const Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(d);
  return (a * x - d).norm();
}

inline double inverse_operator_norm(const delone::Matrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  return 1.0 / svd.singularValues().minCoeff();
}

}  // namespace oracle
