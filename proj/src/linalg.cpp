#include "delone/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "delone/errors.hpp"

namespace delone {

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

double dist(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Vector add(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector sub(const Vector& a, const Vector& b) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector scale(const Vector& a, double s) {
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

Vector axpy(double s, const Vector& x, const Vector& y) {
  Vector r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = s * x[i] + y[i];
  return r;
}

Vector mat_vec(const Matrix& m, const Vector& x) {
  Vector r(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) r[i] = dot(m[i], x);
  return r;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size(), k = b.size(), p = b.empty() ? 0 : b[0].size();
  Matrix r(n, Vector(p, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < p; ++j) r[i][j] += a[i][l] * b[l][j];
  return r;
}

Matrix transpose(const Matrix& m) {
  if (m.empty()) return {};
  Matrix t(m[0].size(), Vector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

Matrix identity(std::size_t n) {
  Matrix m(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

double max_column_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  double best = 0.0;
  for (std::size_t j = 0; j < m[0].size(); ++j) {
    double s = 0.0;
    for (const auto& row : m) s += row[j] * row[j];
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

namespace {

void check_square(const Matrix& m) {
  for (const auto& row : m)
    if (row.size() != m.size()) throw std::invalid_argument("matrix is not square");
  if (m.size() > 8) throw std::invalid_argument("dimension above 8");
}

double cofactor_det(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1.0;
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j] == 0.0) continue;
    Matrix minor(n - 1, Vector(n - 1));
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t c = 0;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) minor[i - 1][c++] = m[i][k];
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    s += sign * m[0][j] * cofactor_det(minor);
  }
  return s;
}

// In-place LU with partial pivoting. Returns false when a zero pivot occurs.
bool lu_decompose(Matrix& a, std::vector<std::size_t>& perm, int& sign) {
  const std::size_t n = a.size();
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (a[p][k] == 0.0) return false;
    if (p != k) {
      std::swap(a[p], a[k]);
      std::swap(perm[p], perm[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a[i][k] /= a[k][k];
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= a[i][k] * a[k][j];
    }
  }
  return true;
}

Vector lu_solve(const Matrix& lu, const std::vector<std::size_t>& perm, const Vector& b) {
  const std::size_t n = lu.size();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu[i][j] * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu[i][j] * x[j];
    x[i] = s / lu[i][i];
  }
  return x;
}

}  // namespace

double determinant(const Matrix& m) {
  check_square(m);
  if (m.size() <= 4) return cofactor_det(m);
  Matrix a = m;
  std::vector<std::size_t> perm;
  int sign = 1;
  if (!lu_decompose(a, perm, sign)) return 0.0;
  double d = sign;
  for (std::size_t i = 0; i < a.size(); ++i) d *= a[i][i];
  return d;
}

double degeneracy_floor(const Matrix& m) {
  return 1e-12 * std::pow(max_column_norm(m), static_cast<double>(m.size()));
}

Vector solve_linear(const Matrix& m, const Vector& b) {
  check_square(m);
  if (b.size() != m.size()) throw std::invalid_argument("right-hand side size mismatch");
  const double det = determinant(m);
  if (!(std::abs(det) > degeneracy_floor(m)))
    throw Degenerate("determinant below degeneracy floor");
  Matrix lu = m;
  std::vector<std::size_t> perm;
  int sign = 1;
  if (!lu_decompose(lu, perm, sign)) throw Degenerate("singular matrix");
  Vector x = lu_solve(lu, perm, b);
  // One step of iterative refinement.
  const Vector r = sub(b, mat_vec(m, x));
  const Vector dx = lu_solve(lu, perm, r);
  return add(x, dx);
}

double inverse_norm_bound(const Matrix& m, double column_bound) {
  const double det = determinant(m);
  if (det == 0.0) throw Degenerate("zero determinant");
  const double n = static_cast<double>(m.size());
  return n * std::pow(column_bound, n - 1.0) / std::abs(det);
}

Vector project_to_affine_span(const Vector& q, const std::vector<Vector>& pts) {
  if (pts.empty()) throw std::invalid_argument("empty point set");
  const Vector& base = pts.front();
  double scale_ref = 0.0;
  std::vector<Vector> basis;
  for (std::size_t i = 1; i < pts.size(); ++i) scale_ref = std::max(scale_ref, dist(pts[i], base));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Vector v = sub(pts[i], base);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : basis) v = axpy(-dot(v, e), e, v);
    const double len = norm(v);
    if (len > 1e-13 * scale_ref) basis.push_back(scale(v, 1.0 / len));
  }
  Vector d = sub(q, base);
  Vector proj = base;
  for (const auto& e : basis) proj = axpy(dot(d, e), e, proj);
  return proj;
}

double distance_to_affine_span(const Vector& q, const std::vector<Vector>& pts) {
  const Vector p = project_to_affine_span(q, pts);
  Vector r = sub(q, p);
  // Re-project the residual to remove rounding drift along the span.
  const Vector p2 = project_to_affine_span(add(pts.front(), r), pts);
  return norm(sub(r, sub(p2, pts.front())));
}

}  // namespace delone
