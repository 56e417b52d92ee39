#pragma once

#include <cstddef>
#include <vector>

namespace delone {

using Vector = std::vector<double>;
using Matrix = std::vector<Vector>;  // row-major, square

// Vector helpers.
double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
double dist(const Vector& a, const Vector& b);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& a, double s);
Vector axpy(double s, const Vector& x, const Vector& y);  // s*x + y
Vector mat_vec(const Matrix& m, const Vector& x);
Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix identity(std::size_t n);

/// Largest Euclidean column norm of m.
double max_column_norm(const Matrix& m);

/// Determinant. Cofactor expansion for n <= 4, partial-pivot LU for 5..8.
/// Returns 0.0 for singular input.
double determinant(const Matrix& m);

/// Singularity floor used by solve_linear: 1e-12 * column_bound^n.
double degeneracy_floor(const Matrix& m);

/// Solves m x = b. Throws Degenerate when |det m| is below degeneracy_floor.
Vector solve_linear(const Matrix& m, const Vector& b);

/// Hadamard-type bound n * C^(n-1) / |det m| on the operator norm of m^-1.
/// Throws Degenerate when det m == 0.
double inverse_norm_bound(const Matrix& m, double column_bound);

/// Euclidean distance from q to the affine hull of pts.
double distance_to_affine_span(const Vector& q, const std::vector<Vector>& pts);

/// Orthogonal projection of q onto the affine hull of pts.
Vector project_to_affine_span(const Vector& q, const std::vector<Vector>& pts);

}  // namespace delone
