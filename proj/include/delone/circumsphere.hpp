#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "delone/linalg.hpp"

namespace delone {

struct CircumSphere {
  Vector center;
  double radius = 0.0;
};

// Lengths e1, e2, e3, rho, eps; delta is a volume.
struct PerturbationBudget {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double rho = 0.0;
  double eps = 0.0;
  double delta = 0.0;

  /// Fills e3 = e2 + eps and validates. Throws InvalidBudget.
  static PerturbationBudget make(double e1, double e2, double rho, double eps, double delta);
  void validate() const;
};

/// Circumscribed sphere of n+1 points in R^n. Base vertex is the last point.
CircumSphere circumcenter(const std::vector<Vector>& pts);

/// eps * {1 + n^{3/2} 2^{n+1} e3^n / delta + 2 n^3 2^{2n} e3^{2n} / delta^2}.
double displacement_bound(const PerturbationBudget& b, int n);

/// delta / (2^{n+1} n^{3/2} e2^{n-1}).
double stability_radius(const PerturbationBudget& b, int n);

struct RefinedCenter {
  CircumSphere sphere;
  double drift_bound = 0.0;  // 2 sqrt(n) r C1 C2
  double c2 = 0.0;           // Hadamard bound on the inverse edge matrix
};

/// Exact circumcenter plus the certified bound on |guess - center|.
/// Throws std::invalid_argument when the guess is not C1-approximate.
RefinedCenter refine_center(const std::vector<Vector>& pts, const Vector& guess, double c1);

/// True iff no point outside exclude lies at distance < radius - margin.
bool empty_sphere_test(const CircumSphere& s, const std::vector<Vector>& net,
                       const std::set<std::size_t>& exclude, double margin);

}  // namespace delone
