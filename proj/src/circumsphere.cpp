#include "delone/circumsphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "delone/errors.hpp"

namespace delone {

PerturbationBudget PerturbationBudget::make(double e1, double e2, double rho, double eps,
                                            double delta) {
  PerturbationBudget b{e1, e2, e2 + eps, rho, eps, delta};
  b.validate();
  return b;
}

void PerturbationBudget::validate() const {
  if (!(e1 > 0.0 && e1 < e2)) throw InvalidBudget("require 0 < e1 < e2");
  if (!(rho > 0.0)) throw InvalidBudget("require rho > 0");
  if (!(delta > 0.0)) throw InvalidBudget("require delta > 0");
  if (!(eps >= 0.0)) throw InvalidBudget("require eps >= 0");
  if (std::abs(e3 - (e2 + eps)) > 1e-15 * (e2 + eps)) throw InvalidBudget("require e3 = e2 + eps");
}

CircumSphere circumcenter(const std::vector<Vector>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("need n+1 points");
  const std::size_t n = pts.size() - 1;
  for (const auto& p : pts)
    if (p.size() != n) throw std::invalid_argument("need n+1 points in R^n");
  const Vector& yn = pts[n];
  Matrix u(n);
  Vector rhs(n);
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = sub(pts[k], yn);
    rhs[k] = 0.5 * dot(u[k], u[k]);
  }
  const Vector xi = solve_linear(u, rhs);
  return CircumSphere{add(xi, yn), norm(xi)};
}

double displacement_bound(const PerturbationBudget& b, int n) {
  const double nn = n;
  const double t = std::pow(b.e3, nn) / b.delta;
  return b.eps * (1.0 + std::pow(nn, 1.5) * std::pow(2.0, nn + 1.0) * t +
                  2.0 * nn * nn * nn * std::pow(2.0, 2.0 * nn) * t * t);
}

double stability_radius(const PerturbationBudget& b, int n) {
  const double nn = n;
  return b.delta / (std::pow(2.0, nn + 1.0) * std::pow(nn, 1.5) * std::pow(b.e2, nn - 1.0));
}

RefinedCenter refine_center(const std::vector<Vector>& pts, const Vector& guess, double c1) {
  const CircumSphere exact = circumcenter(pts);
  const std::size_t n = pts.size() - 1;
  double lo = INFINITY, hi = 0.0;
  for (const auto& p : pts) {
    const double d = dist(guess, p);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const double r = 0.5 * (lo + hi);
  if (0.5 * (hi - lo) > c1 && c1 > 0.0)
    throw std::invalid_argument("guess is not C1-approximately equidistant");
  Matrix v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = sub(pts[k], pts[n]);
  const double c2 = inverse_norm_bound(v, max_column_norm(v));
  const double c1_eff = std::max(c1, 0.5 * (hi - lo));
  return RefinedCenter{exact, 2.0 * std::sqrt(double(n)) * r * c1_eff * c2, c2};
}

bool empty_sphere_test(const CircumSphere& s, const std::vector<Vector>& net,
                       const std::set<std::size_t>& exclude, double margin) {
  const double lim = s.radius - margin;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (exclude.count(i)) continue;
    if (dist(s.center, net[i]) < lim) return false;
  }
  return true;
}

}  // namespace delone
