#pragma once

#include <cstdint>
#include <vector>

#include "delone/linalg.hpp"
#include "delone/metrics.hpp"

namespace delone {

struct RobustnessReport {
  std::vector<double> per_prefix_distance;  // entry k: pts[k+1] to span(pts[0..k])
  double rho = 0.0;
};

RobustnessReport robustness_of(const std::vector<Vector>& pts);

/// The degradation chain rho_1..rho_m (index 0 holds rho0).
/// Throws InvalidBudget on violated preconditions or a nonpositive rho_k.
std::vector<double> rho_chain(double rho0, double eps, double e1, double e2, int m);

/// Last entry of rho_chain.
double rho_m_recursion(double rho0, double eps, double e1, double e2, int m);

/// The coefficient delta_m of the recursion (delta_1 = 2).
double delta_m(double rho0, double eps, double e1, double e2, int m);

/// Lower bound for the area of the parallelogram spanned by two edges of any
/// triangle with pairwise side length >= e1 inscribed in a sphere of radius
/// <= e2. Sampled minimum with local refinement, times 0.9. Cached.
double v2_constant(double e1, double e2, std::uint64_t seed = 0);

/// Robustness measured through geodesic coordinates at each base point.
/// Throws OutOfChart when the points do not fit in a convex ball of radius r_f.
double metric_robustness(const std::vector<Vector>& pts, const MetricModel& m, double r_f = 0.0);

}  // namespace delone
