#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delone/circumsphere.hpp"
#include "delone/metrics.hpp"

namespace delone {

// Compact region in leaf coordinates: an axis-aligned box or a round disk.
struct Region {
  enum class Kind { Box, Disk };
  Kind kind = Kind::Box;
  Vector lo, hi;      // box
  Vector center;      // disk
  double radius = 0;  // disk

  static Region box(Vector lo, Vector hi);
  static Region disk(Vector center, double radius);

  int dim() const;
  bool contains(const Vector& p) const;
  /// Signed distance to the boundary, positive inside.
  double clearance(const Vector& p) const;
  double volume() const;
  Vector bbox_lo() const;
  Vector bbox_hi() const;
};

struct Net {
  int dim = 2;
  std::vector<Vector> points;
  double d1 = 0.0;
  double d2 = 0.0;
  double rF = 1.0;
  Region region;
};

struct Simplex {
  std::vector<std::size_t> vertices;  // ascending net indices
  CircumSphere sphere;
};

struct DelaunayComplex {
  int dim = 2;
  std::map<int, std::vector<Simplex>> simplices_by_dim;
  bool regular = true;
  std::size_t degenerate_skipped = 0;

  const std::vector<Simplex>& top() const;
};

// Fixed-radius neighbor queries: hashed grid for flat and sphere (ambient
// chord), brute force for the torus.
class PointIndex {
 public:
  PointIndex(const MetricModel& m, const std::vector<Vector>& pts, double cell);
  /// Indices with distance <= radius, ascending.
  std::vector<std::size_t> within(const Vector& q, double radius) const;

 private:
  const MetricModel& m_;
  const std::vector<Vector>& pts_;
  double cell_;
  bool brute_;
  std::map<std::vector<long>, std::vector<std::size_t>> grid_;
  std::vector<long> key(const Vector& p) const;
};

/// Circumscribed sphere in the metric (center in ambient coordinates,
/// radius a geodesic distance). Throws Degenerate.
CircumSphere metric_circumsphere(const std::vector<Vector>& pts, const MetricModel& m);

/// True iff no point outside exclude lies at geodesic distance < radius - margin.
bool metric_empty_sphere(const CircumSphere& s, const std::vector<Vector>& pts,
                         const std::vector<std::size_t>& candidates,
                         const std::vector<std::size_t>& exclude, const MetricModel& m,
                         double margin);

struct NearestSite {
  std::size_t index = 0;
  double distance = 0.0;
};
NearestSite nearest_site(const Vector& q, const Net& net, const MetricModel& m);

struct Halfspace {
  Vector normal;  // {x : normal . x <= offset}
  double offset = 0.0;
};

struct VoronoiCell {
  std::size_t site = 0;
  std::vector<std::size_t> neighbor_sites;  // within 4 d2
  std::vector<Halfspace> halfspaces;        // flat metric only
  bool interior = true;
  /// Membership with an absolute slack tol.
  bool contains(const Net& net, const MetricModel& m, const Vector& q, double tol = 0.0) const;
};

/// Site i is interior when D(site, d2) lies in the region.
bool is_interior(const Net& net, std::size_t i);

VoronoiCell voronoi_cell(const Net& net, std::size_t i, const MetricModel& m);

/// Sites whose cells meet the cell of i, including i.
std::vector<std::size_t> star_neighborhood(const Net& net, std::size_t i, const MetricModel& m);

DelaunayComplex build_delaunay(const Net& net, const MetricModel& m, double regular_tol = 1e-9);

/// False iff some top simplex has another net point within tol * radius of its sphere.
bool check_regular(const Net& net, const DelaunayComplex& c, const MetricModel& m, double tol = 1e-9);

struct DualityReport {
  std::size_t checked_sites = 0;
  std::size_t checked_simplices = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks that complex simplices and cell intersections correspond, around interior sites.
DualityReport check_duality(const Net& net, const DelaunayComplex& c, const MetricModel& m,
                            double tol = 1e-9);

/// Top simplices containing site i.
std::vector<Simplex> simplicial_cone(const DelaunayComplex& c, std::size_t i);

/// Barycentric coordinates of q in the simplex (log coordinates at vertex 0).
Vector barycentric(const std::vector<Vector>& verts, const Vector& q, const MetricModel& m);

/// Samples the Voronoi cell of i and checks each sample lies in some simplex of its cone.
bool check_filling(const Net& net, const DelaunayComplex& c, const MetricModel& m, std::size_t i,
                   int samples, std::uint64_t seed = 0);

/// Iterated geodesic-cone realization at the given barycentric coordinates.
/// Throws OutOfChart when the vertices are not in one convex ball.
Vector realize_simplex(const std::vector<Vector>& verts, const MetricModel& m, const Vector& bary);

std::vector<Vector> simplex_points(const Net& net, const Simplex& s);

struct NetAudit {
  double min_separation = 0.0;
  std::size_t close_i = 0, close_j = 0;
  double max_gap = 0.0;  // max over region samples of the distance to the net
  Vector worst_sample;
};

/// Exact pairwise separation (within radius) and grid density audit at step h.
NetAudit audit_net(const Net& net, const MetricModel& m, double h, double sep_radius);

}  // namespace delone
