#include "delone/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <limits>
#include <set>
#include <sstream>

#include "delone/errors.hpp"
#include "delone/parallel.hpp"
#include "delone/rng.hpp"

namespace delone {

// ---------------------------------------------------------------- Region

Region Region::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.empty()) throw ValidationError("region: box bounds size mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw ValidationError("region: box requires lo < hi");
  Region r;
  r.kind = Kind::Box;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  return r;
}

Region Region::disk(Vector center, double radius) {
  if (center.empty() || !(radius > 0.0)) throw ValidationError("region: disk requires a positive radius");
  Region r;
  r.kind = Kind::Disk;
  r.center = std::move(center);
  r.radius = radius;
  return r;
}

int Region::dim() const { return static_cast<int>(kind == Kind::Box ? lo.size() : center.size()); }

bool Region::contains(const Vector& p) const { return clearance(p) >= 0.0; }

double Region::clearance(const Vector& p) const {
  if (kind == Kind::Disk) return radius - dist(p, center);
  double inside = std::numeric_limits<double>::infinity();
  double outside = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    inside = std::min({inside, p[i] - lo[i], hi[i] - p[i]});
    const double o = std::max({0.0, lo[i] - p[i], p[i] - hi[i]});
    outside += o * o;
  }
  return outside > 0.0 ? -std::sqrt(outside) : inside;
}

double Region::volume() const {
  if (kind == Kind::Disk) {
    const double n = static_cast<double>(center.size());
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(radius, n);
  }
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

Vector Region::bbox_lo() const {
  if (kind == Kind::Box) return lo;
  Vector r = center;
  for (auto& x : r) x -= radius;
  return r;
}

Vector Region::bbox_hi() const {
  if (kind == Kind::Box) return hi;
  Vector r = center;
  for (auto& x : r) x += radius;
  return r;
}

const std::vector<Simplex>& DelaunayComplex::top() const {
  static const std::vector<Simplex> empty;
  auto it = simplices_by_dim.find(dim);
  return it == simplices_by_dim.end() ? empty : it->second;
}

// ---------------------------------------------------------------- PointIndex

PointIndex::PointIndex(const MetricModel& m, const std::vector<Vector>& pts, double cell)
    : m_(m), pts_(pts), cell_(cell), brute_(m.kind() == MetricModel::Kind::Torus || !(cell > 0.0)) {
  if (brute_) return;
  for (std::size_t i = 0; i < pts.size(); ++i) grid_[key(pts[i])].push_back(i);
}

std::vector<long> PointIndex::key(const Vector& p) const {
  std::vector<long> k(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) k[i] = static_cast<long>(std::floor(p[i] / cell_));
  return k;
}

std::vector<std::size_t> PointIndex::within(const Vector& q, double radius) const {
  std::vector<std::size_t> out;
  if (brute_) {
    for (std::size_t i = 0; i < pts_.size(); ++i)
      if (m_.distance(q, pts_[i]) <= radius) out.push_back(i);
    return out;
  }
  const std::vector<long> c = key(q);
  const long reach = static_cast<long>(std::ceil(radius / cell_));
  const std::size_t d = c.size();
  std::vector<long> off(d, -reach);
  while (true) {
    std::vector<long> k(d);
    for (std::size_t i = 0; i < d; ++i) k[i] = c[i] + off[i];
    auto it = grid_.find(k);
    if (it != grid_.end())
      for (std::size_t j : it->second)
        if (m_.distance(q, pts_[j]) <= radius) out.push_back(j);
    std::size_t i = 0;
    while (i < d && off[i] == reach) off[i++] = -reach;
    if (i == d) break;
    ++off[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- spheres

CircumSphere metric_circumsphere(const std::vector<Vector>& pts, const MetricModel& m) {
  switch (m.kind()) {
    case MetricModel::Kind::Flat: return circumcenter(pts);
    case MetricModel::Kind::Torus: {
      std::vector<Vector> un;
      for (const auto& p : pts) un.push_back(add(pts[0], m.log(pts[0], p)));
      CircumSphere s = circumcenter(un);
      s.center = m.normalize(s.center);
      return s;
    }
    case MetricModel::Kind::Sphere: {
      if (pts.size() != 3) throw std::invalid_argument("sphere leaf needs three points");
      const Vector u = sub(pts[1], pts[0]), v = sub(pts[2], pts[0]);
      Vector c = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
      const double len = norm(c);
      if (!(len > 1e-12 * norm(u) * norm(v))) throw Degenerate("points on a common great circle");
      c = scale(c, m.radius() / len);
      if (dot(c, pts[0]) < 0.0) c = scale(c, -1.0);
      return CircumSphere{c, m.distance(c, pts[0])};
    }
  }
  throw std::logic_error("unknown metric");
}

bool metric_empty_sphere(const CircumSphere& s, const std::vector<Vector>& pts,
                         const std::vector<std::size_t>& candidates,
                         const std::vector<std::size_t>& exclude, const MetricModel& m,
                         double margin) {
  const double lim = s.radius - margin;
  for (std::size_t j : candidates) {
    if (std::find(exclude.begin(), exclude.end(), j) != exclude.end()) continue;
    if (m.distance(s.center, pts[j]) < lim) return false;
  }
  return true;
}

// ---------------------------------------------------------------- cells

NearestSite nearest_site(const Vector& q, const Net& net, const MetricModel& m) {
  if (net.points.empty()) throw std::invalid_argument("empty net");
  NearestSite best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    const double d = m.distance(q, net.points[i]);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

bool VoronoiCell::contains(const Net& net, const MetricModel& m, const Vector& q, double tol) const {
  if (!halfspaces.empty() || (m.kind() == MetricModel::Kind::Flat && neighbor_sites.empty())) {
    for (const auto& h : halfspaces)
      if (dot(h.normal, q) > h.offset + tol * norm(h.normal)) return false;
    return true;
  }
  const double d0 = m.distance(q, net.points[site]);
  for (std::size_t j : neighbor_sites)
    if (m.distance(q, net.points[j]) < d0 - tol) return false;
  return true;
}

bool is_interior(const Net& net, std::size_t i) {
  return net.region.clearance(net.points[i]) >= net.d2;
}

VoronoiCell voronoi_cell(const Net& net, std::size_t i, const MetricModel& m) {
  VoronoiCell c;
  c.site = i;
  const Vector& p = net.points[i];
  PointIndex idx(m, net.points, net.d2);
  for (std::size_t j : idx.within(p, 4.0 * net.d2))
    if (j != i) c.neighbor_sites.push_back(j);
  if (m.kind() == MetricModel::Kind::Flat) {
    for (std::size_t j : c.neighbor_sites) {
      const Vector& q = net.points[j];
      c.halfspaces.push_back(Halfspace{sub(q, p), 0.5 * (dot(q, q) - dot(p, p))});
    }
  }
  c.interior = is_interior(net, i);
  return c;
}

namespace {

// Visits every ascending (n+1)-tuple starting at i0 whose members are
// pairwise within the neighbor relation given by nbr (ascending lists).
template <class F>
void for_each_clique(std::size_t i0, int n, const std::vector<std::vector<std::size_t>>& nbr, F&& f) {
  std::vector<std::size_t> tuple{i0};
  std::vector<std::size_t> cand;
  for (std::size_t j : nbr[i0])
    if (j > i0) cand.push_back(j);
  std::function<void(const std::vector<std::size_t>&)> rec = [&](const std::vector<std::size_t>& c) {
    if (static_cast<int>(tuple.size()) == n + 1) {
      f(tuple);
      return;
    }
    for (std::size_t a = 0; a < c.size(); ++a) {
      const std::size_t j = c[a];
      std::vector<std::size_t> next;
      for (std::size_t b = a + 1; b < c.size(); ++b)
        if (std::binary_search(nbr[j].begin(), nbr[j].end(), c[b])) next.push_back(c[b]);
      tuple.push_back(j);
      rec(next);
      tuple.pop_back();
    }
  };
  rec(cand);
}

std::vector<std::vector<std::size_t>> neighbor_lists(const Net& net, const MetricModel& m, double radius) {
  PointIndex idx(m, net.points, radius / 2.0);
  std::vector<std::vector<std::size_t>> nbr(net.points.size());
  parallel_for(net.points.size(), [&](std::size_t i) { nbr[i] = idx.within(net.points[i], radius); });
  return nbr;
}

std::vector<Vector> gather(const std::vector<Vector>& pts, const std::vector<std::size_t>& ids) {
  std::vector<Vector> out;
  out.reserve(ids.size());
  for (std::size_t i : ids) out.push_back(pts[i]);
  return out;
}

}  // namespace

std::vector<Vector> simplex_points(const Net& net, const Simplex& s) { return gather(net.points, s.vertices); }

std::vector<std::size_t> star_neighborhood(const Net& net, std::size_t i, const MetricModel& m) {
  const int n = m.leaf_dim();
  const double reach = 2.0 * net.d2;
  PointIndex idx(m, net.points, net.d2);
  const std::vector<std::size_t> local = idx.within(net.points[i], reach);
  std::vector<std::vector<std::size_t>> nbr(net.points.size());
  for (std::size_t j : local)
    for (std::size_t k : idx.within(net.points[j], reach))
      if (std::binary_search(local.begin(), local.end(), k)) nbr[j].push_back(k);
  std::set<std::size_t> out{i};
  // Cliques through i: relabel so that i comes first by scanning all starts.
  for (std::size_t start : local) {
    for_each_clique(start, n, nbr, [&](const std::vector<std::size_t>& t) {
      if (std::find(t.begin(), t.end(), i) == t.end()) return;
      CircumSphere s;
      try {
        s = metric_circumsphere(gather(net.points, t), m);
      } catch (const Degenerate&) {
        return;
      }
      if (s.radius > net.d2) return;
      if (!metric_empty_sphere(s, net.points, idx.within(s.center, s.radius), t, m, 0.0)) return;
      out.insert(t.begin(), t.end());
    });
  }
  return {out.begin(), out.end()};
}

DelaunayComplex build_delaunay(const Net& net, const MetricModel& m, double regular_tol) {
  const int n = m.leaf_dim();
  DelaunayComplex c;
  c.dim = n;
  const auto nbr = neighbor_lists(net, m, 2.0 * net.d2);
  const std::size_t N = net.points.size();
  std::vector<std::vector<Simplex>> found(N);
  std::vector<std::size_t> skipped(N, 0);
  parallel_for(N, [&](std::size_t i0) {
    for_each_clique(i0, n, nbr, [&](const std::vector<std::size_t>& t) {
      CircumSphere s;
      try {
        s = metric_circumsphere(gather(net.points, t), m);
      } catch (const Degenerate&) {
        ++skipped[i0];
        return;
      }
      if (!(s.radius <= net.d2)) return;
      if (!metric_empty_sphere(s, net.points, nbr[i0], t, m, 0.0)) return;
      found[i0].push_back(Simplex{t, s});
    });
  });
  auto& top = c.simplices_by_dim[n];
  for (std::size_t i = 0; i < N; ++i) {
    top.insert(top.end(), found[i].begin(), found[i].end());
    c.degenerate_skipped += skipped[i];
  }
  // Faces, each carrying the sphere of the first top simplex that contains it.
  for (int k = n - 1; k >= 1; --k) {
    std::map<std::vector<std::size_t>, CircumSphere> faces;
    for (const auto& s : top) {
      std::vector<bool> pick(n + 1, false);
      std::fill(pick.begin(), pick.begin() + k + 1, true);
      do {
        std::vector<std::size_t> f;
        for (int a = 0; a <= n; ++a)
          if (pick[a]) f.push_back(s.vertices[a]);
        faces.emplace(f, s.sphere);
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    auto& list = c.simplices_by_dim[k];
    for (auto& [v, sph] : faces) list.push_back(Simplex{v, sph});
  }
  auto& verts = c.simplices_by_dim[0];
  for (std::size_t i = 0; i < N; ++i) verts.push_back(Simplex{{i}, CircumSphere{net.points[i], 0.0}});
  c.regular = check_regular(net, c, m, regular_tol);
  return c;
}

bool check_regular(const Net& net, const DelaunayComplex& c, const MetricModel& m, double tol) {
  PointIndex idx(m, net.points, std::max(net.d2, 1e-300));
  for (const auto& s : c.top()) {
    const double band = tol * s.sphere.radius;
    for (std::size_t j : idx.within(s.sphere.center, s.sphere.radius + band)) {
      if (std::find(s.vertices.begin(), s.vertices.end(), j) != s.vertices.end()) continue;
      if (std::abs(m.distance(s.sphere.center, net.points[j]) - s.sphere.radius) <= band) return false;
    }
  }
  return true;
}

DualityReport check_duality(const Net& net, const DelaunayComplex& c, const MetricModel& m, double tol) {
  const int n = m.leaf_dim();
  DualityReport rep;
  PointIndex idx(m, net.points, net.d2);
  std::set<std::vector<std::size_t>> tops;
  for (const auto& s : c.top()) tops.insert(s.vertices);
  auto describe = [](const std::vector<std::size_t>& v) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "]";
    return os.str();
  };
  // Center of a sphere lies in the cell of each vertex: nothing strictly closer.
  auto in_all_cells = [&](const CircumSphere& s, const std::vector<std::size_t>& verts) {
    const double slack = tol * std::max(s.radius, net.d2);
    for (std::size_t v : verts) {
      const double dv = m.distance(s.center, net.points[v]);
      if (std::abs(dv - s.radius) > slack) return false;
      for (std::size_t j : idx.within(s.center, s.radius))
        if (m.distance(s.center, net.points[j]) < dv - slack) return false;
    }
    return true;
  };
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < net.points.size(); ++i)
    if (is_interior(net, i)) interior.push_back(i);
  rep.checked_sites = interior.size();
  const std::set<std::size_t> interior_set(interior.begin(), interior.end());
  for (int k = 1; k <= n; ++k) {
    auto it = c.simplices_by_dim.find(k);
    if (it == c.simplices_by_dim.end()) continue;
    for (const auto& s : it->second) {
      if (!std::any_of(s.vertices.begin(), s.vertices.end(), [&](std::size_t v) { return interior_set.count(v); }))
        continue;
      ++rep.checked_simplices;
      if (!in_all_cells(s.sphere, s.vertices))
        rep.violations.push_back("simplex " + describe(s.vertices) + ": center outside an incident cell");
    }
  }
  // Reverse direction at top level: every cell-intersection point of n+1
  // cells near an interior site is a complex simplex.
  const auto nbr = neighbor_lists(net, m, 2.0 * net.d2);
  for (std::size_t i : interior) {
    const auto& local = nbr[i];
    for (std::size_t start : local) {
      if (start > i) break;
      for_each_clique(start, n, nbr, [&](const std::vector<std::size_t>& t) {
        if (std::find(t.begin(), t.end(), i) == t.end()) return;
        // Only count each tuple once: at its smallest interior member.
        for (std::size_t v : t)
          if (v < i && interior_set.count(v)) return;
        CircumSphere s;
        try {
          s = metric_circumsphere(gather(net.points, t), m);
        } catch (const Degenerate&) {
          return;
        }
        if (s.radius > net.d2) return;
        if (!metric_empty_sphere(s, net.points, idx.within(s.center, s.radius), t, m, 0.0)) return;
        if (!tops.count(t))
          rep.violations.push_back("tuple " + describe(t) + ": cells meet but simplex missing");
      });
    }
  }
  return rep;
}

std::vector<Simplex> simplicial_cone(const DelaunayComplex& c, std::size_t i) {
  std::vector<Simplex> out;
  for (const auto& s : c.top())
    if (std::find(s.vertices.begin(), s.vertices.end(), i) != s.vertices.end()) out.push_back(s);
  return out;
}

Vector barycentric(const std::vector<Vector>& verts, const Vector& q, const MetricModel& m) {
  const std::size_t n = verts.size() - 1;
  const Frame f = default_frame(m, verts[0]);
  Matrix et(n, Vector(n));
  for (std::size_t k = 1; k <= n; ++k) {
    const Vector a = log_frame(m, f, verts[k]);
    for (std::size_t r = 0; r < n; ++r) et[r][k - 1] = a[r];
  }
  const Vector lam = solve_linear(et, log_frame(m, f, q));
  Vector out(n + 1);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out[k + 1] = lam[k];
    s += lam[k];
  }
  out[0] = 1.0 - s;
  return out;
}

bool check_filling(const Net& net, const DelaunayComplex& c, const MetricModel& m, std::size_t i,
                   int samples, std::uint64_t seed) {
  const auto cone = simplicial_cone(c, i);
  const VoronoiCell cell = voronoi_cell(net, i, m);
  const Frame f = default_frame(m, net.points[i]);
  const int n = m.leaf_dim();
  Rng rng(seed);
  int accepted = 0;
  for (int tries = 0; accepted < samples && tries < 1000 * samples; ++tries) {
    Vector a(n);
    for (auto& x : a) x = rng.uniform(-net.d2, net.d2);
    if (norm(a) > net.d2) continue;
    const Vector q = exp_frame(m, f, a);
    if (!cell.contains(net, m, q)) continue;
    ++accepted;
    bool inside = false;
    for (const auto& s : cone) {
      const Vector b = barycentric(simplex_points(net, s), q, m);
      if (std::all_of(b.begin(), b.end(), [](double x) { return x >= -1e-9; })) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return accepted > 0;
}

Vector realize_simplex(const std::vector<Vector>& verts, const MetricModel& m, const Vector& bary) {
  if (verts.empty() || bary.size() != verts.size()) throw std::invalid_argument("barycentric size mismatch");
  if (!m.is_flat() || m.kind() == MetricModel::Kind::Torus) {
    const double lim = m.convexity_radius();
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = i + 1; j < verts.size(); ++j)
        if (m.distance(verts[i], verts[j]) >= lim) throw OutOfChart("vertices exceed the convexity radius");
  }
  Vector p;
  double w = 0.0;
  for (std::size_t k = 0; k < verts.size(); ++k) {
    const double t = bary[k];
    if (w == 0.0) {
      p = verts[k];
      w = t;
      continue;
    }
    const double w2 = w + t;
    if (t == 0.0) continue;
    const double s = t / w2;
    p = (s == 1.0) ? verts[k] : m.geodesic_point(p, verts[k], s);
    w = w2;
  }
  return p;
}

NetAudit audit_net(const Net& net, const MetricModel& m, double h, double sep_radius) {
  NetAudit a;
  a.min_separation = std::numeric_limits<double>::infinity();
  PointIndex idx(m, net.points, std::max(net.d2, sep_radius / 2.0));
  for (std::size_t i = 0; i < net.points.size(); ++i)
    for (std::size_t j : idx.within(net.points[i], sep_radius))
      if (j > i) {
        const double d = m.distance(net.points[i], net.points[j]);
        if (d < a.min_separation) {
          a.min_separation = d;
          a.close_i = i;
          a.close_j = j;
        }
      }
  if (h <= 0.0 || net.points.empty()) return a;
  const Vector lo = net.region.bbox_lo(), hi = net.region.bbox_hi();
  const std::size_t d = lo.size();
  std::vector<long> counts(d);
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    counts[k] = static_cast<long>(std::floor((hi[k] - lo[k]) / h + 1e-9)) + 1;
    total *= static_cast<std::size_t>(counts[k]);
  }
  const unsigned workers = worker_count();
  std::vector<std::pair<double, Vector>> worst(workers, {0.0, Vector{}});
  parallel_for(workers, [&](std::size_t w) {
    for (std::size_t s = w; s < total; s += workers) {
      Vector q(d);
      std::size_t r = s;
      for (std::size_t k = 0; k < d; ++k) {
        q[k] = std::min(hi[k], lo[k] + h * static_cast<double>(r % counts[k]));
        r /= counts[k];
      }
      if (!net.region.contains(q)) continue;
      double radius = net.d2 > 0.0 ? net.d2 : h;
      double best = std::numeric_limits<double>::infinity();
      while (!std::isfinite(best)) {
        for (std::size_t j : idx.within(q, radius)) best = std::min(best, m.distance(q, net.points[j]));
        radius *= 2.0;
      }
      if (best > worst[w].first) worst[w] = {best, q};
    }
  });
  for (const auto& [g, q] : worst)
    if (g > a.max_gap) {
      a.max_gap = g;
      a.worst_sample = q;
    }
  return a;
}

}  // namespace delone
