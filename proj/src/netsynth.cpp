#include "delone/netsynth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <unordered_map>

#include "delone/errors.hpp"
#include "delone/parallel.hpp"
#include "delone/robustness.hpp"

namespace delone {

// ---------------------------------------------------------------- family

double ParamFamily::param_distance(const std::string& a, const std::string& b) {
  if (a == b) return 0.0;
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
  return std::ldexp(1.0, -static_cast<int>(k));
}

std::size_t ParamFamily::index_of(const std::string& p) const {
  auto it = std::find(params.begin(), params.end(), p);
  if (it == params.end()) throw ValidationError("family: unknown param " + p);
  return static_cast<std::size_t>(it - params.begin());
}

double ParamFamily::sup_norm(const std::string& p) const {
  double s = 0.0;
  for (const auto& v : fields.at(p)) s = std::max(s, norm(v));
  return s;
}

TransportFamily ParamFamily::transport(const Net& net, const MetricModel& m) const {
  TransportFamily t;
  t.metric = m;
  t.base = net.points;
  t.param_count = params.size();
  t.param_distance = [this](std::size_t a, std::size_t b) { return param_distance(params[a], params[b]); };
  t.displacement = [this](std::size_t p, std::size_t i) { return fields.at(params[p])[i]; };
  t.pair_radius = net.rF;
  return t;
}

namespace {

std::vector<std::string> binary_strings(int depth) {
  std::vector<std::string> out;
  for (std::size_t v = 0; v < (std::size_t{1} << depth); ++v) {
    std::string s(depth, '0');
    for (int b = 0; b < depth; ++b)
      if (v & (std::size_t{1} << (depth - 1 - b))) s[b] = '1';
    out.push_back(s);
  }
  return out;
}

double binary_fraction(const std::string& s) {
  double v = 0.0;
  for (std::size_t b = 0; b < s.size(); ++b)
    if (s[b] == '1') v += std::ldexp(1.0, -static_cast<int>(b) - 1);
  return v;
}

}  // namespace

ParamFamily make_family(const Net& net, int depth, double sup, std::uint64_t seed) {
  if (depth < 1 || depth > 12) throw ValidationError("family: depth must be in 1..12");
  ParamFamily fam;
  fam.depth = depth;
  fam.params = binary_strings(depth);
  Rng rng(seed);
  const int n = net.dim;
  Vector freq(n), phase(n);
  for (int k = 0; k < n; ++k) {
    freq[k] = rng.uniform(0.5, 1.5) / std::max(net.rF, 1e-300);
    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  for (const auto& p : fam.params) {
    std::vector<Vector> field(net.points.size(), Vector(n, 0.0));
    const double v = binary_fraction(p);
    if (v != 0.0) {
      for (std::size_t i = 0; i < net.points.size(); ++i)
        for (int k = 0; k < n; ++k) {
          const Vector& x = net.points[i];
          const double arg = freq[k] * x[(k + 1) % n] + phase[k] + 2.0 * std::numbers::pi * v;
          field[i][k] = (k % 2 == 0) ? std::sin(arg) : std::cos(arg);
        }
      double s = 0.0;
      for (const auto& d : field) s = std::max(s, norm(d));
      if (s > 0.0)
        for (auto& d : field) d = scale(d, sup / s);
    }
    fam.fields[p] = std::move(field);
  }
  return fam;
}

ParamFamily make_adversarial_family(const Net& net, int depth, std::size_t vertex, double shift) {
  ParamFamily fam;
  fam.depth = depth;
  fam.params = binary_strings(depth);
  for (const auto& p : fam.params) fam.fields[p] = std::vector<Vector>(net.points.size(), Vector(net.dim, 0.0));
  Vector d(net.dim, 0.0);
  d[0] = shift;
  fam.fields[fam.params.back()][vertex] = d;
  return fam;
}

// ---------------------------------------------------------------- coverage

namespace {

// Hash grid that accepts insertions (flat leaves).
class DynamicGrid {
 public:
  explicit DynamicGrid(double cell) : cell_(cell) {}
  void insert(const Vector& p, std::size_t id) {
    pts_.push_back(p);
    grid_[hash(key(p))].push_back(id);
  }
  const std::vector<Vector>& points() const { return pts_; }
  /// Nearest distance within radius, or +inf.
  double nearest(const Vector& q, double radius, std::size_t* which = nullptr) const {
    double best = std::numeric_limits<double>::infinity();
    visit(q, radius, [&](std::size_t j) {
      const double d = dist(q, pts_[j]);
      if (d < best || (d == best && which && j < *which)) {
        best = d;
        if (which) *which = j;
      }
    });
    return best <= radius ? best : std::numeric_limits<double>::infinity();
  }
  std::vector<std::size_t> within(const Vector& q, double radius) const {
    std::vector<std::size_t> out;
    visit(q, radius, [&](std::size_t j) {
      if (dist(q, pts_[j]) <= radius) out.push_back(j);
    });
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  double cell_;
  std::vector<Vector> pts_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;

  std::vector<long> key(const Vector& p) const {
    std::vector<long> k(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) k[i] = static_cast<long>(std::floor(p[i] / cell_));
    return k;
  }
  static std::uint64_t hash(const std::vector<long>& k) {
    std::uint64_t h = 0x84222325ULL;
    for (long v : k) h = Rng::splitmix(h ^ static_cast<std::uint64_t>(v));
    return h;
  }
  template <class F>
  void visit(const Vector& q, double radius, F&& f) const {
    const auto c = key(q);
    const long reach = static_cast<long>(std::ceil(radius / cell_));
    const std::size_t d = c.size();
    std::vector<long> off(d, -reach), k(d);
    while (true) {
      for (std::size_t i = 0; i < d; ++i) k[i] = c[i] + off[i];
      auto it = grid_.find(hash(k));
      if (it != grid_.end())
        for (std::size_t j : it->second)
          if (key(pts_[j]) == k) f(j);
      std::size_t i = 0;
      while (i < d && off[i] == reach) off[i++] = -reach;
      if (i == d) break;
      ++off[i];
    }
  }
};

Vector clamp_into(const Region& K, const Vector& q, double erosion) {
  if (K.kind == Region::Kind::Disk) {
    const double r = K.radius - erosion;
    const double d = dist(q, K.center);
    if (d <= r) return q;
    return axpy(r / d, sub(q, K.center), K.center);
  }
  Vector out = q;
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = std::clamp(q[i], K.lo[i] + erosion, K.hi[i] - erosion);
  return out;
}

Vector region_center(const Region& K) {
  if (K.kind == Region::Kind::Disk) return K.center;
  return scale(add(K.lo, K.hi), 0.5);
}

// Scans K in cells of size h with adaptive refinement. A monotone cursor
// skips cells already verified covered; adding points never uncovers a cell.
class CoverageTracker {
 public:
  CoverageTracker(const Region& K, const DynamicGrid& grid, double h, double d2pp, int max_depth)
      : K_(K), grid_(grid), h_(h), d2pp_(d2pp), max_depth_(max_depth) {
    lo_ = K.bbox_lo();
    const Vector hi = K.bbox_hi();
    total_ = 1;
    for (std::size_t k = 0; k < lo_.size(); ++k) {
      counts_.push_back(std::max<long>(1, static_cast<long>(std::ceil((hi[k] - lo_[k]) / h - 1e-9))));
      total_ *= static_cast<std::size_t>(counts_.back());
    }
  }

  std::optional<Vector> find_witness() {
    while (cursor_ < total_) {
      Vector c(lo_.size());
      std::size_t r = cursor_;
      for (std::size_t k = 0; k < lo_.size(); ++k) {
        c[k] = lo_[k] + h_ * (static_cast<double>(r % counts_[k]) + 0.5);
        r /= counts_[k];
      }
      if (auto w = check(c, 0.5 * h_, 0)) return w;
      ++cursor_;
    }
    return std::nullopt;
  }

 private:
  const Region& K_;
  const DynamicGrid& grid_;
  double h_, d2pp_;
  int max_depth_;
  Vector lo_;
  std::vector<long> counts_;
  std::size_t total_ = 0, cursor_ = 0;

  double f(const Vector& q, double reach) const { return grid_.nearest(q, reach); }

  std::optional<Vector> check(const Vector& c, double half, int depth) const {
    const double hd = half * std::sqrt(static_cast<double>(c.size()));
    if (K_.clearance(c) < -hd) return std::nullopt;
    const double fc = f(c, d2pp_ + hd);
    if (fc <= d2pp_ - hd) return std::nullopt;
    // Relative slack absorbs rounding of boundary points exactly at d2''.
    const double limit = d2pp_ * (1.0 + 1e-12);
    if (fc > limit && K_.contains(c)) return c;
    if (depth == max_depth_) {
      const Vector q = clamp_into(K_, c, 0.0);
      if (f(q, d2pp_ + 2.0 * hd) > limit) return q;
      return std::nullopt;
    }
    const std::size_t d = c.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      Vector s = c;
      for (std::size_t k = 0; k < d; ++k) s[k] += ((mask >> k) & 1 ? 0.5 : -0.5) * half;
      if (auto w = check(s, 0.5 * half, depth + 1)) return w;
    }
    return std::nullopt;
  }
};

constexpr int kCoverageDepth = 6;
constexpr double kWidthSafety = 1.001;

Vector candidate_from_witness(const Region& K, const DynamicGrid& grid, const Vector& q,
                              const ConstantBundle& b) {
  const double beta = b.rF / 200.0;
  const double target = 0.15 * b.rF;
  const Vector q1 = clamp_into(K, q, beta);
  if (K.clearance(q1) < beta * (1.0 - 1e-9)) throw RegionExhausted("region has no rF/200 interior");
  std::size_t z = 0;
  double fz = grid.nearest(q1, std::numeric_limits<double>::max(), &z);
  (void)fz;
  const Vector z1 = clamp_into(K, grid.points()[z], beta);
  auto fval = [&](const Vector& x) { return grid.nearest(x, 4.0 * b.d2()); };
  double a = 0.0, c = 1.0;
  if (!(fval(q1) > target)) throw RegionExhausted("witness too close to the net");
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (a + c);
    (fval(axpy(mid, sub(z1, q1), q1)) > target ? a : c) = mid;
  }
  return axpy(0.5 * (a + c), sub(z1, q1), q1);
}

}  // namespace

Vector propose_candidate(const Region& K, const PartialTransversal& net, const ConstantBundle& b) {
  DynamicGrid grid(b.d2());
  for (std::size_t i = 0; i < net.xi.size(); ++i) grid.insert(net.xi[i], i);
  if (net.xi.empty()) {
    const Vector c = region_center(K);
    if (K.clearance(c) < b.rF / 200.0) throw RegionExhausted("region has no rF/200 interior");
    return c;
  }
  CoverageTracker tracker(K, grid, b.rF / 100.0, b.d2pp(), kCoverageDepth);
  const auto w = tracker.find_witness();
  if (!w) throw RegionExhausted("net is d2''-complete");
  return candidate_from_witness(K, grid, *w, b);
}

// ---------------------------------------------------------------- exclusions

double distance_to_slab_patch(const std::vector<Vector>& pts, const Slab& s, const Vector& x) {
  const Vector& yk = pts[s.points.back()];
  if (s.points.size() == 1) return dist(x, yk);
  std::vector<Vector> span;
  for (std::size_t i : s.points) span.push_back(pts[i]);
  Vector p = project_to_affine_span(x, span);
  const double r = dist(p, yk);
  if (r > s.patch_radius) p = axpy(s.patch_radius / r, sub(p, yk), yk);
  return dist(x, p);
}

bool in_forbidden(const std::vector<Vector>& pts, const ForbiddenRegions& f, const Vector& x) {
  for (const auto& a : f.annuli)
    if (std::abs(dist(x, a.sphere.center) - a.sphere.radius) < a.width) return true;
  for (const auto& s : f.slabs)
    if (distance_to_slab_patch(pts, s, x) < s.width) return true;
  return false;
}

namespace {

template <class F>
void for_each_subset(const std::vector<std::size_t>& ids, std::size_t size, F&& f) {
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == size) {
      f(cur);
      return;
    }
    for (std::size_t a = start; a < ids.size(); ++a) {
      cur.push_back(ids[a]);
      rec(a + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

bool pairwise_within(const std::vector<Vector>& pts, const std::vector<std::size_t>& ids, double r) {
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      if (dist(pts[ids[a]], pts[ids[b]]) > r) return false;
  return true;
}

}  // namespace

ForbiddenRegions forbidden_regions(const std::vector<Vector>& pts, const Vector& xi_prime,
                                   const ConstantBundle& b, bool active_only) {
  const int n = static_cast<int>(xi_prime.size());
  const double beta = b.rF / 200.0;
  const double w1 = 2.0 * b.eps1 * b.rF, w2 = 2.0 * b.eps2 * b.rF;
  const double d2 = b.d2();
  std::vector<std::size_t> omega, near6;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = dist(pts[i], xi_prime);
    if (d <= 4.0 * d2) omega.push_back(i);
    if (d <= 6.0 * d2) near6.push_back(i);
  }
  ForbiddenRegions out;
  std::vector<std::size_t> annulus_ids = omega;
  if (active_only) {
    annulus_ids.clear();
    for (std::size_t i : omega)
      if (dist(pts[i], xi_prime) <= 2.0 * d2 + beta + w1) annulus_ids.push_back(i);
  }
  for_each_subset(annulus_ids, static_cast<std::size_t>(n + 1), [&](const std::vector<std::size_t>& t) {
    if (!pairwise_within(pts, t, 2.0 * d2)) return;
    std::vector<Vector> v;
    for (std::size_t i : t) v.push_back(pts[i]);
    CircumSphere s;
    try {
      s = circumcenter(v);
    } catch (const Degenerate&) {
      return;
    }
    if (s.radius > d2) return;
    if (active_only && std::abs(dist(xi_prime, s.center) - s.radius) >= beta + w1 * kWidthSafety) return;
    for (std::size_t j : near6) {
      if (std::find(t.begin(), t.end(), j) != t.end()) continue;
      if (dist(pts[j], s.center) < s.radius) return;
    }
    out.annuli.push_back(Annulus{s, t, w1});
  });
  for (int size = 1; size <= n; ++size) {
    for_each_subset(omega, static_cast<std::size_t>(size), [&](const std::vector<std::size_t>& t) {
      Slab s{t, 2.0 * d2, w2};
      if (active_only && distance_to_slab_patch(pts, s, xi_prime) >= beta + w2 * kWidthSafety) return;
      out.slabs.push_back(s);
    });
  }
  return out;
}

double forbidden_fraction(const std::vector<Vector>& pts, const ForbiddenRegions& f,
                          const Vector& xi_prime, double radius, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = xi_prime.size();
  int hit = 0, total = 0;
  while (total < samples) {
    Vector a(n);
    for (auto& x : a) x = rng.uniform(-radius, radius);
    if (norm(a) > radius) continue;
    ++total;
    if (in_forbidden(pts, f, add(xi_prime, a))) ++hit;
  }
  return static_cast<double>(hit) / samples;
}

Vector select_point(const Vector& xi_prime, double radius, const std::vector<Vector>& pts,
                    const ForbiddenRegions& f, Rng& rng,
                    const std::function<bool(const Vector&)>& extra_ok) {
  const std::size_t n = xi_prime.size();
  auto ok = [&](const Vector& x) { return !in_forbidden(pts, f, x) && (!extra_ok || extra_ok(x)); };
  for (int tries = 0; tries < 10000; ++tries) {
    Vector a(n);
    do {
      for (auto& x : a) x = rng.uniform(-radius, radius);
    } while (norm(a) > radius);
    const Vector x = add(xi_prime, a);
    if (ok(x)) return x;
  }
  const int steps = 50;
  const double h = radius / steps;
  std::vector<long> off(n, -steps);
  while (true) {
    Vector a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = h * static_cast<double>(off[k]);
    if (norm(a) <= radius && ok(add(xi_prime, a))) return add(xi_prime, a);
    std::size_t i = 0;
    while (i < n && off[i] == steps) off[i++] = -steps;
    if (i == n) break;
    ++off[i];
  }
  throw SelectionFailed("no admissible point in the candidate ball");
}

// ---------------------------------------------------------------- synthesis

SynthesisResult synthesize_net(const Region& K, const ConstantBundle& b, std::uint64_t seed) {
  const int n = K.dim();
  if (n != b.n) throw ValidationError("region dimension differs from bundle n");
  if (MetricModel::parse(b.metric).kind() != MetricModel::Kind::Flat)
    throw ValidationError("synthesis supports flat leaves only");
  const double beta = b.rF / 200.0;
  const double w1 = 2.0 * b.eps1 * b.rF * kWidthSafety;
  const double d2 = b.d2();
  DynamicGrid grid(d2);
  Rng rng(seed);
  SynthesisResult res;
  const Vector c0 = region_center(K);
  if (K.clearance(c0) < beta) throw RegionExhausted("region has no rF/200 interior");
  grid.insert(c0, 0);
  CoverageTracker tracker(K, grid, b.rF / 100.0, b.d2pp(), kCoverageDepth);
  const double ball_vol = std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) *
                          std::pow(b.d1p() / 2.0, n);
  const std::size_t cap = static_cast<std::size_t>(4.0 * K.volume() / ball_vol) + 1000;

  // Rejects x when it closes an n-simplex whose sphere has an extra point in
  // the 2 eps1 rF shell without a deeper point inside.
  auto new_simplex_ok = [&](const Vector& x) {
    const auto& pts = grid.points();
    const auto local = grid.within(x, 2.0 * d2);
    bool good = true;
    for_each_subset(local, static_cast<std::size_t>(n), [&](const std::vector<std::size_t>& t) {
      if (!good || !pairwise_within(pts, t, 2.0 * d2)) return;
      std::vector<Vector> v;
      for (std::size_t i : t) v.push_back(pts[i]);
      v.push_back(x);
      CircumSphere s;
      try {
        s = circumcenter(v);
      } catch (const Degenerate&) {
        good = false;
        return;
      }
      if (s.radius > d2) return;
      bool deep = false, shell = false;
      for (std::size_t j : grid.within(s.center, s.radius + w1)) {
        if (std::find(t.begin(), t.end(), j) != t.end()) continue;
        const double d = dist(pts[j], s.center);
        if (d < s.radius - w1) deep = true;
        else if (std::abs(d - s.radius) < w1) shell = true;
      }
      if (shell && !deep) good = false;
    });
    return good;
  };

  while (true) {
    const auto w = tracker.find_witness();
    if (!w) break;
    if (grid.points().size() >= cap) throw SelectionFailed("point count exceeded the packing bound");
    const Vector xi = candidate_from_witness(K, grid, *w, b);
    ForbiddenRegions f = forbidden_regions(grid.points(), xi, b, true);
    for (auto& a : f.annuli) a.width *= kWidthSafety;
    for (auto& s : f.slabs) s.width *= kWidthSafety;
    Rng before = rng;
    const Vector x = select_point(xi, beta, grid.points(), f, rng, new_simplex_ok);
    (void)before;
    grid.insert(x, grid.points().size());
  }
  res.transversal.xi = grid.points();
  res.transversal.theta.assign(res.transversal.xi.size(), 0);
  res.transversal.complete = true;
  res.net.dim = n;
  res.net.points = grid.points();
  res.net.d1 = b.d1p();
  res.net.d2 = b.d2p();
  res.net.rF = b.rF;
  res.net.region = K;
  return res;
}

Net translate_net(const Net& net, const std::string& param, const ParamFamily& fam, const MetricModel& m) {
  const auto it = fam.fields.find(param);
  if (it == fam.fields.end()) throw ValidationError("family: unknown param " + param);
  if (it->second.size() != net.points.size()) throw ValidationError("family: field size differs from net");
  Net out = net;
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    const Vector& d = it->second[i];
    if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) continue;
    out.points[i] = m.exp(net.points[i], d);
  }
  return out;
}

// ---------------------------------------------------------------- certification

namespace {

double clearance_of(const std::vector<Vector>& pts, const PointIndex& idx, const CircumSphere& s,
                    const std::vector<std::size_t>& verts, const MetricModel& m, double reach) {
  double best = reach;
  for (std::size_t j : idx.within(s.center, s.radius + reach)) {
    if (std::find(verts.begin(), verts.end(), j) != verts.end()) continue;
    best = std::min(best, m.distance(s.center, pts[j]) - s.radius);
  }
  return best;
}

}  // namespace

StabilityCertificate certify_family_stability(const Net& net, const DelaunayComplex& c,
                                              const ParamFamily& fam, const ConstantBundle& b,
                                              const MetricModel& m) {
  StabilityCertificate cert;
  const double rF = b.rF;
  cert.rho_threshold = 1.5 * b.eps2 * rF;
  cert.base_clearance_threshold = 2.0 * b.eps1 * rF;
  cert.translated_clearance_threshold = b.eps1 * rF;
  cert.center_drift_limit = 0.5 * b.eps3 * rF;
  cert.radius_drift_limit = b.eps3 * rF;
  const auto& top = c.top();
  std::set<std::vector<std::size_t>> base_set;
  for (const auto& s : top) base_set.insert(s.vertices);
  PointIndex base_idx(m, net.points, net.d2);
  const double reach = net.d2;

  cert.per_simplex.resize(top.size());
  for (std::size_t k = 0; k < top.size(); ++k) {
    auto& sc = cert.per_simplex[k];
    sc.vertices = top[k].vertices;
    sc.robustness = std::numeric_limits<double>::infinity();
    sc.translated_clearance = std::numeric_limits<double>::infinity();
    sc.base_clearance = clearance_of(net.points, base_idx, top[k].sphere, top[k].vertices, m, reach);
  }

  double worst_score = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<std::size_t>& simplex, const std::string& param,
                      const std::string& quantity, double margin, double scale_ref) {
    const double score = scale_ref > 0.0 ? margin / scale_ref : margin;
    if (score < worst_score) {
      worst_score = score;
      cert.worst = Witness{simplex, param, quantity, margin};
    }
  };
  for (std::size_t k = 0; k < top.size(); ++k)
    consider(top[k].vertices, fam.params.empty() ? "" : fam.params.front(), "base_clearance",
             cert.per_simplex[k].base_clearance - cert.base_clearance_threshold, cert.base_clearance_threshold);

  for (const auto& param : fam.params) {
    const Net moved = translate_net(net, param, fam, m);
    const DelaunayComplex mc = build_delaunay(moved, m);
    std::set<std::vector<std::size_t>> moved_set;
    for (const auto& s : mc.top()) moved_set.insert(s.vertices);
    const bool same = moved_set == base_set;
    cert.combinatorics[param] = same;
    if (!same) {
      std::vector<std::vector<std::size_t>> diff;
      std::set_symmetric_difference(base_set.begin(), base_set.end(), moved_set.begin(), moved_set.end(),
                                    std::back_inserter(diff));
      // Prefer a base simplex that the translate lost.
      auto lost = std::find_if(diff.begin(), diff.end(), [&](const auto& v) { return base_set.count(v) > 0; });
      const auto& named = lost != diff.end() ? *lost : diff.front();
      if (worst_score > -std::numeric_limits<double>::infinity())
        cert.worst = Witness{named, param, "combinatorics", -static_cast<double>(diff.size())};
      worst_score = -std::numeric_limits<double>::infinity();
    }
    PointIndex idx(m, moved.points, moved.d2);
    std::vector<std::vector<std::tuple<std::string, double, double>>> local(top.size());
    parallel_for(top.size(), [&](std::size_t k) {
      auto& sc = cert.per_simplex[k];
      const auto verts = simplex_points(moved, top[k]);
      const double rob = m.kind() == MetricModel::Kind::Flat ? robustness_of(verts).rho : metric_robustness(verts, m, rF);
      sc.robustness = std::min(sc.robustness, rob);
      local[k].emplace_back("robustness", rob - cert.rho_threshold, cert.rho_threshold);
      CircumSphere s;
      try {
        s = metric_circumsphere(verts, m);
      } catch (const Degenerate&) {
        local[k].emplace_back("degenerate", -1.0, 0.0);
        return;
      }
      const double cd = m.distance(s.center, top[k].sphere.center);
      const double rd = std::abs(s.radius - top[k].sphere.radius);
      sc.center_drift = std::max(sc.center_drift, cd);
      sc.radius_drift = std::max(sc.radius_drift, rd);
      local[k].emplace_back("center_drift", cert.center_drift_limit - cd, cert.center_drift_limit);
      local[k].emplace_back("radius_drift", cert.radius_drift_limit - rd, cert.radius_drift_limit);
      const double cl = clearance_of(moved.points, idx, s, top[k].vertices, m, reach);
      sc.translated_clearance = std::min(sc.translated_clearance, cl);
      local[k].emplace_back("translated_clearance", cl - cert.translated_clearance_threshold,
                            cert.translated_clearance_threshold);
    });
    for (std::size_t k = 0; k < top.size(); ++k)
      for (const auto& [q, margin, ref] : local[k]) {
        if (margin < 0.0) cert.per_simplex[k].pass = false;
        if (same || worst_score > -std::numeric_limits<double>::infinity()) consider(top[k].vertices, param, q, margin, ref);
      }
  }
  for (auto& sc : cert.per_simplex)
    if (sc.base_clearance < cert.base_clearance_threshold) sc.pass = false;
  cert.pass = std::all_of(cert.per_simplex.begin(), cert.per_simplex.end(), [](const auto& s) { return s.pass; }) &&
              std::all_of(cert.combinatorics.begin(), cert.combinatorics.end(), [](const auto& kv) { return kv.second; });
  return cert;
}

// ---------------------------------------------------------------- product structure

ProductReport build_product_structure(const Region& K, const Net& net, const DelaunayComplex& c,
                                      const ParamFamily& fam, const std::vector<std::string>& params,
                                      const MetricModel& m, int grid) {
  ProductReport rep;
  const int n = net.dim;
  const auto& top = c.top();
  std::vector<std::vector<std::size_t>> cone(net.points.size());
  for (std::size_t k = 0; k < top.size(); ++k)
    for (std::size_t v : top[k].vertices) cone[v].push_back(k);
  std::vector<Net> moved;
  for (const auto& p : params) moved.push_back(translate_net(net, p, fam, m));
  PointIndex idx(m, net.points, net.d2);

  const Vector lo = K.bbox_lo(), hi = K.bbox_hi();
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= static_cast<std::size_t>(grid);
  for (std::size_t s = 0; s < total; ++s) {
    Vector y(n);
    std::size_t r = s;
    for (int k = 0; k < n; ++k) {
      y[k] = lo[k] + (hi[k] - lo[k]) * (static_cast<double>(r % grid) + 0.5) / grid;
      r /= grid;
    }
    if (K.contains(y)) rep.sample_points.push_back(y);
  }
  rep.samples = rep.sample_points.size();
  rep.params = params.size();
  rep.phi.assign(rep.samples, std::vector<Vector>(params.size()));
  std::vector<int> located(rep.samples, 0);
  parallel_for(rep.samples, [&](std::size_t s) {
    const Vector& y = rep.sample_points[s];
    std::set<std::size_t> cands;
    for (std::size_t v : idx.within(y, 2.0 * net.d2))
      for (std::size_t k : cone[v]) cands.insert(k);
    double best_min = -std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    Vector best_b;
    for (std::size_t k : cands) {
      const bool has_interior = std::any_of(top[k].vertices.begin(), top[k].vertices.end(),
                                            [&](std::size_t v) { return is_interior(net, v); });
      if (!has_interior) continue;
      const Vector bc = barycentric(simplex_points(net, top[k]), y, m);
      const double mn = *std::min_element(bc.begin(), bc.end());
      if (mn > best_min) {
        best_min = mn;
        best_k = k;
        best_b = bc;
      }
    }
    if (!(best_min >= -1e-12)) return;
    located[s] = 1;
    for (std::size_t t = 0; t < params.size(); ++t)
      rep.phi[s][t] = realize_simplex(simplex_points(moved[t], top[best_k]), m, best_b);
  });
  for (std::size_t s = 0; s < rep.samples; ++s)
    if (!located[s]) {
      rep.coverage_ok = false;
      throw CoverageGap("sample outside every cone of an interior site");
    }
  rep.classes = rep.samples;
  for (const auto& cls : rep.phi)
    if (cls.size() != params.size()) rep.class_sizes_ok = false;

  // Injectivity within each leaf (param); distinct params are distinct leaves.
  rep.min_image_separation = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < params.size(); ++t) {
    std::vector<Vector> img(rep.samples);
    for (std::size_t s = 0; s < rep.samples; ++s) img[s] = rep.phi[s][t];
    const double cell = 0.5 * (hi[0] - lo[0]) / grid;
    PointIndex pi(m, img, cell);
    for (std::size_t s = 0; s < rep.samples; ++s)
      for (std::size_t u : pi.within(img[s], 2.0 * cell))
        if (u != s) rep.min_image_separation = std::min(rep.min_image_separation, m.distance(img[s], img[u]));
  }
  rep.injective = rep.min_image_separation > 0.0;

  // Face agreement: points on shared (n-1)-faces realized through both simplices.
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> faces;
  for (std::size_t k = 0; k < top.size(); ++k)
    for (int drop = 0; drop <= n; ++drop) {
      std::vector<std::size_t> f;
      for (int a = 0; a <= n; ++a)
        if (a != drop) f.push_back(top[k].vertices[a]);
      faces[f].push_back(k);
    }
  const std::vector<double> ts = {0.25, 0.5, 0.75};
  for (const auto& [f, ks] : faces) {
    if (ks.size() != 2) continue;
    ++rep.face_pairs;
    for (double t : ts) {
      Vector fb(f.size(), (1.0 - t) / static_cast<double>(f.size() - 1));
      fb.back() = t;
      for (std::size_t p = 0; p < params.size(); ++p) {
        Vector img[2];
        for (int side = 0; side < 2; ++side) {
          const auto& verts = top[ks[side]].vertices;
          Vector bary(verts.size(), 0.0);
          for (std::size_t a = 0; a < verts.size(); ++a) {
            auto it = std::find(f.begin(), f.end(), verts[a]);
            if (it != f.end()) bary[a] = fb[static_cast<std::size_t>(it - f.begin())];
          }
          img[side] = realize_simplex(simplex_points(moved[p], top[ks[side]]), m, bary);
        }
        rep.max_face_gap = std::max(rep.max_face_gap, m.distance(img[0], img[1]));
      }
    }
  }
  return rep;
}

}  // namespace delone
