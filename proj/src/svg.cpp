#include "delone/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "delone/errors.hpp"

namespace delone {

namespace {

std::string num(double v) {
  char buf[32];
  const double r = std::round(v * 1e4) / 1e4;
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r == 0.0 ? 0.0 : r);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace

std::string render_svg(const Net& net, const DelaunayComplex& c, const StabilityCertificate* cert,
                       const SvgOptions& opt) {
  if (net.dim != 2 || c.dim != 2) throw UnsupportedDim("render: only dim 2 is supported");
  Vector lo = net.region.bbox_lo(), hi = net.region.bbox_hi();
  for (const auto& p : net.points)
    for (int k = 0; k < 2; ++k) lo[k] = std::min(lo[k], p[k]), hi[k] = std::max(hi[k], p[k]);
  const double pad = 0.05 * std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-9});
  for (int k = 0; k < 2; ++k) lo[k] -= pad, hi[k] += pad;
  const double s = opt.width / (hi[0] - lo[0]);
  const double height = s * (hi[1] - lo[1]);
  auto X = [&](const Vector& p) { return num(s * (p[0] - lo[0])); };
  auto Y = [&](const Vector& p) { return num(height - s * (p[1] - lo[1])); };
  const double site_r = std::max(1.0, 0.15 * s * net.d1);

  std::set<std::vector<std::size_t>> failed;
  if (cert)
    for (const auto& sc : cert->per_simplex)
      if (!sc.pass) failed.insert(sc.vertices);
  if (cert && !cert->pass && !cert->worst.simplex.empty()) failed.insert(cert->worst.simplex);

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(opt.width) << "\" height=\"" << num(height)
    << "\" viewBox=\"0 0 " << num(opt.width) << ' ' << num(height) << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const auto& top = c.top();
  for (const auto& t : top) {
    if (!failed.count(t.vertices)) continue;
    o << "<polygon class=\"failed\" fill=\"#e33\" fill-opacity=\"0.5\" points=\"";
    for (std::size_t a = 0; a < t.vertices.size(); ++a)
      o << (a ? " " : "") << X(net.points[t.vertices[a]]) << ',' << Y(net.points[t.vertices[a]]);
    o << "\"/>\n";
  }
  // Voronoi edges: dual segments between circumcenters of adjacent triangles.
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> edge_owner;
  for (std::size_t k = 0; k < top.size(); ++k)
    for (int drop = 0; drop < 3; ++drop) {
      std::vector<std::size_t> e;
      for (int a = 0; a < 3; ++a)
        if (a != drop) e.push_back(top[k].vertices[a]);
      edge_owner[e].push_back(k);
    }
  for (const auto& [e, ks] : edge_owner) {
    if (ks.size() != 2) continue;
    const Vector& p = top[ks[0]].sphere.center;
    const Vector& q = top[ks[1]].sphere.center;
    o << "<line class=\"voronoi\" x1=\"" << X(p) << "\" y1=\"" << Y(p) << "\" x2=\"" << X(q) << "\" y2=\"" << Y(q)
      << "\" stroke=\"#39c\" stroke-width=\"0.5\"/>\n";
  }
  std::set<std::vector<std::size_t>> edges;
  if (auto it = c.simplices_by_dim.find(1); it != c.simplices_by_dim.end())
    for (const auto& e : it->second) edges.insert(e.vertices);
  for (const auto& [e, ks] : edge_owner) edges.insert(e);
  for (const auto& e : edges) {
    const Vector& p = net.points[e[0]];
    const Vector& q = net.points[e[1]];
    o << "<line class=\"delaunay\" x1=\"" << X(p) << "\" y1=\"" << Y(p) << "\" x2=\"" << X(q) << "\" y2=\"" << Y(q)
      << "\" stroke=\"#222\" stroke-width=\"0.7\"/>\n";
  }
  if (opt.circumcircles)
    for (const auto& t : top)
      o << "<circle class=\"circumcircle\" cx=\"" << X(t.sphere.center) << "\" cy=\"" << Y(t.sphere.center)
        << "\" r=\"" << num(s * t.sphere.radius) << "\" fill=\"none\" stroke=\"#aaa\" stroke-width=\"0.3\"/>\n";
  for (const auto& p : net.points)
    o << "<circle class=\"site\" cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"" << num(site_r)
      << "\" fill=\"#000\"/>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace delone
