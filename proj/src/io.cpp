#include "delone/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "delone/errors.hpp"

namespace delone {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected object");
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(path, "expected finite number");
  return v;
}

// Non-finite reals have no JSON literal; they are written as null.
Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double real_or_inf(const Json& j, const std::string& path) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return number(j, path);
}

Vector vec(const Json& j, const std::string& path, std::size_t dim = 0) {
  if (!j.is_array()) bad(path, "expected array");
  if (dim && j.size() != dim) bad(path, "expected " + std::to_string(dim) + " entries");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected integer");
  return j.get<int>();
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected string");
  return j.get<std::string>();
}

void check_version(const Json& j, const std::string& path) {
  if (integer(field(j, "v", path), path + ".v") != kSchemaVersion) bad(path + ".v", "unsupported schema version");
}

}  // namespace

Json region_to_json(const Region& r) {
  Json j;
  if (r.kind == Region::Kind::Box) {
    j["kind"] = "box";
    j["bounds"] = {{"lo", vec_json(r.lo)}, {"hi", vec_json(r.hi)}};
  } else {
    j["kind"] = "disk";
    j["bounds"] = {{"center", vec_json(r.center)}, {"radius", r.radius}};
  }
  return j;
}

Region region_from_json(const Json& j, const std::string& path) {
  const std::string kind = text(field(j, "kind", path), path + ".kind");
  const Json& b = field(j, "bounds", path);
  try {
    if (kind == "box")
      return Region::box(vec(field(b, "lo", path + ".bounds"), path + ".bounds.lo"),
                         vec(field(b, "hi", path + ".bounds"), path + ".bounds.hi"));
    if (kind == "disk")
      return Region::disk(vec(field(b, "center", path + ".bounds"), path + ".bounds.center"),
                          number(field(b, "radius", path + ".bounds"), path + ".bounds.radius"));
  } catch (const ValidationError& e) {
    if (std::string(e.what()).rfind(path, 0) == 0) throw;
    bad(path, e.what());
  }
  bad(path + ".kind", "expected box or disk");
}

Json net_to_json(const Net& net) {
  Json j;
  j["v"] = kSchemaVersion;
  j["dim"] = net.dim;
  j["d1"] = net.d1;
  j["d2"] = net.d2;
  j["rF"] = net.rF;
  j["region"] = region_to_json(net.region);
  Json pts = Json::array();
  for (const auto& p : net.points) pts.push_back(vec_json(p));
  j["points"] = std::move(pts);
  return j;
}

Net net_from_json(const Json& j, const MetricModel* m) {
  check_version(j, "net");
  Net net;
  net.dim = integer(field(j, "dim", "net"), "net.dim");
  if (net.dim < 1 || net.dim > 8) bad("net.dim", "must be in 1..8");
  net.d1 = number(field(j, "d1", "net"), "net.d1");
  net.d2 = number(field(j, "d2", "net"), "net.d2");
  net.rF = number(field(j, "rF", "net"), "net.rF");
  if (!(net.d1 > 0.0)) bad("net.d1", "must be positive");
  if (!(net.d2 >= net.d1)) bad("net.d2", "must be at least d1");
  if (!(net.rF > 0.0)) bad("net.rF", "must be positive");
  net.region = region_from_json(field(j, "region", "net"), "net.region");
  if (net.region.dim() != net.dim) bad("net.region", "dimension differs from net.dim");
  const Json& pts = field(j, "points", "net");
  if (!pts.is_array()) bad("net.points", "expected array");
  for (std::size_t i = 0; i < pts.size(); ++i)
    net.points.push_back(vec(pts[i], "net.points[" + std::to_string(i) + "]", static_cast<std::size_t>(net.dim)));
  const MetricModel flat = MetricModel::flat(net.dim);
  const MetricModel& mm = m ? *m : flat;
  PointIndex idx(mm, net.points, net.d1);
  for (std::size_t i = 0; i < net.points.size(); ++i)
    for (std::size_t k : idx.within(net.points[i], net.d1))
      if (k > i && mm.distance(net.points[i], net.points[k]) < net.d1)
        bad("net.points[" + std::to_string(i) + "],net.points[" + std::to_string(k) + "]",
            "pair closer than d1");
  return net;
}

Json complex_to_json(const DelaunayComplex& c) {
  Json j;
  j["v"] = kSchemaVersion;
  j["dim"] = c.dim;
  Json arr = Json::array();
  for (const auto& [k, list] : c.simplices_by_dim)
    for (const auto& s : list) {
      Json e;
      e["verts"] = s.vertices;
      e["center"] = vec_json(s.sphere.center);
      e["radius"] = s.sphere.radius;
      arr.push_back(std::move(e));
    }
  j["simplices"] = std::move(arr);
  j["regular"] = c.regular;
  return j;
}

DelaunayComplex complex_from_json(const Json& j) {
  check_version(j, "complex");
  DelaunayComplex c;
  c.dim = integer(field(j, "dim", "complex"), "complex.dim");
  if (c.dim < 1 || c.dim > 8) bad("complex.dim", "must be in 1..8");
  const Json& r = field(j, "regular", "complex");
  if (!r.is_boolean()) bad("complex.regular", "expected boolean");
  c.regular = r.get<bool>();
  const Json& arr = field(j, "simplices", "complex");
  if (!arr.is_array()) bad("complex.simplices", "expected array");
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = "complex.simplices[" + std::to_string(i) + "]";
    const Json& vj = field(arr[i], "verts", p);
    if (!vj.is_array() || vj.empty()) bad(p + ".verts", "expected nonempty array");
    Simplex s;
    for (const auto& v : vj) {
      if (!v.is_number_unsigned()) bad(p + ".verts", "expected nonnegative integers");
      s.vertices.push_back(v.get<std::size_t>());
    }
    for (std::size_t a = 1; a < s.vertices.size(); ++a)
      if (!(s.vertices[a - 1] < s.vertices[a])) bad(p + ".verts", "must be strictly ascending");
    if (static_cast<int>(s.vertices.size()) > c.dim + 2) bad(p + ".verts", "too many vertices for dim");
    if (!seen.insert(s.vertices).second) bad(p + ".verts", "duplicate simplex");
    s.sphere.center = vec(field(arr[i], "center", p), p + ".center", static_cast<std::size_t>(c.dim));
    s.sphere.radius = number(field(arr[i], "radius", p), p + ".radius");
    if (s.sphere.radius < 0.0) bad(p + ".radius", "must be nonnegative");
    c.simplices_by_dim[static_cast<int>(s.vertices.size()) - 1].push_back(std::move(s));
  }
  return c;
}

Json bundle_to_json(const ConstantBundle& b) {
  Json j;
  j["v"] = kSchemaVersion;
  j["n"] = b.n;
  j["mode"] = b.mode;
  j["metric"] = b.metric;
  j["Cn"] = b.Cn;
  j["eps"] = {b.eps0, b.eps1, b.eps2, b.eps3, b.eps4};
  j["rF"] = b.rF;
  j["r_star"] = b.r_star;
  j["d"] = Json(std::vector<double>(b.d.begin(), b.d.end()));
  Json rh = Json::array();
  for (const auto& [a, c] : b.rho_hat) rh.push_back({a, c});
  j["rho_hat"] = std::move(rh);
  Json v2 = Json::object();
  for (const auto& [k, v] : b.v2) v2[k] = v;
  j["v2"] = std::move(v2);
  j["gs_delta"] = b.gs_delta;
  j["lambda_eps0"] = b.lambda_eps0;
  j["dFU"] = b.dFU;
  j["lF"] = b.lF;
  j["eps0_binding"] = b.eps0_binding;
  Json prov = Json::object();
  for (const auto& [k, v] : b.provenance) prov[k] = v;
  prov["seed"] = b.seed;
  j["provenance"] = std::move(prov);
  return j;
}

ConstantBundle bundle_from_json(const Json& j) {
  check_version(j, "bundle");
  ConstantBundle b;
  b.n = integer(field(j, "n", "bundle"), "bundle.n");
  b.mode = text(field(j, "mode", "bundle"), "bundle.mode");
  b.metric = text(field(j, "metric", "bundle"), "bundle.metric");
  MetricModel::parse(b.metric);
  b.Cn = text(field(j, "Cn", "bundle"), "bundle.Cn");
  const Vector eps = vec(field(j, "eps", "bundle"), "bundle.eps", 5);
  b.eps0 = eps[0], b.eps1 = eps[1], b.eps2 = eps[2], b.eps3 = eps[3], b.eps4 = eps[4];
  b.rF = number(field(j, "rF", "bundle"), "bundle.rF");
  b.r_star = number(field(j, "r_star", "bundle"), "bundle.r_star");
  const Vector d = vec(field(j, "d", "bundle"), "bundle.d", 6);
  std::copy(d.begin(), d.end(), b.d.begin());
  const Json& rh = field(j, "rho_hat", "bundle");
  if (!rh.is_array()) bad("bundle.rho_hat", "expected array");
  for (std::size_t i = 0; i < rh.size(); ++i) {
    const Vector p = vec(rh[i], "bundle.rho_hat[" + std::to_string(i) + "]", 2);
    b.rho_hat.emplace_back(p[0], p[1]);
  }
  const Json& v2 = field(j, "v2", "bundle");
  if (!v2.is_object()) bad("bundle.v2", "expected object");
  for (auto it = v2.begin(); it != v2.end(); ++it) b.v2[it.key()] = number(it.value(), "bundle.v2." + it.key());
  b.gs_delta = number(field(j, "gs_delta", "bundle"), "bundle.gs_delta");
  b.lambda_eps0 = number(field(j, "lambda_eps0", "bundle"), "bundle.lambda_eps0");
  b.dFU = number(field(j, "dFU", "bundle"), "bundle.dFU");
  b.lF = number(field(j, "lF", "bundle"), "bundle.lF");
  b.eps0_binding = integer(field(j, "eps0_binding", "bundle"), "bundle.eps0_binding");
  const Json& prov = field(j, "provenance", "bundle");
  if (!prov.is_object()) bad("bundle.provenance", "expected object");
  for (auto it = prov.begin(); it != prov.end(); ++it) {
    if (it.key() == "seed") {
      if (!it.value().is_number_unsigned()) bad("bundle.provenance.seed", "expected nonnegative integer");
      b.seed = it.value().get<std::uint64_t>();
    } else {
      b.provenance[it.key()] = text(it.value(), "bundle.provenance." + it.key());
    }
  }
  try {
    validate_bundle(b);
  } catch (const ValidationError& e) {
    bad("bundle", e.what());
  }
  return b;
}

Json family_to_json(const ParamFamily& f) {
  Json j;
  j["v"] = kSchemaVersion;
  j["depth"] = f.depth;
  j["params"] = f.params;
  Json fields = Json::object();
  for (const auto& p : f.params) {
    Json arr = Json::array();
    for (const auto& d : f.fields.at(p)) arr.push_back(vec_json(d));
    fields[p] = std::move(arr);
  }
  j["fields"] = std::move(fields);
  return j;
}

ParamFamily family_from_json(const Json& j) {
  check_version(j, "family");
  ParamFamily f;
  f.depth = integer(field(j, "depth", "family"), "family.depth");
  if (f.depth < 1 || f.depth > 12) bad("family.depth", "must be in 1..12");
  const Json& ps = field(j, "params", "family");
  if (!ps.is_array() || ps.empty()) bad("family.params", "expected nonempty array");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::string p = text(ps[i], "family.params[" + std::to_string(i) + "]");
    if (p.size() != static_cast<std::size_t>(f.depth) || p.find_first_not_of("01") != std::string::npos)
      bad("family.params[" + std::to_string(i) + "]", "expected binary string of length depth");
    f.params.push_back(p);
  }
  const std::string identity(static_cast<std::size_t>(f.depth), '0');
  const Json& fields = field(j, "fields", "family");
  std::size_t count = 0, dim = 0;
  bool first = true;
  for (const auto& p : f.params) {
    const std::string path = "family.fields." + p;
    const Json& arr = field(fields, p.c_str(), "family.fields");
    if (!arr.is_array()) bad(path, "expected array");
    std::vector<Vector> disp;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      disp.push_back(vec(arr[i], path + "[" + std::to_string(i) + "]", first ? 0 : dim));
      if (first) dim = disp.back().size(), first = false;
    }
    if (p != f.params.front() && disp.size() != count) bad(path, "field size differs between params");
    count = disp.size();
    if (p == identity)
      for (std::size_t i = 0; i < disp.size(); ++i)
        if (norm(disp[i]) != 0.0) bad(path + "[" + std::to_string(i) + "]", "identity param must not move points");
    f.fields[p] = std::move(disp);
  }
  return f;
}

Json certificate_to_json(const StabilityCertificate& c) {
  Json j;
  j["v"] = kSchemaVersion;
  j["pass"] = c.pass;
  j["worst"] = {{"simplex", c.worst.simplex},
                {"param", c.worst.param},
                {"quantity", c.worst.quantity},
                {"margin", real(c.worst.margin)}};
  j["thresholds"] = {{"robustness", c.rho_threshold},
                     {"base_clearance", c.base_clearance_threshold},
                     {"translated_clearance", c.translated_clearance_threshold},
                     {"center_drift", c.center_drift_limit},
                     {"radius_drift", c.radius_drift_limit}};
  Json comb = Json::object();
  for (const auto& [p, same] : c.combinatorics) comb[p] = same;
  j["combinatorics"] = std::move(comb);
  Json per = Json::array();
  for (const auto& s : c.per_simplex)
    per.push_back({{"verts", s.vertices},
                   {"robustness", real(s.robustness)},
                   {"base_clearance", real(s.base_clearance)},
                   {"translated_clearance", real(s.translated_clearance)},
                   {"center_drift", real(s.center_drift)},
                   {"radius_drift", real(s.radius_drift)},
                   {"pass", s.pass}});
  j["per_simplex"] = std::move(per);
  return j;
}

StabilityCertificate certificate_from_json(const Json& j) {
  check_version(j, "certificate");
  StabilityCertificate c;
  const Json& pass = field(j, "pass", "certificate");
  if (!pass.is_boolean()) bad("certificate.pass", "expected boolean");
  c.pass = pass.get<bool>();
  const Json& w = field(j, "worst", "certificate");
  for (const auto& v : field(w, "simplex", "certificate.worst")) {
    if (!v.is_number_unsigned()) bad("certificate.worst.simplex", "expected nonnegative integers");
    c.worst.simplex.push_back(v.get<std::size_t>());
  }
  c.worst.param = text(field(w, "param", "certificate.worst"), "certificate.worst.param");
  c.worst.quantity = text(field(w, "quantity", "certificate.worst"), "certificate.worst.quantity");
  c.worst.margin = real_or_inf(field(w, "margin", "certificate.worst"), "certificate.worst.margin");
  const Json& per = field(j, "per_simplex", "certificate");
  if (!per.is_array()) bad("certificate.per_simplex", "expected array");
  for (std::size_t i = 0; i < per.size(); ++i) {
    const std::string p = "certificate.per_simplex[" + std::to_string(i) + "]";
    SimplexCertificate s;
    for (const auto& v : field(per[i], "verts", p)) {
      if (!v.is_number_unsigned()) bad(p + ".verts", "expected nonnegative integers");
      s.vertices.push_back(v.get<std::size_t>());
    }
    const Json& sp = field(per[i], "pass", p);
    if (!sp.is_boolean()) bad(p + ".pass", "expected boolean");
    s.pass = sp.get<bool>();
    s.robustness = real_or_inf(field(per[i], "robustness", p), p + ".robustness");
    s.base_clearance = real_or_inf(field(per[i], "base_clearance", p), p + ".base_clearance");
    s.translated_clearance = real_or_inf(field(per[i], "translated_clearance", p), p + ".translated_clearance");
    s.center_drift = real_or_inf(field(per[i], "center_drift", p), p + ".center_drift");
    s.radius_drift = real_or_inf(field(per[i], "radius_drift", p), p + ".radius_drift");
    c.per_simplex.push_back(std::move(s));
  }
  return c;
}

Json duality_to_json(const DualityReport& r) {
  Json j;
  j["v"] = kSchemaVersion;
  j["ok"] = r.ok();
  j["checked_sites"] = r.checked_sites;
  j["checked_simplices"] = r.checked_simplices;
  j["violations"] = r.violations;
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": malformed JSON (" + e.what() + ")");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path + ": write failed");
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

Artifact parse_and_validate(const std::string& path) {
  const Json j = read_json_file(path);
  if (!j.is_object()) bad("$", "expected object");
  if (j.contains("points")) return net_from_json(j);
  if (j.contains("simplices")) return complex_from_json(j);
  if (j.contains("params")) return family_from_json(j);
  if (j.contains("eps")) return bundle_from_json(j);
  bad("$", "unrecognized artifact");
}

}  // namespace delone
