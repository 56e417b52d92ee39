#include "delone/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

#include "delone/errors.hpp"
#include "delone/parallel.hpp"
#include "delone/rng.hpp"

namespace delone {

namespace {

std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s, const std::string& selector) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ValidationError("bad metric selector: " + selector);
  return v;
}

Vector cross(const Vector& a, const Vector& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double wrap(double x, double p) {
  double r = std::fmod(x, p);
  if (r < 0.0) r += p;
  if (r >= p) r -= p;
  return r;
}

double min_image(double d, double p) { return d - p * std::round(d / p); }

Vector random_unit(Rng& rng, int n) {
  Vector v(n);
  double s = 0.0;
  while (s < 1e-12) {
    for (auto& x : v) x = rng.normal();
    s = norm(v);
  }
  return scale(v, 1.0 / s);
}

Vector random_in_ball(Rng& rng, int n, double radius) {
  const Vector u = random_unit(rng, n);
  return scale(u, radius * std::pow(rng.uniform(), 1.0 / n));
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

}  // namespace

MetricModel MetricModel::flat(int n) {
  if (n < 1 || n > 8) throw ValidationError("flat dimension must be in 1..8");
  MetricModel m;
  m.kind_ = Kind::Flat;
  m.leaf_dim_ = n;
  return m;
}

MetricModel MetricModel::sphere(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("sphere radius must be positive");
  MetricModel m;
  m.kind_ = Kind::Sphere;
  m.leaf_dim_ = 2;
  m.radius_ = radius;
  return m;
}

MetricModel MetricModel::torus(double p1, double p2) {
  if (!(p1 > 0.0 && p2 > 0.0) || !std::isfinite(p1) || !std::isfinite(p2))
    throw ValidationError("torus periods must be positive");
  MetricModel m;
  m.kind_ = Kind::Torus;
  m.leaf_dim_ = 2;
  m.periods_ = {p1, p2};
  return m;
}

MetricModel MetricModel::parse(const std::string& selector) {
  const auto colon = selector.find(':');
  if (colon == std::string::npos) throw ValidationError("bad metric selector: " + selector);
  const std::string kind = selector.substr(0, colon);
  const std::string rest = selector.substr(colon + 1);
  if (kind == "flat") {
    const double n = parse_number(rest, selector);
    if (n != std::floor(n)) throw ValidationError("bad metric selector: " + selector);
    return flat(static_cast<int>(n));
  }
  if (kind == "sphere") return sphere(parse_number(rest, selector));
  if (kind == "torus") {
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw ValidationError("bad metric selector: " + selector);
    return torus(parse_number(rest.substr(0, comma), selector),
                 parse_number(rest.substr(comma + 1), selector));
  }
  throw ValidationError("bad metric selector: " + selector);
}

std::string MetricModel::selector() const {
  switch (kind_) {
    case Kind::Flat: return "flat:" + std::to_string(leaf_dim_);
    case Kind::Sphere: return "sphere:" + fmt(radius_);
    case Kind::Torus: return "torus:" + fmt(periods_[0]) + "," + fmt(periods_[1]);
  }
  return {};
}

double MetricModel::injectivity_radius() const {
  switch (kind_) {
    case Kind::Flat: return INFINITY;
    case Kind::Sphere: return std::numbers::pi * radius_;
    case Kind::Torus: return 0.5 * std::min(periods_[0], periods_[1]);
  }
  return 0.0;
}

double MetricModel::convexity_radius() const {
  switch (kind_) {
    case Kind::Flat: return INFINITY;
    case Kind::Sphere: return 0.5 * std::numbers::pi * radius_;
    case Kind::Torus: return 0.25 * std::min(periods_[0], periods_[1]);
  }
  return 0.0;
}

Vector MetricModel::normalize(const Vector& p) const {
  switch (kind_) {
    case Kind::Flat: return p;
    case Kind::Sphere: {
      const double r = norm(p);
      if (r == 0.0) throw OutOfChart("zero vector is not a sphere point");
      return scale(p, radius_ / r);
    }
    case Kind::Torus: return {wrap(p[0], periods_[0]), wrap(p[1], periods_[1])};
  }
  return p;
}

double MetricModel::distance(const Vector& x, const Vector& y) const {
  switch (kind_) {
    case Kind::Flat: return dist(x, y);
    case Kind::Sphere: return radius_ * std::atan2(norm(cross(x, y)), dot(x, y));
    case Kind::Torus: {
      const double a = min_image(y[0] - x[0], periods_[0]);
      const double b = min_image(y[1] - x[1], periods_[1]);
      return std::hypot(a, b);
    }
  }
  return 0.0;
}

Vector MetricModel::exp(const Vector& x, const Vector& v) const {
  switch (kind_) {
    case Kind::Flat: return add(x, v);
    case Kind::Sphere: {
      const Vector xh = scale(x, 1.0 / radius_);
      const Vector t = axpy(-dot(v, xh), xh, v);
      const double s = norm(t);
      if (s == 0.0) return x;
      const double th = s / radius_;
      return add(scale(x, std::cos(th)), scale(t, radius_ * std::sin(th) / s));
    }
    case Kind::Torus: return normalize(add(x, v));
  }
  return x;
}

Vector MetricModel::log(const Vector& x, const Vector& y) const {
  switch (kind_) {
    case Kind::Flat: return sub(y, x);
    case Kind::Sphere: {
      const Vector xh = scale(x, 1.0 / radius_);
      const Vector yh = scale(y, 1.0 / radius_);
      const double c = dot(xh, yh);
      const Vector w = axpy(-c, xh, yh);
      const double sn = norm(w);
      const double th = std::atan2(sn, c);
      if (th > std::numbers::pi * (1.0 - 1e-9)) throw OutOfChart("log at antipodal point");
      if (sn == 0.0) return Vector(3, 0.0);
      return scale(w, radius_ * th / sn);
    }
    case Kind::Torus:
      return {min_image(y[0] - x[0], periods_[0]), min_image(y[1] - x[1], periods_[1])};
  }
  return {};
}

Vector MetricModel::geodesic_point(const Vector& a, const Vector& b, double s) const {
  if (kind_ == Kind::Flat) return axpy(s, sub(b, a), a);
  return exp(a, scale(log(a, b), s));
}

Vector MetricModel::transport(const Vector& x, const Vector& y, const Vector& v) const {
  if (kind_ != Kind::Sphere) return v;
  const Vector xh = scale(x, 1.0 / radius_);
  const Vector yh = scale(y, 1.0 / radius_);
  Vector k = cross(xh, yh);
  const double sn = norm(k);
  const double c = dot(xh, yh);
  if (sn < 1e-300) {
    if (c > 0.0) return v;
    throw OutOfChart("transport between antipodal points");
  }
  k = scale(k, 1.0 / sn);
  const double th = std::atan2(sn, c);
  const double ct = std::cos(th), st = std::sin(th);
  return add(add(scale(v, ct), scale(cross(k, v), st)), scale(k, dot(k, v) * (1.0 - ct)));
}

double MetricModel::ball_volume(double s) const {
  if (kind_ == Kind::Sphere)
    return 2.0 * std::numbers::pi * radius_ * radius_ * (1.0 - std::cos(s / radius_));
  return unit_ball_volume(leaf_dim_) * std::pow(s, leaf_dim_);
}

Frame default_frame(const MetricModel& m, const Vector& x) {
  if (m.kind() != MetricModel::Kind::Sphere) return Frame{x, identity(m.leaf_dim())};
  const Vector xh = scale(x, 1.0 / norm(x));
  // Project the two coordinate axes least aligned with x.
  std::vector<int> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(xh[a]) < std::abs(xh[b]); });
  std::vector<Vector> axes;
  for (int j = 0; j < 2; ++j) {
    Vector e(3, 0.0);
    e[order[j]] = 1.0;
    e = axpy(-dot(e, xh), xh, e);
    for (const auto& a : axes) e = axpy(-dot(e, a), a, e);
    axes.push_back(scale(e, 1.0 / norm(e)));
  }
  return Frame{x, axes};
}

double geodesic_distance(const MetricModel& m, const Vector& x, const Vector& y) {
  return m.distance(x, y);
}

Vector exp_frame(const MetricModel& m, const Frame& f, const Vector& a) {
  Vector v(m.ambient_dim(), 0.0);
  for (std::size_t i = 0; i < f.axes.size(); ++i) v = axpy(a[i], f.axes[i], v);
  return m.exp(f.base, v);
}

Vector log_frame(const MetricModel& m, const Frame& f, const Vector& y) {
  const Vector v = m.log(f.base, y);
  Vector a(f.axes.size());
  for (std::size_t i = 0; i < f.axes.size(); ++i) a[i] = dot(v, f.axes[i]);
  return a;
}

Vector chart(const MetricModel& m, const Frame& f, const Vector& p) {
  if (m.kind() != MetricModel::Kind::Sphere) return log_frame(m, f, p);
  const double R = m.radius();
  const Vector b = scale(f.base, 1.0 / R);
  const Vector ph = scale(p, 1.0 / R);
  const double c = dot(ph, b);
  if (c <= -1.0 + 1e-12) throw OutOfChart("chart undefined at antipode");
  const Vector t = axpy(-c, b, ph);
  Vector y(2);
  for (int i = 0; i < 2; ++i) y[i] = 2.0 * R * dot(t, f.axes[i]) / (1.0 + c);
  return y;
}

Vector chart_inverse(const MetricModel& m, const Frame& f, const Vector& y) {
  if (m.kind() != MetricModel::Kind::Sphere) return exp_frame(m, f, y);
  const double R = m.radius();
  const double rho = norm(y);
  if (rho == 0.0) return f.base;
  const double th = 2.0 * std::atan(rho / (2.0 * R));
  Vector u(3, 0.0);
  for (int i = 0; i < 2; ++i) u = axpy(y[i] / rho, f.axes[i], u);
  return add(scale(f.base, std::cos(th)), scale(u, R * std::sin(th)));
}

double normal_metric_deviation(const MetricModel& m, const Vector& a) {
  if (m.kind() != MetricModel::Kind::Sphere) return 0.0;
  const double r = norm(a);
  if (r == 0.0) return 0.0;
  const double R = m.radius();
  const double s = R * std::sin(r / R) / r;
  const double mu = s * s;  // tangential eigenvalue; radial eigenvalue is 1
  // g = I + (mu - 1)(I - a a^T / r^2)
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double p = (j == k ? 1.0 : 0.0) - a[j] * a[k] / (r * r);
      worst = std::max(worst, std::abs((mu - 1.0) * p));
    }
  return worst;
}

DistortionReport check_approx_euclidean(const MetricModel& m, const Frame& f, double lambda,
                                        double eps, int sample_count, std::uint64_t seed) {
  const int n = m.leaf_dim();
  Rng rng(seed);
  DistortionReport rep;
  for (int i = 0; i < sample_count; ++i) {
    const Vector a = (i % 4 == 0) ? scale(random_unit(rng, n), lambda) : random_in_ball(rng, n, lambda);
    rep.metric_deviation = std::max(rep.metric_deviation, normal_metric_deviation(m, a));
    const double na = norm(a);
    if (na > 0.0) {
      const double d = m.distance(exp_frame(m, f, a), chart_inverse(m, f, a));
      rep.geodesic_deviation = std::max(rep.geodesic_deviation, d / na);
    }
    const Vector a1 = (i % 4 == 1) ? scale(random_unit(rng, n), lambda) : random_in_ball(rng, n, lambda);
    const Vector p0 = exp_frame(m, f, a);
    const Vector p1 = exp_frame(m, f, a1);
    const double d01 = m.distance(p0, p1);
    if (d01 > 0.0) {
      const Vector y0 = chart(m, f, p0);
      const Vector y1 = chart(m, f, p1);
      for (int k = 1; k < 8; ++k) {
        const double t = k / 8.0;
        const Vector sigma = m.geodesic_point(p0, p1, t);
        const Vector tau = chart_inverse(m, f, axpy(t, sub(y1, y0), y0));
        rep.chord_deviation = std::max(rep.chord_deviation, m.distance(sigma, tau) / d01);
      }
    }
  }
  const double omega = unit_ball_volume(n);
  for (int k = 1; k <= 16; ++k) {
    const double s = lambda * k / 16.0;
    const double sn = std::pow(s, n);
    rep.volume_deviation = std::max(rep.volume_deviation, std::abs(omega * sn - m.ball_volume(s)) / sn);
  }
  rep.cond1 = rep.metric_deviation <= eps / (n * n);
  rep.cond2 = rep.geodesic_deviation <= eps;
  rep.cond3 = rep.chord_deviation <= eps;
  rep.cond4 = rep.volume_deviation <= eps;
  rep.passed = rep.cond1 && rep.cond2 && rep.cond3 && rep.cond4;
  return rep;
}

double find_lambda_eps(const MetricModel& m, double eps, double cap) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (m.kind() == MetricModel::Kind::Flat) return cap;
  const double hi = std::min(cap, 0.5 * m.convexity_radius());
  // Below this floor the sphere audit is dominated by rounding; every
  // deviation is quadratic in lambda at leading order, so scale from eps_ref.
  constexpr double kEpsFloor = 1e-6, kEpsRef = 1e-4;
  if (m.kind() == MetricModel::Kind::Sphere && eps < kEpsFloor)
    return std::min(hi, 0.9 * std::sqrt(eps / kEpsRef) * find_lambda_eps(m, kEpsRef, cap));
  std::vector<Frame> frames;
  if (m.kind() == MetricModel::Kind::Torus) {
    frames.push_back(default_frame(m, {0.0, 0.0}));
  } else {
    const double R = m.radius();
    const std::vector<Vector> bases = {{0.0, 0.0, R}, {R, 0.0, 0.0}, scale({0.6, -0.48, 0.64}, R)};
    for (const auto& b : bases) {
      Frame fr = default_frame(m, b);
      frames.push_back(fr);
      const double c = std::cos(0.7), s = std::sin(0.7);
      frames.push_back(Frame{b, {axpy(s, fr.axes[1], scale(fr.axes[0], c)),
                                 axpy(c, fr.axes[1], scale(fr.axes[0], -s))}});
    }
  }
  auto passes = [&](double lambda) {
    for (std::size_t i = 0; i < frames.size(); ++i)
      if (!check_approx_euclidean(m, frames[i], lambda, 0.5 * eps, 400, 1000 + i).passed) return false;
    return true;
  };
  if (passes(hi)) return hi;
  double lo = 0.0, up = hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + up);
    (passes(mid) ? lo : up) = mid;
  }
  return lo;
}

bool check_eps_isometry(const MetricModel& m, const std::function<Vector(const Vector&)>& map,
                        const std::vector<Vector>& samples, double eps) {
  std::vector<Vector> img;
  img.reserve(samples.size());
  for (const auto& s : samples) img.push_back(map(s));
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      if (std::abs(m.distance(img[i], img[j]) - m.distance(samples[i], samples[j])) > eps) return false;
  return true;
}

GramSchmidtResult gram_schmidt_correct(const std::vector<Vector>& near, const InnerProduct& inner) {
  const InnerProduct ip = inner ? inner : InnerProduct([](const Vector& a, const Vector& b) { return dot(a, b); });
  const std::size_t n = near.size();
  bool exact = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(std::sqrt(ip(near[i], near[i])) - 1.0) >= kGramSchmidtDelta)
      throw IllConditioned("frame vector norm outside tolerance");
    for (std::size_t j = 0; j < n; ++j) {
      const double g = ip(near[i], near[j]);
      if (i != j && std::abs(g) >= kGramSchmidtDelta) throw IllConditioned("frame vectors far from orthogonal");
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-15) exact = false;
    }
  }
  if (exact) return GramSchmidtResult{near, 0.0};
  GramSchmidtResult out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector v = near[i];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : out.axes) v = axpy(-ip(v, e), e, v);
    v = scale(v, 1.0 / std::sqrt(ip(v, v)));
    const Vector d = sub(v, near[i]);
    out.deviation = std::max(out.deviation, std::sqrt(ip(d, d)));
    out.axes.push_back(std::move(v));
  }
  return out;
}

double gram_schmidt_delta(int n, double eps, std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  auto sup_dev = [&](double delta) {
    Rng rng(seed);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
      std::vector<Vector> f = identity(n);
      for (int j = 0; j < n; ++j) {
        const Vector e = random_unit(rng, n);
        const double len = (s % 2 == 0 ? 1.0 : rng.uniform()) * delta / 3.0;
        f[j] = axpy(len, e, f[j]);
      }
      worst = std::max(worst, gram_schmidt_correct(f).deviation);
    }
    return worst;
  };
  double lo = std::log(1e-300), hi = std::log(kGramSchmidtDelta);
  if (sup_dev(kGramSchmidtDelta * 0.999) <= eps) return 0.5 * kGramSchmidtDelta * 0.999;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sup_dev(std::exp(mid)) <= eps ? lo : hi) = mid;
  }
  return 0.5 * std::exp(lo);
}

Frame align_frame(const MetricModel& m, const Frame& f, const Vector& y) {
  if (m.is_flat()) return Frame{y, f.axes};
  std::vector<Vector> moved;
  for (const auto& a : f.axes) moved.push_back(m.transport(f.base, y, a));
  return Frame{y, gram_schmidt_correct(moved).axes};
}

double align_deviation(const MetricModel& m, const Frame& f, const Frame& g, double radius,
                       int samples, std::uint64_t seed) {
  Rng rng(seed);
  const Vector xi = log_frame(m, f, g.base);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector a = random_in_ball(rng, m.leaf_dim(), radius);
    const Vector psi = log_frame(m, g, exp_frame(m, f, add(a, xi)));
    worst = std::max(worst, dist(psi, a));
  }
  return worst;
}

std::vector<std::pair<double, VarDiv>> var_div_profile(const TransportFamily& fam) {
  const std::size_t P = fam.param_count, N = fam.base.size();
  std::vector<std::vector<Vector>> moved(P, std::vector<Vector>(N));
  std::vector<std::vector<Vector>> disp(P, std::vector<Vector>(N));
  parallel_for(P, [&](std::size_t t) {
    for (std::size_t i = 0; i < N; ++i) {
      disp[t][i] = fam.displacement(t, i);
      moved[t][i] = fam.metric.exp(fam.base[i], disp[t][i]);
    }
  });
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (fam.metric.distance(fam.base[i], fam.base[j]) <= fam.pair_radius) pairs.emplace_back(i, j);
  std::vector<std::pair<std::size_t, std::size_t>> params;
  for (std::size_t t = 0; t < P; ++t)
    for (std::size_t u = t + 1; u < P; ++u) params.emplace_back(t, u);
  std::vector<VarDiv> per(params.size());
  parallel_for(params.size(), [&](std::size_t k) {
    const auto [t, u] = params[k];
    VarDiv vd;
    for (const auto& [i, j] : pairs) {
      const double dt = fam.metric.distance(moved[t][i], moved[t][j]);
      const double du = fam.metric.distance(moved[u][i], moved[u][j]);
      vd.var = std::max(vd.var, std::abs(dt - du));
      const Vector w = sub(sub(disp[t][i], disp[u][i]), sub(disp[t][j], disp[u][j]));
      vd.div = std::max(vd.div, norm(w));
    }
    per[k] = vd;
  });
  std::map<double, VarDiv> by_dist;
  by_dist[0.0] = VarDiv{};
  for (std::size_t k = 0; k < params.size(); ++k) {
    VarDiv& slot = by_dist[fam.param_distance(params[k].first, params[k].second)];
    slot.var = std::max(slot.var, per[k].var);
    slot.div = std::max(slot.div, per[k].div);
  }
  std::vector<std::pair<double, VarDiv>> out;
  VarDiv run;
  for (const auto& [d, vd] : by_dist) {
    run.var = std::max(run.var, vd.var);
    run.div = std::max(run.div, vd.div);
    out.emplace_back(d, run);
  }
  return out;
}

VarDiv estimate_var_div(const TransportFamily& fam, double r) {
  VarDiv out;
  for (const auto& [d, vd] : var_div_profile(fam))
    if (d <= r) out = vd;
  return out;
}

}  // namespace delone
