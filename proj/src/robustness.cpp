#include "delone/robustness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "delone/errors.hpp"
#include "delone/rng.hpp"

namespace delone {

RobustnessReport robustness_of(const std::vector<Vector>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("robustness needs at least two points");
  RobustnessReport rep;
  rep.rho = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const std::vector<Vector> prefix(pts.begin(), pts.begin() + k + 1);
    const double d = distance_to_affine_span(pts[k + 1], prefix);
    rep.per_prefix_distance.push_back(d);
    rep.rho = std::min(rep.rho, d);
  }
  return rep;
}

namespace {

// Returns (delta_k, rho_k) for k = 0..m, with delta_0 = 0.
std::vector<std::pair<double, double>> recursion(double rho0, double eps, double e1, double e2, int m) {
  if (!(e1 > 0.0 && e1 < e2)) throw InvalidBudget("require 0 < e1 < e2");
  if (!(eps >= 0.0 && eps < e1 / 4.0)) throw InvalidBudget("require 0 <= eps < e1/4");
  if (!(rho0 > 0.0)) throw InvalidBudget("require rho0 > 0");
  if (m < 1) throw InvalidBudget("require m >= 1");
  const double e4 = 4.0 * (e2 + e1);
  std::vector<std::pair<double, double>> out{{0.0, rho0}};
  double sum = 0.0;
  for (int k = 1; k <= m; ++k) {
    double delta = 2.0;
    if (k >= 2) {
      if (k >= 3) {
        const auto [dk, rk] = out[k - 1];
        sum += (1.0 + dk) * e4 / rk;
      }
      delta = 2.0 + 4.0 * e4 / e1 + 2.0 * sum;
    }
    const double rho = rho0 - eps * delta;
    if (!(rho > 0.0)) throw InvalidBudget("rho_k became nonpositive");
    out.emplace_back(delta, rho);
  }
  return out;
}

}  // namespace

std::vector<double> rho_chain(double rho0, double eps, double e1, double e2, int m) {
  std::vector<double> out;
  for (const auto& [d, r] : recursion(rho0, eps, e1, e2, m)) out.push_back(r);
  return out;
}

double rho_m_recursion(double rho0, double eps, double e1, double e2, int m) {
  return recursion(rho0, eps, e1, e2, m).back().second;
}

double delta_m(double rho0, double eps, double e1, double e2, int m) {
  return recursion(rho0, eps, e1, e2, m).back().first;
}

namespace {

// Parallelogram area of a triangle on a circle of radius r at angles 0, t2, t3,
// or +inf when a side is shorter than e1 or r is out of range.
double triangle_area(const std::array<double, 3>& x, double e1, double e2) {
  const double r = x[0];
  if (!(r >= e1 / std::sqrt(3.0) && r <= e2)) return std::numeric_limits<double>::infinity();
  const double p[3][2] = {{r, 0.0}, {r * std::cos(x[1]), r * std::sin(x[1])},
                          {r * std::cos(x[2]), r * std::sin(x[2])}};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]) < e1)
        return std::numeric_limits<double>::infinity();
  const double ax = p[1][0] - p[0][0], ay = p[1][1] - p[0][1];
  const double bx = p[2][0] - p[0][0], by = p[2][1] - p[0][1];
  return std::abs(ax * by - ay * bx);
}

// Nelder-Mead with infeasible points rejected by an infinite objective.
std::pair<std::array<double, 3>, double> nelder_mead(std::array<double, 3> x0, double step,
                                                     double e1, double e2) {
  using P = std::array<double, 3>;
  auto f = [&](const P& x) { return triangle_area(x, e1, e2); };
  std::array<P, 4> s;
  std::array<double, 4> v;
  s[0] = x0;
  for (int i = 0; i < 3; ++i) {
    s[i + 1] = x0;
    s[i + 1][i] -= step * (i == 0 ? e2 : 1.0);
  }
  for (int i = 0; i < 4; ++i) v[i] = f(s[i]);
  for (int it = 0; it < 2000; ++it) {
    std::array<int, 4> idx = {0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    const int best = idx[0], worst = idx[3], second = idx[2];
    P c{0, 0, 0};
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) c[j] += s[idx[k]][j] / 3.0;
    auto along = [&](double t) {
      P p;
      for (int j = 0; j < 3; ++j) p[j] = c[j] + t * (s[worst][j] - c[j]);
      return p;
    };
    const P xr = along(-1.0);
    const double fr = f(xr);
    if (fr < v[best]) {
      const P xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) { s[worst] = xe; v[worst] = fe; } else { s[worst] = xr; v[worst] = fr; }
    } else if (fr < v[second]) {
      s[worst] = xr;
      v[worst] = fr;
    } else {
      const P xc = along(0.5);
      const double fc = f(xc);
      if (fc < v[worst]) {
        s[worst] = xc;
        v[worst] = fc;
      } else {
        for (int k = 1; k < 4; ++k) {
          const int i = idx[k];
          for (int j = 0; j < 3; ++j) s[i][j] = s[best][j] + 0.5 * (s[i][j] - s[best][j]);
          v[i] = f(s[i]);
        }
      }
    }
  }
  int b = 0;
  for (int i = 1; i < 4; ++i)
    if (v[i] < v[b]) b = i;
  return {s[b], v[b]};
}

}  // namespace

double v2_constant(double e1, double e2, std::uint64_t seed) {
  if (!(e1 > 0.0 && e1 < e2)) throw std::invalid_argument("require 0 < e1 < e2");
  static std::mutex mu;
  static std::map<std::tuple<double, double, std::uint64_t>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({e1, e2, seed});
    if (it != cache.end()) return it->second;
  }
  Rng rng(seed);
  constexpr double kTwoPi = 6.283185307179586;
  std::vector<std::pair<double, std::array<double, 3>>> feasible;
  for (int i = 0; i < 20000; ++i) {
    const std::array<double, 3> x = {rng.uniform(e1 / std::sqrt(3.0), e2), rng.uniform(0.0, kTwoPi),
                                     rng.uniform(0.0, kTwoPi)};
    const double a = triangle_area(x, e1, e2);
    if (std::isfinite(a)) feasible.emplace_back(a, x);
  }
  if (feasible.empty()) throw NoSolution("no feasible triangle sampled");
  std::sort(feasible.begin(), feasible.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = feasible.front().first;
  for (std::size_t k = 0; k < std::min<std::size_t>(8, feasible.size()); ++k) {
    for (double step : {0.05, 0.01}) {
      const auto [x, v] = nelder_mead(feasible[k].second, step, e1, e2);
      best = std::min(best, v);
    }
  }
  const double value = 0.9 * best;
  std::lock_guard<std::mutex> lock(mu);
  cache[{e1, e2, seed}] = value;
  return value;
}

namespace {

// Distance from q to exp_y(span(basis) restricted to |w| <= r_f), minimized
// over span coordinates starting from the linear projection.
double distance_to_geodesic_patch(const MetricModel& m, const Frame& f,
                                  const std::vector<Vector>& basis, const Vector& q, double r_f) {
  const Vector qa = log_frame(m, f, q);
  const std::size_t k = basis.size();
  Vector c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = dot(qa, basis[i]);
  auto point = [&](const Vector& coef) {
    Vector w(qa.size(), 0.0);
    for (std::size_t i = 0; i < k; ++i) w = axpy(coef[i], basis[i], w);
    const double len = norm(w);
    if (len > r_f) w = scale(w, r_f / len);
    return w;
  };
  if (m.is_flat()) return dist(qa, point(c));
  auto obj = [&](const Vector& coef) { return m.distance(q, exp_frame(m, f, point(coef))); };
  double best = obj(c);
  if (k == 0) return best;
  double step = 0.1 * (norm(qa) + 1e-300);
  while (step > 1e-15 * (norm(qa) + 1e-300)) {
    bool moved = false;
    for (std::size_t i = 0; i < k; ++i)
      for (double sgn : {1.0, -1.0}) {
        Vector t = c;
        t[i] += sgn * step;
        const double v = obj(t);
        if (v < best) {
          best = v;
          c = t;
          moved = true;
        }
      }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace

double metric_robustness(const std::vector<Vector>& pts, const MetricModel& m, double r_f) {
  if (pts.size() < 2) throw std::invalid_argument("robustness needs at least two points");
  if (m.kind() == MetricModel::Kind::Flat) return robustness_of(pts).rho;
  const double limit = r_f > 0.0 ? r_f : m.convexity_radius();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (m.distance(pts[i], pts[j]) >= std::min(limit, m.convexity_radius()))
        throw OutOfChart("points exceed the convexity radius");
  const Frame f0 = default_frame(m, pts[0]);
  double rho = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Frame fk = k == 0 ? f0 : align_frame(m, f0, pts[k]);
    std::vector<Vector> basis;
    for (std::size_t j = 0; j < k; ++j) {
      Vector v = log_frame(m, fk, pts[j]);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& e : basis) v = axpy(-dot(v, e), e, v);
      const double len = norm(v);
      if (len > 1e-13 * limit) basis.push_back(scale(v, 1.0 / len));
    }
    rho = std::min(rho, distance_to_geodesic_patch(m, fk, basis, pts[k + 1], limit));
  }
  return rho;
}

}  // namespace delone
