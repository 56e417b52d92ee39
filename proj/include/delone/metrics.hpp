#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "delone/linalg.hpp"

namespace delone {

// Leaf geometries with closed-form exp/log/distance.
//   Flat(n):        points in R^n.
//   Sphere(R):      points are R^3 vectors of norm R; leaf dimension 2.
//   Torus(p1, p2):  points in [0,p1) x [0,p2).
class MetricModel {
 public:
  enum class Kind { Flat, Sphere, Torus };

  static MetricModel flat(int n);
  static MetricModel sphere(double radius);
  static MetricModel torus(double p1, double p2);

  /// Parses "flat:<n>", "sphere:<R>", "torus:<p1>,<p2>".
  static MetricModel parse(const std::string& selector);
  std::string selector() const;

  Kind kind() const { return kind_; }
  int leaf_dim() const { return leaf_dim_; }
  int ambient_dim() const { return kind_ == Kind::Sphere ? 3 : leaf_dim_; }
  double radius() const { return radius_; }
  const Vector& periods() const { return periods_; }
  bool is_flat() const { return kind_ != Kind::Sphere; }

  double injectivity_radius() const;
  double convexity_radius() const;

  /// Canonical representative (wraps torus, projects onto sphere).
  Vector normalize(const Vector& p) const;

  double distance(const Vector& x, const Vector& y) const;
  /// Exponential map with an ambient tangent vector.
  Vector exp(const Vector& x, const Vector& v) const;
  /// Inverse of exp. Throws OutOfChart beyond the injectivity radius.
  Vector log(const Vector& x, const Vector& y) const;
  /// Point at parameter s on the minimizing geodesic from a to b.
  Vector geodesic_point(const Vector& a, const Vector& b, double s) const;
  /// Parallel transport of v along the minimizing geodesic from x to y.
  Vector transport(const Vector& x, const Vector& y, const Vector& v) const;

  /// Volume of the geodesic ball of radius s (s below the injectivity radius).
  double ball_volume(double s) const;

 private:
  Kind kind_ = Kind::Flat;
  int leaf_dim_ = 2;
  double radius_ = 1.0;
  Vector periods_;
};

struct Frame {
  Vector base;
  std::vector<Vector> axes;  // ambient tangent vectors, orthonormal
};

/// A fixed reference frame at x (coordinate axes; sphere: projected axes).
Frame default_frame(const MetricModel& m, const Vector& x);

double geodesic_distance(const MetricModel& m, const Vector& x, const Vector& y);
Vector exp_frame(const MetricModel& m, const Frame& f, const Vector& a);
Vector log_frame(const MetricModel& m, const Frame& f, const Vector& y);

// Coordinate chart used for the approximate-Euclidean audit. Flat and torus
// use the affine chart; the sphere uses stereographic projection from the
// antipode, scaled so that the metric is the identity at the base.
Vector chart(const MetricModel& m, const Frame& f, const Vector& p);
Vector chart_inverse(const MetricModel& m, const Frame& f, const Vector& y);
/// Largest entry deviation |g_jk(a) - delta_jk| of the metric in geodesic
/// normal coordinates at a.
double normal_metric_deviation(const MetricModel& m, const Vector& a);

struct DistortionReport {
  double metric_deviation = 0.0;    // max |g_jk - delta_jk|
  double geodesic_deviation = 0.0;  // max d(exp a, x + a) / |a|
  double chord_deviation = 0.0;     // max d(sigma(t), tau(t)) / d(y0, y1)
  double volume_deviation = 0.0;    // max |Vol D(s) - Vol_g D(s)| / s^n
  bool cond1 = true, cond2 = true, cond3 = true, cond4 = true;
  bool passed = true;
};

DistortionReport check_approx_euclidean(const MetricModel& m, const Frame& f, double lambda,
                                        double eps, int sample_count, std::uint64_t seed = 0);

/// Largest lambda (up to cap) passing the audit at eps/2 over a grid of base
/// points and frames.
double find_lambda_eps(const MetricModel& m, double eps, double cap = 1.0);

bool check_eps_isometry(const MetricModel& m, const std::function<Vector(const Vector&)>& map,
                        const std::vector<Vector>& samples, double eps);

struct GramSchmidtResult {
  std::vector<Vector> axes;
  double deviation = 0.0;  // max_j |f_j - f'_j|
};

using InnerProduct = std::function<double(const Vector&, const Vector&)>;

/// Threshold on |f'_j| - 1 and off-diagonal products accepted by gram_schmidt_correct.
inline constexpr double kGramSchmidtDelta = 0.25;

/// Orthonormalizes a near-orthonormal frame. Throws IllConditioned beyond
/// kGramSchmidtDelta.
GramSchmidtResult gram_schmidt_correct(const std::vector<Vector>& near,
                                       const InnerProduct& inner = {});

/// Largest delta (halved for safety) such that every sampled delta-near frame
/// in R^n is moved by at most eps.
double gram_schmidt_delta(int n, double eps, std::uint64_t seed = 0);

/// Transports f along the geodesic to y and re-orthonormalizes.
Frame align_frame(const MetricModel& m, const Frame& f, const Vector& y);

/// Sup over sampled a in D(radius) of |Psi(a) - a|, where
/// Psi(a) = log_{y,g}(exp_{x,f}(a + xi)) and xi = log_{x,f}(y).
double align_deviation(const MetricModel& m, const Frame& f, const Frame& g, double radius,
                       int samples, std::uint64_t seed = 0);

// A finite family of transport maps: param t moves base point i to
// exp(base[i], displacement(t, i)).
struct TransportFamily {
  MetricModel metric = MetricModel::flat(2);
  std::vector<Vector> base;
  std::size_t param_count = 0;
  std::function<double(std::size_t, std::size_t)> param_distance;
  std::function<Vector(std::size_t, std::size_t)> displacement;
  double pair_radius = 1.0;  // point pairs compared when within this base distance
};

struct VarDiv {
  double var = 0.0;
  double div = 0.0;
};

VarDiv estimate_var_div(const TransportFamily& fam, double r);

/// Cumulative (var, div) at every distinct parameter distance, ascending.
std::vector<std::pair<double, VarDiv>> var_div_profile(const TransportFamily& fam);

}  // namespace delone
