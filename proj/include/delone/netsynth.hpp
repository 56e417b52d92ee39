#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "delone/constants.hpp"
#include "delone/rng.hpp"
#include "delone/tessellation.hpp"

namespace delone {

struct PartialTransversal {
  std::vector<Vector> xi;  // creation order
  std::vector<int> theta;  // chart index per point
  bool complete = false;
};

// Finite stand-in for the transversal: depth-k binary strings with the
// 2^-(common prefix) ultrametric; each param carries one displacement per
// transversal index.
struct ParamFamily {
  int depth = 0;
  std::vector<std::string> params;
  std::map<std::string, std::vector<Vector>> fields;

  static double param_distance(const std::string& a, const std::string& b);
  std::size_t index_of(const std::string& p) const;
  double sup_norm(const std::string& p) const;
  TransportFamily transport(const Net& net, const MetricModel& m) const;
};

/// All 2^depth params; the all-zero param is the identity, every other param
/// gets a smooth field with sup-norm exactly sup over the net points.
ParamFamily make_family(const Net& net, int depth, double sup, std::uint64_t seed = 0);

/// Identity family plus one param moving a single vertex by distance shift.
ParamFamily make_adversarial_family(const Net& net, int depth, std::size_t vertex, double shift);

struct Annulus {
  CircumSphere sphere;
  std::vector<std::size_t> vertices;
  double width = 0.0;  // half-width of the excluded shell
};

struct Slab {
  std::vector<std::size_t> points;  // proper order; the patch is centered at the last
  double patch_radius = 0.0;
  double width = 0.0;
};

struct ForbiddenRegions {
  std::vector<Annulus> annuli;
  std::vector<Slab> slabs;
};

/// Candidate center for the next point. Throws RegionExhausted when K is
/// covered at d2'' up to the audit tolerance.
Vector propose_candidate(const Region& K, const PartialTransversal& net, const ConstantBundle& b);

/// Annuli of the empty-sphere n-simplices on Omega(xi') and slabs of every
/// patch spanned by at most n points of Omega(xi'). With active_only, keeps
/// only regions meeting B(xi', rF/200).
ForbiddenRegions forbidden_regions(const std::vector<Vector>& pts, const Vector& xi_prime,
                                   const ConstantBundle& b, bool active_only = false);

double distance_to_slab_patch(const std::vector<Vector>& pts, const Slab& s, const Vector& x);
bool in_forbidden(const std::vector<Vector>& pts, const ForbiddenRegions& f, const Vector& x);

/// Monte-Carlo fraction of B(xi', rF/200) covered by the regions.
double forbidden_fraction(const std::vector<Vector>& pts, const ForbiddenRegions& f,
                          const Vector& xi_prime, double radius, int samples, std::uint64_t seed = 0);

/// Uniform rejection sample in B(xi', radius) avoiding the regions and
/// satisfying extra_ok; grid scan after 10^4 rejections. Throws SelectionFailed.
Vector select_point(const Vector& xi_prime, double radius, const std::vector<Vector>& pts,
                    const ForbiddenRegions& f, Rng& rng,
                    const std::function<bool(const Vector&)>& extra_ok = {});

struct SynthesisResult {
  Net net;
  PartialTransversal transversal;
  std::size_t fallback_selections = 0;
};

/// Inductive construction on K (flat leaves). Output net has d1 = d1', d2 = d2'.
SynthesisResult synthesize_net(const Region& K, const ConstantBundle& b, std::uint64_t seed);

Net translate_net(const Net& net, const std::string& param, const ParamFamily& fam, const MetricModel& m);

struct Witness {
  std::vector<std::size_t> simplex;
  std::string param;
  std::string quantity;
  double margin = 0.0;
};

struct SimplexCertificate {
  std::vector<std::size_t> vertices;
  double robustness = 0.0;          // min over params, proper order
  double base_clearance = 0.0;      // min extra-point distance minus radius, base leaf
  double translated_clearance = 0.0;
  double center_drift = 0.0;        // max over params
  double radius_drift = 0.0;
  bool pass = true;
};

struct StabilityCertificate {
  bool pass = true;
  Witness worst;
  std::vector<SimplexCertificate> per_simplex;
  std::map<std::string, bool> combinatorics;  // param -> identical simplex set
  double rho_threshold = 0.0, base_clearance_threshold = 0.0, translated_clearance_threshold = 0.0;
  double center_drift_limit = 0.0, radius_drift_limit = 0.0;
};

StabilityCertificate certify_family_stability(const Net& net, const DelaunayComplex& c,
                                              const ParamFamily& fam, const ConstantBundle& b,
                                              const MetricModel& m);

struct ProductReport {
  std::size_t samples = 0;
  std::size_t params = 0;
  std::size_t classes = 0;
  bool class_sizes_ok = true;
  bool injective = true;
  double min_image_separation = 0.0;
  std::size_t face_pairs = 0;
  double max_face_gap = 0.0;
  bool coverage_ok = true;
  // phi[s][t]: image of sample s under param t
  std::vector<Vector> sample_points;
  std::vector<std::vector<Vector>> phi;
};

/// Builds Phi(y, t) on a grid x grid sample of K for the listed params.
/// Throws CoverageGap when a sample lies outside every cone of an interior site.
ProductReport build_product_structure(const Region& K, const Net& net, const DelaunayComplex& c,
                                      const ParamFamily& fam, const std::vector<std::string>& params,
                                      const MetricModel& m, int grid);

}  // namespace delone
