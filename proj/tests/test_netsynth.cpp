#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "delone/errors.hpp"
#include "delone/netsynth.hpp"
#include "delone/robustness.hpp"
#include "oracle.hpp"

using namespace delone;

namespace {

const MetricModel kFlat2 = MetricModel::flat(2);

const ConstantBundle& bundle_rf(double rF) {
  static std::map<double, ConstantBundle> cache;
  auto it = cache.find(rF);
  if (it == cache.end()) {
    BundleRequest r;
    r.n = 2;
    r.dFU = rF;
    it = cache.emplace(rF, make_bundle(r)).first;
  }
  return it->second;
}

const SynthesisResult& small_synthesis() {
  static const SynthesisResult res = synthesize_net(Region::box({0, 0}, {3, 3}), bundle_rf(1.0), 7);
  return res;
}

PartialTransversal partial(const std::vector<Vector>& xi) {
  PartialTransversal p;
  p.xi = xi;
  p.theta.assign(xi.size(), 0);
  return p;
}

}  // namespace

TEST(ParamFamily, Ultrametric) {
  EXPECT_EQ(ParamFamily::param_distance("0101", "0101"), 0.0);
  EXPECT_EQ(ParamFamily::param_distance("0101", "1101"), 1.0);
  EXPECT_EQ(ParamFamily::param_distance("0101", "0111"), 0.25);
  EXPECT_EQ(ParamFamily::param_distance("0101", "0100"), 0.125);
}

TEST(ParamFamily, SmoothFamilyShape) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const ParamFamily f = make_family(res.net, 4, b.eps0 * b.rF, 3);
  ASSERT_EQ(f.params.size(), 16u);
  EXPECT_EQ(f.params.front(), "0000");
  EXPECT_EQ(f.sup_norm("0000"), 0.0);
  for (const auto& p : f.params) {
    if (p == "0000") continue;
    EXPECT_NEAR(f.sup_norm(p), b.eps0 * b.rF, 1e-12 * b.eps0);
  }
}

TEST(ProposeCandidate, EmptyNet) {
  const auto& b = bundle_rf(0.05);
  const Region K = Region::box({0, 0}, {1, 1});
  const Vector c = propose_candidate(K, partial({}), b);
  EXPECT_GE(K.clearance(c), b.rF / 200);
}

TEST(ProposeCandidate, OnePointNet) {
  const auto& b = bundle_rf(0.05);
  const Region K = Region::box({0, 0}, {1, 1});
  const Vector p = {0.5, 0.5};
  const Vector c = propose_candidate(K, partial({p}), b);
  const double d = dist(c, p);
  EXPECT_GT(d, b.d1pp() + b.rF / 200);
  EXPECT_LT(d, b.d2pp() - b.rF / 200);
  EXPECT_GE(K.clearance(c), b.rF / 200);
}

TEST(ProposeCandidate, CompleteNetExhausted) {
  const auto& b = bundle_rf(1.0);
  const Region K = Region::disk({0, 0}, 0.9 * b.d2pp());
  EXPECT_THROW(propose_candidate(K, partial({{0, 0}}), b), RegionExhausted);
}

TEST(ForbiddenRegions, EmptyOmega) {
  const auto f = forbidden_regions({}, {0, 0}, bundle_rf(1.0));
  EXPECT_TRUE(f.annuli.empty());
  EXPECT_TRUE(f.slabs.empty());
}

TEST(ForbiddenRegions, OneTriangle) {
  const std::vector<Vector> pts = {{0, 0}, {0.15, 0}, {0.075, 0.13}};
  const auto f = forbidden_regions(pts, {0.075, 0.3}, bundle_rf(1.0));
  EXPECT_EQ(f.annuli.size(), 1u);
  std::size_t pairs = 0, singles = 0;
  for (const auto& s : f.slabs) (s.points.size() == 2 ? pairs : singles)++;
  EXPECT_EQ(pairs, 3u);
  EXPECT_EQ(singles, 3u);
}

TEST(ForbiddenRegions, VolumeAuditBelowHalf) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const Region K = Region::box({0, 0}, {3, 3});
  for (std::size_t keep : {res.net.points.size() / 3, res.net.points.size() / 2, res.net.points.size() - 5}) {
    const std::vector<Vector> xi(res.net.points.begin(), res.net.points.begin() + static_cast<long>(keep));
    const Vector c = propose_candidate(K, partial(xi), b);
    const auto f = forbidden_regions(xi, c, b);
    EXPECT_LT(forbidden_fraction(xi, f, c, b.rF / 200, 2000, 5), 0.5);
  }
}

TEST(SelectPoint, NoForbiddenAndDeterministic) {
  Rng a(9), b(9);
  const Vector x = select_point({1, 1}, 0.01, {}, {}, a);
  const Vector y = select_point({1, 1}, 0.01, {}, {}, b);
  EXPECT_EQ(x, y);
  EXPECT_LE(dist(x, {1, 1}), 0.01);
}

TEST(SelectPoint, ClearsAllRegions) {
  const auto& b = bundle_rf(1.0);
  const std::vector<Vector> pts = {{0, 0}, {0.15, 0}, {0.075, 0.13}};
  // Candidate ball straddling the annulus and two slabs; widen them to make the test bite.
  const Vector xi = {0.075, 0.13 + 0.002};
  ForbiddenRegions f = forbidden_regions(pts, xi, b);
  for (auto& a : f.annuli) a.width = 1e-3;
  for (auto& s : f.slabs) s.width = 1e-3;
  Rng rng(10);
  for (int t = 0; t < 50; ++t) {
    const Vector x = select_point(xi, b.rF / 200, pts, f, rng);
    for (const auto& a : f.annuli) EXPECT_GE(std::abs(dist(x, a.sphere.center) - a.sphere.radius), a.width);
    for (const auto& s : f.slabs) EXPECT_GE(distance_to_slab_patch(pts, s, x), s.width);
  }
}

TEST(Synthesize, SingleBallGivesOnePoint) {
  const auto& b = bundle_rf(1.0);
  const auto res = synthesize_net(Region::disk({2, 3}, b.d2pp()), b, 1);
  ASSERT_EQ(res.net.points.size(), 1u);
  EXPECT_EQ(res.net.points[0], (Vector{2, 3}));
  EXPECT_TRUE(res.transversal.complete);
}

TEST(Synthesize, SmallBoxAudits) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const NetAudit a = audit_net(res.net, kFlat2, b.rF / 100, b.rF);
  EXPECT_GE(a.min_separation, 0.114 * b.rF);
  EXPECT_LE(a.max_gap, 0.181 * b.rF);
  const double ball = std::numbers::pi * std::pow(b.d1p() / 2, 2);
  EXPECT_LE(static_cast<double>(res.net.points.size()), 9.0 / ball + 4 * 3.0 / b.d1p());
}

TEST(Synthesize, DeterministicGivenSeed) {
  const auto& b = bundle_rf(1.0);
  const Region K = Region::box({0, 0}, {1.5, 1.5});
  EXPECT_EQ(synthesize_net(K, b, 3).net.points, synthesize_net(K, b, 3).net.points);
  EXPECT_NE(synthesize_net(K, b, 3).net.points, synthesize_net(K, b, 4).net.points);
}

TEST(Synthesize, RejectsDimensionMismatch) {
  EXPECT_THROW(synthesize_net(Region::box({0, 0, 0}, {1, 1, 1}), bundle_rf(1.0), 0), ValidationError);
}

TEST(Synthesize, ConstructionMargins) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const DelaunayComplex c = build_delaunay(res.net, kFlat2);
  ASSERT_TRUE(c.regular);
  for (const auto& s : c.top()) {
    EXPECT_GE(robustness_of(simplex_points(res.net, s)).rho, 1.5 * b.eps2 * b.rF);
    for (std::size_t j = 0; j < res.net.points.size(); ++j) {
      if (std::binary_search(s.vertices.begin(), s.vertices.end(), j)) continue;
      EXPECT_GE(dist(res.net.points[j], s.sphere.center), s.sphere.radius + 2 * b.eps1 * b.rF);
    }
  }
  EXPECT_TRUE(check_duality(res.net, c, kFlat2).ok());
}

TEST(TranslateNet, IdentityAndRigidShift) {
  const auto& res = small_synthesis();
  ParamFamily f;
  f.depth = 1;
  f.params = {"0", "1"};
  f.fields["0"] = std::vector<Vector>(res.net.points.size(), Vector{0, 0});
  f.fields["1"] = std::vector<Vector>(res.net.points.size(), Vector{0.25, -0.5});
  EXPECT_EQ(translate_net(res.net, "0", f, kFlat2).points, res.net.points);
  const Net moved = translate_net(res.net, "1", f, kFlat2);
  for (std::size_t i = 0; i < moved.points.size(); ++i)
    EXPECT_EQ(moved.points[i], add(res.net.points[i], {0.25, -0.5}));
  EXPECT_THROW(translate_net(res.net, "2", f, kFlat2), ValidationError);
}

TEST(TranslateNet, PairwiseDistancesWithinTwoEps0) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const ParamFamily f = make_family(res.net, 3, b.eps0 * b.rF, 1);
  for (const auto& p : f.params) {
    const Net m = translate_net(res.net, p, f, kFlat2);
    for (std::size_t i = 0; i < m.points.size(); i += 5)
      for (std::size_t j = i + 1; j < m.points.size(); j += 11)
        EXPECT_LE(std::abs(dist(m.points[i], m.points[j]) - dist(res.net.points[i], res.net.points[j])),
                  2 * b.eps0 * b.rF * (1 + 1e-9));
  }
}

TEST(Certify, IdentityFamilyZeroDrift) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const DelaunayComplex c = build_delaunay(res.net, kFlat2);
  const auto cert = certify_family_stability(res.net, c, make_family(res.net, 2, 0.0), b, kFlat2);
  EXPECT_TRUE(cert.pass);
  for (const auto& s : cert.per_simplex) {
    EXPECT_EQ(s.center_drift, 0.0);
    EXPECT_EQ(s.radius_drift, 0.0);
  }
}

TEST(Certify, SmoothFamilyPasses) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const DelaunayComplex c = build_delaunay(res.net, kFlat2);
  const auto cert = certify_family_stability(res.net, c, make_family(res.net, 4, b.eps0 * b.rF, 2), b, kFlat2);
  EXPECT_TRUE(cert.pass);
  EXPECT_EQ(cert.combinatorics.size(), 16u);
  for (const auto& s : cert.per_simplex) {
    EXPECT_LE(s.center_drift, b.eps3 * b.rF / 2);
    EXPECT_LE(s.radius_drift, b.eps3 * b.rF);
  }
}

TEST(Certify, AdversarialFamilyNamesWitness) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const DelaunayComplex c = build_delaunay(res.net, kFlat2);
  const std::size_t v = 0;  // the first site sits at the centre of K
  const auto cert = certify_family_stability(res.net, c, make_adversarial_family(res.net, 2, v, 10 * b.d1()), b, kFlat2);
  EXPECT_FALSE(cert.pass);
  EXPECT_EQ(cert.worst.quantity, "combinatorics");
  EXPECT_EQ(cert.worst.param, "11");
  EXPECT_TRUE(std::binary_search(cert.worst.simplex.begin(), cert.worst.simplex.end(), v));
  EXPECT_LT(cert.worst.margin, 0.0);
}

TEST(Product, IdentityFamilyIsIdentity) {
  const auto& res = small_synthesis();
  const DelaunayComplex c = build_delaunay(res.net, kFlat2);
  const ParamFamily f = make_family(res.net, 2, 0.0);
  const Region K = Region::box({1, 1}, {2, 2});
  const auto rep = build_product_structure(K, res.net, c, f, f.params, kFlat2, 10);
  EXPECT_EQ(rep.samples, 100u);
  for (std::size_t s = 0; s < rep.samples; ++s) {
    ASSERT_EQ(rep.phi[s].size(), 4u);
    for (const auto& img : rep.phi[s]) EXPECT_LE(dist(img, rep.sample_points[s]), 1e-12);
  }
}

TEST(Product, ClassesAndFaceAgreement) {
  const auto& res = small_synthesis();
  const auto& b = bundle_rf(1.0);
  const DelaunayComplex c = build_delaunay(res.net, kFlat2);
  const ParamFamily f = make_family(res.net, 2, b.eps0 * b.rF, 4);
  const auto rep = build_product_structure(Region::box({1, 1}, {2, 2}), res.net, c, f, f.params, kFlat2, 12);
  EXPECT_TRUE(rep.class_sizes_ok);
  EXPECT_TRUE(rep.injective);
  EXPECT_GT(rep.face_pairs, 0u);
  EXPECT_LE(rep.max_face_gap, 1e-9 * b.rF);
  for (const auto& cls : rep.phi) EXPECT_EQ(cls.size(), 4u);
}

TEST(Product, CoverageGapOutsideInteriorCones) {
  const auto& res = small_synthesis();
  const DelaunayComplex c = build_delaunay(res.net, kFlat2);
  const ParamFamily f = make_family(res.net, 1, 0.0);
  EXPECT_THROW(build_product_structure(Region::box({-0.5, -0.5}, {3.5, 3.5}), res.net, c, f, f.params, kFlat2, 20),
               CoverageGap);
}
