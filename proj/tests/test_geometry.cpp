#include <gtest/gtest.h>

#include <random>

#include "minsurf/geometry.hpp"
#include "minsurf/surface.hpp"

using namespace minsurf;

namespace {

// Moller-Trumbore segment/triangle test, an independent oracle: in general
// position two triangles meet iff an edge of one pierces the other.
bool segment_hits(const Vec3 &p, const Vec3 &q, const Triangle &t) {
  const Vec3 d = q - p;
  const Vec3 e1 = t[1] - t[0], e2 = t[2] - t[0];
  const Vec3 h = cross(d, e2);
  const double a = dot(e1, h);
  if (std::abs(a) < 1e-14) return false;
  const double f = 1.0 / a;
  const Vec3 s = p - t[0];
  const double u = f * dot(s, h);
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 qv = cross(s, e1);
  const double v = f * dot(d, qv);
  if (v < 0.0 || u + v > 1.0) return false;
  const double s_hit = f * dot(e2, qv);
  return s_hit >= 0.0 && s_hit <= 1.0;
}

bool oracle(const Triangle &a, const Triangle &b) {
  for (int k = 0; k < 3; ++k) {
    if (segment_hits(a[k], a[(k + 1) % 3], b) || segment_hits(b[k], b[(k + 1) % 3], a)) return true;
  }
  return false;
}

MeshGrid flat_grid(double z0, int n, double shift = 0.0) {
  MeshGrid g;
  g.r_values = linspace(0.0, 1.0, n);
  g.theta_values = linspace(0.0, 1.0, n);
  for (double x : g.r_values)
    for (double y : g.theta_values) g.points.push_back({x + shift, y, z0});
  g.z.resize(g.points.size());
  return g;
}

}  // namespace

TEST(Geometry, SimpleCases) {
  const Triangle a{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}};
  const Triangle pierce{Vec3{0.2, 0.2, -1}, Vec3{0.2, 0.2, 1}, Vec3{0.5, 0.9, 0.3}};
  const Triangle above{Vec3{0, 0, 1}, Vec3{1, 0, 1}, Vec3{0, 1, 1}};
  const Triangle far{Vec3{5, 5, -1}, Vec3{5, 5, 1}, Vec3{6, 5, 0}};
  EXPECT_TRUE(triangles_intersect(a, pierce));
  EXPECT_FALSE(triangles_intersect(a, above));
  EXPECT_FALSE(triangles_intersect(a, far));
  // Coplanar overlap and coplanar disjoint.
  const Triangle cop{Vec3{0.1, 0.1, 0}, Vec3{2, 0.1, 0}, Vec3{0.1, 2, 0}};
  const Triangle cop_far{Vec3{3, 3, 0}, Vec3{4, 3, 0}, Vec3{3, 4, 0}};
  EXPECT_TRUE(triangles_intersect(a, cop));
  EXPECT_FALSE(triangles_intersect(a, cop_far));
  // Sharing a single vertex counts as touching.
  const Triangle touch{Vec3{1, 0, 0}, Vec3{2, 0, 1}, Vec3{2, 1, -1}};
  EXPECT_TRUE(triangles_intersect(a, touch));
}

TEST(Geometry, AgreesWithSegmentOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int hits = 0;
  for (int k = 0; k < 20000; ++k) {
    Triangle a, b;
    for (auto &p : a) p = {u(rng), u(rng), u(rng)};
    for (auto &p : b) p = {u(rng) + 0.5, u(rng), u(rng)};
    const bool want = oracle(a, b);
    hits += want;
    EXPECT_EQ(triangles_intersect(a, b), want) << "draw " << k;
  }
  EXPECT_GT(hits, 1000);
}

TEST(Geometry, SymmetricInArguments) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    Triangle a, b;
    for (auto &p : a) p = {u(rng), u(rng), u(rng)};
    for (auto &p : b) p = {u(rng), u(rng), u(rng)};
    EXPECT_EQ(triangles_intersect(a, b), triangles_intersect(b, a));
  }
}

TEST(Geometry, ParallelSheetsAreEmbedded) {
  const auto a = flat_grid(0.0, 6), b = flat_grid(0.5, 6);
  EXPECT_TRUE(check_embedded({&a, &b}).embedded);
}

TEST(Geometry, SelfOverlapSentinel) {
  const auto a = flat_grid(0.0, 5);
  const auto copy = a;
  const auto rep = check_embedded({&a, &copy});
  EXPECT_FALSE(rep.embedded);
  EXPECT_GT(rep.intersecting_pairs, 0u);
}

TEST(Geometry, CrossingSheetsAreCaught) {
  auto a = flat_grid(0.0, 5);
  MeshGrid b = flat_grid(0.0, 5);
  // Tilt b so it cuts through a.
  for (auto &p : b.points) p.z = p.x - 0.5;
  const auto rep = check_embedded({&a, &b}, false);
  EXPECT_FALSE(rep.embedded);
  EXPECT_GE(rep.intersecting_pairs, 4u);
}

TEST(Geometry, FoldedSingleSheetIsCaught) {
  // One sheet folded back over itself: rows past the middle retrace the
  // first half one unit lower, then climb through it.
  MeshGrid g;
  g.r_values = linspace(0.0, 1.0, 9);
  g.theta_values = linspace(0.0, 1.0, 5);
  for (std::size_t i = 0; i < 9; ++i) {
    const double s = i < 5 ? 0.25 * i : 1.0 - 0.25 * (i - 4);
    const double z = i < 5 ? 0.0 : -0.3 + 0.2 * (i - 4);
    for (double y : g.theta_values) g.points.push_back({s, y, z});
  }
  g.z.resize(g.points.size());
  EXPECT_FALSE(check_embedded(g).embedded);
}

TEST(Geometry, HelicoidDomainGridIsEmbedded) {
  const auto g = sample_mesh(make_helicoid(), 0.5, 3.0, 8, 40, kTwoPi);
  EXPECT_TRUE(check_embedded(g).embedded);
}

TEST(Geometry, DoubleCoveredDomainIsNotInjective) {
  // Two full turns of an annulus around the origin cover the same points twice.
  const auto g = sample_mesh(make_helicoid(), 0.5, 3.0, 6, 48, 2.0 * kTwoPi);
  EXPECT_FALSE(check_embedded(g).embedded);
}

TEST(Geometry, DegenerateTrianglesAreCounted) {
  MeshGrid g;
  g.r_values = {0.0, 1.0};
  g.theta_values = {0.0, 1.0, 2.0};
  g.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 1, 0}};
  g.points[3] = g.points[0];
  g.points[4] = g.points[1];
  g.z.resize(6);
  const auto rep = check_embedded(g);
  EXPECT_EQ(rep.skipped_degenerate, 3u);
  EXPECT_TRUE(rep.embedded);
}
