#include <gtest/gtest.h>

#include <map>
#include <memory>

#include "minsurf/asymptotics.hpp"
#include "minsurf/geometry.hpp"
#include "minsurf/solver.hpp"

using namespace minsurf;

namespace {

// Solved ends are shared between tests; building one integrates both axis
// rays out to |w| = 1e4.
const NormalizedEnd &end_for(double a, double b) {
  static std::map<std::pair<double, double>, std::unique_ptr<NormalizedEnd>> cache;
  auto &slot = cache[{a, b}];
  if (!slot) slot = std::make_unique<NormalizedEnd>(solve({a, b}).family);
  return *slot;
}

const NormalizedEnd &helicoid_end() {
  static const NormalizedEnd e(make_helicoid());
  return e;
}

std::vector<double> window_for(const NormalizedEnd &end, std::vector<double> radii, int count = 16) {
  auto w = choose_theta_window(end, radii, 1.0, count);
  if (!w) throw std::runtime_error("no theta window");
  return *w;
}

}  // namespace

TEST(Asymptotics, HelicoidAxisOffsetIsZero) {
  EXPECT_LT(std::abs(axis_offset(make_helicoid(), 1e3)), 1e-10);
}

TEST(Asymptotics, AxisOffsetForSolvedFamilies) {
  const auto &e1 = end_for(1.0, 0.0);
  EXPECT_LT(std::abs(e1.axes().offset() - Complex{0.0, -0.5}), 0.02);
  const double a = 4.0 * kPi * kPi;
  const auto &e2 = end_for(a, 0.0);
  EXPECT_LT(std::abs(e2.axes().offset() - Complex{0.0, -0.5 * a}), 0.02 * 0.5 * a);
}

TEST(Asymptotics, AxisRaysAreCauchy) {
  // Accelerated top/bottom estimates stabilise as the rays lengthen.
  const Immersion im(solve({1.0, kTwoPi}).family);
  const auto short_run = axis_limits(im, 2e3);
  const auto long_run = axis_limits(im, 8e3);
  EXPECT_LT(std::abs(short_run.top - long_run.top), 1e-2);
  EXPECT_LT(std::abs(short_run.bottom - long_run.bottom), 1e-2);
  EXPECT_LT(long_run.top_error, short_run.top_error + 1e-12);
}

TEST(Asymptotics, HelicoidExtractionExample) {
  const auto s = extract_multigraph(helicoid_end(), 100.0, 0.0, 1);
  EXPECT_NEAR(s.u, 0.5 * kPi, 0.02);
  EXPECT_LT(s.residual, 1e-8);
  const auto s2 = extract_multigraph(helicoid_end(), 100.0, 0.0, 2);
  EXPECT_NEAR(s2.u, -0.5 * kPi, 0.02);
}

TEST(Asymptotics, ReimmersionConsistency) {
  const auto &end = end_for(1.0, kTwoPi);
  for (double th : window_for(end, {1e3}, 8)) {
    for (int br : {1, 2}) {
      const auto s = extract_multigraph(end, 1e3, th, br);
      const auto st = end.immersion().at(s.z);
      EXPECT_LT(std::abs(end.horizontal(st) - std::polar(1e3, th)), 1e-8);
      EXPECT_NEAR(end.height(s.z), s.u, 1e-12);
    }
  }
}

TEST(Asymptotics, BranchSignSplit) {
  for (const auto *end : {&helicoid_end(), &end_for(1.0, kTwoPi)}) {
    for (double th : window_for(*end, {1e3}, 16)) {
      EXPECT_GT(extract_multigraph(*end, 1e3, th, 1).w.imag(), 0.0);
      EXPECT_LT(extract_multigraph(*end, 1e3, th, 2).w.imag(), 0.0);
    }
  }
}

TEST(Asymptotics, ModelGraphsForHelicoid) {
  const auto th = theta_turns(-kPi, 1.0, 16);
  const auto dev = compare_model_graphs(helicoid_end(), {1e2, 1e3}, th);
  EXPECT_LT(dev.back().value, 0.02);
  // The helicoid is its own model: both radii sit at roundoff.
  for (const auto &d : dev) EXPECT_LT(d.value, 1e-12) << d.r;
}

TEST(Asymptotics, ModelGraphDeviationShrinksForVerticalFlux) {
  // The absolute cap at 1e5 is an acceptance criterion; here the trend.
  const auto &end = end_for(0.0, kTwoPi);
  const std::vector<double> radii{1e2, 1e3, 1e4, 1e5};
  const auto dev = compare_model_graphs(end, radii, window_for(end, radii));
  ASSERT_EQ(dev.size(), 4u);
  for (std::size_t k = 1; k < dev.size(); ++k) EXPECT_LT(dev[k].value, dev[k - 1].value);
}

TEST(Asymptotics, GraphOverLogLogTendsToLambda) {
  const auto &end = end_for(0.0, kTwoPi);
  const double r = 1e6;
  // theta = -pi/2 on branch 1 removes the linear term of the model.
  const auto s = extract_multigraph(end, r, -0.5 * kPi, 1);
  EXPECT_NEAR(s.u / std::log(std::log(r)), 1.0, 0.5);
}

TEST(Asymptotics, HelicoidSeparationIsPi) {
  const auto th = theta_turns(-kPi, 1.0, 16);
  const auto st = separation(helicoid_end(), {1e3}, th);
  EXPECT_LT(st.front().max_deviation, 1e-6);
}

TEST(Asymptotics, SeparationIsPositive) {
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{1.0, kTwoPi}, std::pair{0.0, kTwoPi}}) {
    const auto &end = end_for(a, b);
    const std::vector<double> radii{1e2, 1e3, 1e4};
    for (const auto &s : separation(end, radii, window_for(end, radii))) {
      EXPECT_GT(s.min_w, 0.0) << "a=" << a << " b=" << b << " r=" << s.r;
    }
  }
}

TEST(Asymptotics, GradientDecays) {
  const auto &end = end_for(1.0, kTwoPi);
  const auto th = window_for(end, {1e2, 1e4}, 8);
  for (int br : {1, 2}) {
    EXPECT_LT(max_graph_gradient(end, 1e4, th, br), max_graph_gradient(end, 1e2, th, br));
  }
}

TEST(Asymptotics, HelicoidDistanceForHelicoid) {
  for (int n : {1, 5}) {
    EXPECT_LT(helicoid_distance(helicoid_end(), n, 5.0, true).distance, 1e-8);
    EXPECT_LT(helicoid_distance(helicoid_end(), n, 5.0, false).distance, 1e-8);
  }
}

TEST(Asymptotics, HelicoidLimitForVerticalFlux) {
  const auto &end = end_for(0.0, kTwoPi);
  const double d50 = helicoid_distance(end, 50, 5.0, true).distance;
  const double d200 = helicoid_distance(end, 200, 5.0, true).distance;
  EXPECT_LT(d200, 0.05);
  EXPECT_LT(d200, d50);
}

TEST(Asymptotics, HelicoidAxesAreOffsetByHalfFlux) {
  const auto &end = end_for(1.0, 0.0);
  const auto top = helicoid_distance(end, 200, 5.0, true);
  const auto bottom = helicoid_distance(end, 200, 5.0, false);
  EXPECT_LT(std::abs(bottom.model.axis - top.model.axis - Complex{0.0, 0.5}), 0.02);
}

TEST(Asymptotics, SymmetryForVerticalFlux) {
  for (double b : {1.0, kTwoPi}) {
    const auto f = solve({0.0, b}).family;
    EXPECT_LT(symmetry_defect(f), 1e-12);
    EXPECT_LT(paired_point_defect(f), 1e-6);
  }
  EXPECT_LT(symmetry_defect(make_vertical({kTwoPi, 1.0}, 1.0)), 1e-12);
  EXPECT_THROW(symmetry_defect(make_nonvertical(1.0, {1.0, 0.0}, 0.0)), DomainError);
}

TEST(Asymptotics, EmbeddedOverThreeTurns) {
  const auto &end = end_for(0.0, kTwoPi);
  auto th = theta_turns(-3.0 * kPi, 3.0, 96);
  th.push_back(3.0 * kPi);
  const double RE = graph_radius(end, th);
  std::vector<double> rs;
  for (int i = 0; i < 7; ++i) rs.push_back(RE * std::pow(10.0, i / 6.0));
  const auto g1 = multigraph_mesh(end, rs, th, 1);
  const auto g2 = multigraph_mesh(end, rs, th, 2);
  EXPECT_TRUE(check_embedded({&g1, &g2}).embedded);
  // The sentinel: a sheet against itself.
  EXPECT_FALSE(check_embedded({&g1, &g1}).embedded);
}

TEST(Asymptotics, RingCurvatureTendsToOne) {
  const auto h = make_helicoid();
  for (double rho : {1e2, 1e3}) EXPECT_NEAR(ring_max_abs_curvature(h, rho), 1.0, 1e-6);
  const auto f = solve({0.0, kTwoPi}).family;
  double prev = 1e300;
  for (double rho : {1e2, 1e3, 1e4}) {
    const double d = std::abs(ring_max_abs_curvature(f, rho) - 1.0);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 2e-2);
}

TEST(Asymptotics, FluxDistinctness) {
  // Measured (axis offset, vertical flux) separate the three ends.
  struct M {
    Complex offset;
    double vflux;
    double tol;
  };
  std::vector<M> ms;
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{1.0, kTwoPi}, std::pair{2.0, 0.0}}) {
    const auto f = solve({a, b}).family;
    ms.push_back({axis_offset(f, 1e4), period_residual_and_flux(f).flux.z, 0.02 * (1.0 + a)});
  }
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const double d_off = std::abs(ms[i].offset - ms[j].offset);
      const double d_flux = std::abs(ms[i].vflux - ms[j].vflux);
      EXPECT_TRUE(d_off > 3.0 * (ms[i].tol + ms[j].tol) || d_flux > 3.0 * 2e-6) << i << "," << j;
    }
  }
}

TEST(Asymptotics, SameFluxRepresentativesApproachEachOther) {
  // Representatives from windows 1 and 2 differ by O(1 / log r); check the
  // trend between two radii where both ends have graphs.
  const NormalizedEnd e1(solve({1.0, 0.0}, 1).family);
  const NormalizedEnd e2(solve({1.0, 0.0}, 2).family);
  auto sup_diff = [&](double r) {
    double worst = 0.0;
    for (double th : theta_turns(2.0 * kPi, 1.0, 8)) {
      for (int br : {1, 2}) {
        MultigraphSample s1, s2;
        if (!try_extract(e1, r, th, br, &s1) || !try_extract(e2, r, th, br, &s2)) continue;
        worst = std::max(worst, std::abs(s1.u - s2.u));
      }
    }
    return worst;
  };
  const double d6 = sup_diff(1e6), d8 = sup_diff(1e8);
  EXPECT_GT(d6, 0.0);
  EXPECT_LT(d8, d6);
}

TEST(Asymptotics, ExtractionRejectsBadInput) {
  EXPECT_THROW(extract_multigraph(helicoid_end(), 100.0, 0.0, 3), DomainError);
  EXPECT_THROW(extract_multigraph(helicoid_end(), -1.0, 0.0, 1), DomainError);
  EXPECT_THROW(helicoid_distance(helicoid_end(), 0, 5.0, true), DomainError);
}
