#include <gtest/gtest.h>

#include <random>

#include "minsurf/solver.hpp"

using namespace minsurf;

namespace {

// Distance of the argument difference from the nearest multiple of 2 pi.
double arg_mismatch(double B, double y, double x) {
  const auto tp = theta_pair(B, y, x);
  return std::abs(std::remainder(tp.theta_r - tp.theta_l, kTwoPi));
}

void expect_flux(const SolveResult &r, double a, double b) {
  EXPECT_LT(r.period_residual, 1e-9);
  EXPECT_NEAR(r.achieved_flux.x, a, 1e-6);
  EXPECT_NEAR(r.achieved_flux.y, 0.0, 1e-6);
  EXPECT_NEAR(r.achieved_flux.z, -b, 1e-6);
}

}  // namespace

TEST(Solver, ThetaPairExamples) {
  auto p = theta_pair(0.0, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(p.theta_l, 0.0);
  EXPECT_DOUBLE_EQ(p.theta_r, 1.0);
  p = theta_pair(1.0, 0.0, 3.0);
  EXPECT_DOUBLE_EQ(p.theta_l, std::atan2(3.0, 2.0));
  EXPECT_DOUBLE_EQ(p.theta_r, 3.0);
  EXPECT_LT(std::abs(curve_L(1.0, 0.0, 3.0) - Complex{2.0, 3.0}), 1e-15);
  EXPECT_LT(std::abs(curve_R(1.0, 0.0, 3.0) - 4.0 * std::exp(Complex{0.0, 3.0})), 1e-14);
  EXPECT_THROW(theta_pair(1.0, 0.0, 0.5), DomainError);
}

TEST(Solver, ModulusOfLMatchesExpansion) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double B = 3.0 * u(rng), y = 10.0 * u(rng) - 5.0;
    const double x = lower_x_bound(B) + 1e-3 + 20.0 * u(rng);
    const double expanded =
        (1.0 + B * B) * (x * x + y * y) + B * B - 2.0 * B * x + 2.0 * B * B * y;
    EXPECT_NEAR(std::norm(curve_L(B, y, x)), expanded, 1e-11 * std::max(1.0, expanded));
    // Lower bound away from the third quadrant.
    const double c = lower_x_bound(B);
    EXPECT_GE(std::norm(curve_L(B, y, x)) * (1.0 + 1e-12), (1.0 + B * B) * (x - c) * (x - c));
  }
}

TEST(Solver, FindX1Examples) {
  EXPECT_NEAR(find_x1(0.0, 0.0), kTwoPi, 1e-12);
  for (auto [B, y] : {std::pair{0.0, 0.5}, std::pair{1.0, 1.0}, std::pair{2.0, -3.0}}) {
    const double x1 = find_x1(B, y);
    EXPECT_LT(arg_mismatch(B, y, x1), 1e-10) << "B=" << B << " y=" << y;
  }
}

TEST(Solver, ArgumentDifferenceIsMonotoneOnTheWindow) {
  for (double B : {0.0, 0.5, 1.0, 3.0}) {
    for (double y : {-4.0, 0.0, 2.0}) {
      const double x0 = x1_scan_start(B), x1 = find_x1(B, y);
      double prev = -1e300;
      for (int k = 0; k < 100; ++k) {
        const double x = x0 + (x1 + kPi - x0) * k / 99.0;
        const auto tp = theta_pair(B, y, x);
        const double d = tp.theta_r - tp.theta_l;
        EXPECT_GT(d, prev) << "B=" << B << " y=" << y << " x=" << x;
        prev = d;
      }
    }
  }
}

TEST(Solver, SolveTExamples) {
  EXPECT_NEAR(solve_t(0.0, 0.0, kTwoPi), 1.0, 1e-15);
  const double x1 = find_x1(0.0, 1.0);
  const double t = solve_t(0.0, 1.0, x1);
  EXPECT_NEAR(t, std::sqrt(std::exp(1.0) * std::abs(curve_R(0.0, 1.0, x1)) /
                           std::abs(curve_L(0.0, 1.0, x1))),
              1e-15);
  EXPECT_LT(period_equation_residual(t, {x1, 1.0}, 0.0), 1e-10);
  // Cross-module: the closed forms see a closed member too.
  const auto f = make_nonvertical(t, {x1, 1.0}, 0.0);
  EXPECT_LT(period_residual_and_flux(f).period_residual, 1e-9);
}

TEST(Solver, RootCertificateOverRandomParameters) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const double B = 2.0 * u(rng), y = 8.0 * u(rng) - 4.0;
    const double x1 = find_x1(B, y);
    EXPECT_LT(arg_mismatch(B, y, x1), 1e-10);
    const double t = solve_t(B, y, x1);
    EXPECT_LT(period_equation_residual(t, {x1, y}, B), 1e-10) << "B=" << B << " y=" << y;
  }
}

TEST(Solver, FluxLengthExamples) {
  EXPECT_NEAR(flux_length(0.0, 0.0), 4.0 * kPi * kPi, 1e-9);
  EXPECT_LT(flux_length(0.0, -5.0), flux_length(0.0, 0.0));
  EXPECT_LT(flux_length(0.0, 0.0), flux_length(0.0, 5.0));
  for (double y : {-1.0, 0.0, 1.0}) {
    const double x1 = find_x1(1.0, y), t = solve_t(1.0, y, x1);
    const auto rep = closed_form_periods(make_nonvertical(t, {x1, y}, 1.0));
    EXPECT_NEAR(flux_length(1.0, y), std::abs(rep.int_gdh), 1e-9 * flux_length(1.0, y));
  }
}

TEST(Solver, FluxLengthLimits) {
  EXPECT_LT(flux_length(0.5, -30.0), 1e-3);
  EXPECT_GT(flux_length(0.5, 30.0), 1e6);
}

TEST(Solver, FourPiSquaredRecoversBaseline) {
  const auto r = solve({4.0 * kPi * kPi, 0.0});
  expect_flux(r, 4.0 * kPi * kPi, 0.0);
  const auto &p = std::get<NonVerticalFlux>(r.family.data);
  EXPECT_NEAR(p.t, 1.0, 1e-6);
  EXPECT_NEAR(std::abs(p.A - kTwoPi), 0.0, 1e-6);
  EXPECT_NEAR(std::get<NonVerticalDiagnostics>(r.diagnostics).y, 0.0, 1e-6);
}

TEST(Solver, NonVerticalTargets) {
  const auto r1 = solve({1.0, 0.0});
  expect_flux(r1, 1.0, 0.0);
  EXPECT_LT(std::get<NonVerticalDiagnostics>(r1.diagnostics).y, 0.0);
  const auto r2 = solve({1.0, kTwoPi});
  expect_flux(r2, 1.0, kTwoPi);
  EXPECT_DOUBLE_EQ(std::get<NonVerticalFlux>(r2.family.data).B, 1.0);
}

TEST(Solver, VerticalTargets) {
  for (double b : {1.0, kTwoPi}) {
    const auto r = solve({0.0, b});
    expect_flux(r, 0.0, b);
    ASSERT_TRUE(r.family.is_vertical());
    const auto &p = std::get<VerticalFlux>(r.family.data);
    EXPECT_GT(p.A.real(), 1.5 * kPi);
    EXPECT_LT(p.A.real(), 2.5 * kPi);
    EXPECT_GT(p.A.imag(), 0.0);
    const auto q = quadrature_periods(r.family, {r.family.domain_radius + 1.0, 64});
    EXPECT_LT(std::abs(q.int_gdh), 1e-9);
    EXPECT_LT(std::abs(q.int_dh_over_g), 1e-9);
    EXPECT_LT(std::abs(std::abs(vertical_equation(p.B, p.A.real(), p.A.imag()))), 1e-10);
  }
}

TEST(Solver, HelicoidDispatch) {
  const auto r = solve({0.0, 0.0});
  EXPECT_TRUE(r.family.is_helicoid());
  EXPECT_EQ(norm(r.achieved_flux), 0.0);
  EXPECT_EQ(r.family.rotation, 0.0);
  EXPECT_TRUE(std::holds_alternative<std::monostate>(r.diagnostics));
}

TEST(Solver, RotationNormalization) {
  EXPECT_NEAR(wrap_angle(rotation_for_horizontal_flux({0.0, kTwoPi})), kPi, 1e-15);
  EXPECT_EQ(rotation_for_horizontal_flux({}), 0.0);
  const auto h = normalize_rotation(make_helicoid());
  EXPECT_EQ(h.rotation, 0.0);
  // An arbitrary extra turn is undone.
  auto f = solve({2.0, 1.0}).family;
  f.rotation += 2.0;
  const auto g = normalize_rotation(f);
  const auto rep = period_residual_and_flux(g);
  EXPECT_NEAR(rep.flux.x, 2.0, 1e-9);
  EXPECT_NEAR(rep.flux.y, 0.0, 1e-9);
  EXPECT_THROW(normalize_rotation(make_nonvertical(1.0, {1.0, 0.0}, 0.0)), SolverError);
}

TEST(Solver, VerticalComponentIsExact) {
  for (double b : {0.0, 1.0, kTwoPi}) {
    for (double a : {0.5, 2.0}) {
      const auto r = solve({a, b});
      EXPECT_NEAR(closed_form_periods(r.family).int_dh.imag(), -b, 1e-12);
    }
  }
}

TEST(Solver, Deterministic) {
  const auto a = solve({2.0, 1.0}), b = solve({2.0, 1.0});
  const auto &pa = std::get<NonVerticalFlux>(a.family.data);
  const auto &pb = std::get<NonVerticalFlux>(b.family.data);
  EXPECT_EQ(pa.t, pb.t);
  EXPECT_EQ(pa.A, pb.A);
  EXPECT_EQ(a.family.rotation, b.family.rotation);
  EXPECT_EQ(a.period_residual, b.period_residual);
}

TEST(Solver, SecondWindowGivesAnotherRepresentative) {
  const auto w1 = solve({1.0, 0.0}, 1), w2 = solve({1.0, 0.0}, 2);
  expect_flux(w2, 1.0, 0.0);
  EXPECT_GT(std::abs(std::get<NonVerticalFlux>(w1.family.data).A -
                     std::get<NonVerticalFlux>(w2.family.data).A),
            1.0);
}

TEST(Solver, RejectsBadTargets) {
  EXPECT_THROW(solve({-1.0, 0.0}), DomainError);
  EXPECT_THROW(solve({0.0, -1.0}), DomainError);
  EXPECT_THROW(solve({std::nan(""), 0.0}), DomainError);
  EXPECT_THROW(find_x1(-1.0, 0.0), DomainError);
  EXPECT_THROW(find_x1(0.0, 0.0, 0), DomainError);
}
