#pragma once

// Period problem and flux targeting for the two constructed variants.
//
// Non-vertical flux (a > 0): with A = x + iy, B = b / 2pi, the period
// condition is t^2 e^{-y} L(x) = R(x) where
//   L(x) = (x - By - B) + i (Bx + y),  R(x) = ((x + B) - iy) e^{ix}.
// The arguments are matched first (root x1 of theta_R - theta_L = 2 pi k),
// the moduli then fix t, and y is tuned so that |int g dh| = a.
//
// Vertical flux (a = 0, b > 0): with A = x + iy, the condition reduces to
//   2y e^y e^{ix} (y + i(x + B)) = B (x + iy),
// solved by matching arguments for x in (3pi/2, 5pi/2) and moduli in y > 0.

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <variant>

#include "minsurf/core.hpp"
#include "minsurf/periods.hpp"
#include "minsurf/wdata.hpp"

namespace minsurf {

struct SolveTarget {
  double a = 0.0;
  double b = 0.0;
  double B() const { return b / kTwoPi; }
};

struct ThetaPair {
  double theta_l = 0.0;
  double theta_r = 0.0;
};

struct NonVerticalDiagnostics {
  double x1 = 0.0;
  double y = 0.0;
  double t = 0.0;
  int window_index = 1;
};

struct VerticalDiagnostics {
  double x = 0.0;
  double y = 0.0;
};

using SolveDiagnostics =
    std::variant<std::monostate, NonVerticalDiagnostics, VerticalDiagnostics>;

struct SolveResult {
  WeierstrassFamily family;
  Vec3 achieved_flux{};
  double period_residual = 0.0;
  double rotation_angle = 0.0;
  SolveDiagnostics diagnostics;
};

namespace solver_tol {
inline constexpr double kArgumentMatch = 1e-10;
inline constexpr double kPeriodResidual = 1e-9;
inline constexpr double kFlux = 1e-6;
}  // namespace solver_tol

/// Smallest x admitted by theta_pair / find_x1: beyond it L(x) != 0.
inline double lower_x_bound(double B) { return B / (1.0 + B * B); }

inline Complex curve_L(double B, double y, double x) {
  return {x - B * y - B, B * x + y};
}
inline Complex curve_R(double B, double y, double x) {
  return Complex{x + B, -y} * std::exp(kI * x);
}

/// Continuous arguments of L and R. theta_L is the principal value, which is
/// continuous because L avoids the closed third quadrant; theta_R is
/// x + arg((x + B) - iy), continuous since x + B > 0.
inline ThetaPair theta_pair(double B, double y, double x) {
  if (!(B >= 0.0) || !std::isfinite(y) || !std::isfinite(x) ||
      !(x > lower_x_bound(B))) {
    throw DomainError("theta_pair requires B >= 0 and x > B/(1+B^2)");
  }
  const Complex L = curve_L(B, y, x);
  return {std::atan2(L.imag(), L.real()), x + std::atan2(-y, x + B)};
}

namespace detail {

/// Bisection on a bracket [lo, hi] with f(lo) and f(hi) of opposite sign.
template <class F>
double bisect(const F &f, double lo, double hi, double flo, double xtol,
              int max_iter = 400) {
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Start of the argument-matching scan. On [B/(1+B^2) + 2, inf) the difference
/// theta_R - theta_L has derivative >= 1/4 and starts below 2 pi, so the
/// root for each window index k >= 1 exists, is unique and depends
/// continuously on (B, y).
inline double x1_scan_start(double B) { return lower_x_bound(B) + 2.0; }

/// Root x1 of theta_R - theta_L = 2 pi * window_index on the scan range.
inline double find_x1(double B, double y, int window_index = 1) {
  if (!(B >= 0.0) || !std::isfinite(B) || !std::isfinite(y)) {
    throw DomainError("find_x1 requires finite B >= 0 and finite y");
  }
  if (window_index < 1) throw DomainError("window index must be >= 1");
  const double target = kTwoPi * window_index;
  auto diff = [&](double x) {
    const auto tp = theta_pair(B, y, x);
    return tp.theta_r - tp.theta_l - target;
  };
  const double x0 = x1_scan_start(B);
  // Guaranteed reach from the derivative bound, plus slack.
  const double x_cap = x0 + 4.0 * (target + 2.0 * kPi);
  const double step = kPi / 4.0;
  double lo = x0, flo = diff(lo);
  std::ostringstream trace;
  trace << "find_x1 B=" << B << " y=" << y << " k=" << window_index;
  if (flo > 0.0) {
    throw SolverError("argument difference already above target at scan start",
                      trace.str());
  }
  while (lo < x_cap) {
    const double hi = lo + step;
    const double fhi = diff(hi);
    trace << " [" << lo << "," << fhi << "]";
    if (fhi >= 0.0) {
      if (fhi == 0.0) return hi;
      return detail::bisect(diff, lo, hi, flo,
                            4.0 * std::numeric_limits<double>::epsilon() * hi);
    }
    lo = hi;
    flo = fhi;
  }
  throw SolverError("no sign change of the argument difference in the scan range",
                    trace.str());
}

/// Modulus match: t = sqrt(e^y |R(x1)| / |L(x1)|).
inline double solve_t(double B, double y, double x1) {
  if (!(x1 > lower_x_bound(B))) throw DomainError("solve_t requires L(x1) != 0");
  const double ratio = std::abs(curve_R(B, y, x1)) / std::abs(curve_L(B, y, x1));
  return std::sqrt(std::exp(y) * ratio);
}

/// Relative residual of t [A(1 + iB) - B] = (conj A + B) e^{i conj A} / t.
inline double period_equation_residual(double t, Complex A, double B) {
  const Complex lhs = t * (A * Complex{1.0, B} - B);
  const Complex rhs = (std::conj(A) + B) * std::exp(kI * std::conj(A)) / t;
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

/// Horizontal flux length F(B, y) = 2 pi t |L(x1)| of the period-closed
/// member with Im A = y.
inline double flux_length(double B, double y, int window_index = 1) {
  const double x1 = find_x1(B, y, window_index);
  const double t = solve_t(B, y, x1);
  return kTwoPi * t * std::abs(curve_L(B, y, x1));
}

/// Rotation angle that turns the horizontal flux i * int_gdh onto the
/// positive x1 axis; zero when the horizontal flux vanishes.
inline double rotation_for_horizontal_flux(Complex int_gdh) {
  const Complex horizontal = kI * int_gdh;
  if (std::abs(horizontal) == 0.0) return 0.0;
  return -std::arg(horizontal);
}

inline double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

/// Re-rotates a period-closed family so its horizontal flux is (|F|, 0).
inline WeierstrassFamily normalize_rotation(const WeierstrassFamily &f) {
  const auto rep = period_residual_and_flux(f);
  if (!(rep.period_residual < solver_tol::kPeriodResidual)) {
    throw SolverError("normalize_rotation needs a period-closed family");
  }
  const Complex horizontal = kI * rep.int_gdh;
  if (std::abs(horizontal) == 0.0) return f;
  WeierstrassFamily out = f;
  out.rotation = wrap_angle(f.rotation + rotation_for_horizontal_flux(rep.int_gdh));
  return out;
}

namespace detail {

inline SolveResult finish(WeierstrassFamily fam, SolveDiagnostics diag,
                          const SolveTarget &target) {
  const auto rep = period_residual_and_flux(fam);
  SolveResult res{std::move(fam), rep.flux, rep.period_residual, 0.0,
                  std::move(diag)};
  res.rotation_angle = res.family.rotation;
  if (!(rep.period_residual < solver_tol::kPeriodResidual)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "period residual %.3e above certificate",
                  rep.period_residual);
    throw SolverError(buf);
  }
  const Vec3 want{target.a, 0.0, -target.b};
  const Vec3 d = rep.flux - want;
  if (!(std::abs(d.x) < solver_tol::kFlux && std::abs(d.y) < solver_tol::kFlux &&
        std::abs(d.z) < solver_tol::kFlux)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "achieved flux (%.9g, %.9g, %.9g) misses target (%.9g, 0, %.9g)",
                  rep.flux.x, rep.flux.y, rep.flux.z, target.a, -target.b);
    throw SolverError(buf);
  }
  return res;
}

}  // namespace detail

/// Case a > 0: bracket and bisect F(B, y) = a, starting from y = 0 and
/// expanding y = -+2^k towards the side where the sign changes; the bracket
/// nearest to zero is kept.
inline SolveResult solve_nonvertical(const SolveTarget &target,
                                     int window_index = 1) {
  if (!(target.a > 0.0) || !(target.b >= 0.0) || !std::isfinite(target.a) ||
      !std::isfinite(target.b)) {
    throw DomainError("solve_nonvertical needs a > 0 and b >= 0");
  }
  const double a = target.a, B = target.B();
  auto phi = [&](double y) {
    const double F = flux_length(B, y, window_index);
    return std::isnan(F) ? std::numeric_limits<double>::infinity() : F - a;
  };
  std::ostringstream trace;
  double y_star = 0.0;
  const double f0 = phi(0.0);
  trace << "y=0 F-a=" << f0;
  if (f0 != 0.0) {
    const double dir = f0 > 0.0 ? -1.0 : 1.0;
    double prev = 0.0, fprev = f0;
    bool found = false;
    for (int k = 0; k <= 40; ++k) {
      const double y = dir * std::ldexp(1.0, k);
      const double fy = phi(y);
      trace << " y=" << y << " F-a=" << fy;
      if ((fy <= 0.0) != (fprev <= 0.0) || fy == 0.0) {
        const double lo = std::min(y, prev), hi = std::max(y, prev);
        const double flo = lo == y ? fy : fprev;
        if (fy == 0.0) {
          y_star = y;
        } else {
          y_star = detail::bisect(
              phi, lo, hi, flo,
              4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi)));
        }
        found = true;
        break;
      }
      prev = y;
      fprev = fy;
    }
    if (!found) throw SolverError("no bracket for the flux length", trace.str());
  }
  const double x1 = find_x1(B, y_star, window_index);
  const double t = solve_t(B, y_star, x1);
  const Complex A{x1, y_star};
  if (period_equation_residual(t, A, B) > solver_tol::kArgumentMatch) {
    throw SolverError("period equation residual above certificate", trace.str());
  }
  auto fam = normalize_rotation(make_nonvertical(t, A, B));
  return detail::finish(std::move(fam),
                        NonVerticalDiagnostics{x1, y_star, t, window_index},
                        target);
}

/// Argument mismatch of both sides of the vertical-flux equation, shifted by
/// 2 pi so that its root lies in J = (3pi/2, 5pi/2); increasing in x.
inline double vertical_argument_gap(double B, double y, double x) {
  return x + std::atan2(x + B, y) - std::atan2(y, x) - kTwoPi;
}

/// Modulus mismatch 2y e^y |y + i(x+B)| - B |x + iy|.
inline double vertical_modulus_gap(double B, double y, double x) {
  return 2.0 * y * std::exp(y) * std::abs(Complex{y, x + B}) -
         B * std::abs(Complex{x, y});
}

/// Inner solve: x(y) in J with matching arguments.
inline double vertical_x_of_y(double B, double y) {
  const double lo = 1.5 * kPi, hi = 2.5 * kPi;
  const double flo = vertical_argument_gap(B, y, lo);
  const double fhi = vertical_argument_gap(B, y, hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    throw SolverError("argument match not bracketed by the window J");
  }
  return detail::bisect([&](double x) { return vertical_argument_gap(B, y, x); },
                        lo, hi, flo,
                        4.0 * std::numeric_limits<double>::epsilon() * hi);
}

inline Complex vertical_equation(double B, double x, double y) {
  return 2.0 * y * std::exp(y) * std::exp(kI * x) * Complex{y, x + B} -
         B * Complex{x, y};
}

inline SolveResult solve_vertical(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("solve_vertical needs b > 0");
  const double B = b / kTwoPi;
  auto outer = [&](double y) { return vertical_modulus_gap(B, y, vertical_x_of_y(B, y)); };
  std::ostringstream trace;
  double y = 1.0, fy = outer(y);
  trace << "y=1 gap=" << fy;
  double lo, hi, flo;
  bool found = false;
  if (fy > 0.0) {
    hi = y;
    for (int k = 0; k < 40; ++k) {
      const double yl = hi * 0.5;
      const double fl = outer(yl);
      trace << " y=" << yl << " gap=" << fl;
      if (fl <= 0.0) {
        lo = yl;
        flo = fl;
        found = true;
        break;
      }
      hi = yl;
    }
  } else {
    lo = y;
    flo = fy;
    for (int k = 0; k < 40; ++k) {
      const double yh = lo * 2.0;
      const double fh = outer(yh);
      trace << " y=" << yh << " gap=" << fh;
      if (fh >= 0.0) {
        hi = yh;
        found = true;
        break;
      }
      lo = yh;
      flo = fh;
    }
  }
  if (!found) throw SolverError("no bracket for the vertical modulus match", trace.str());
  double ys = flo == 0.0 ? lo
                         : detail::bisect(outer, lo, hi, flo,
                                          4.0 * std::numeric_limits<double>::epsilon() * hi);
  double xs = vertical_x_of_y(B, ys);

  // Newton polish on the complex equation in (x, y).
  for (int it = 0; it < 8; ++it) {
    const Complex G = vertical_equation(B, xs, ys);
    const Complex e = std::exp(ys) * std::exp(kI * xs);
    const Complex Gx = 2.0 * ys * e * kI * (Complex{ys, xs + B} + 1.0) - B;
    const Complex Gy = 2.0 * e * ((1.0 + ys) * Complex{ys, xs + B} + ys) - kI * B;
    const double det = Gx.real() * Gy.imag() - Gy.real() * Gx.imag();
    if (det == 0.0) break;
    const double dx = (G.real() * Gy.imag() - Gy.real() * G.imag()) / det;
    const double dy = (Gx.real() * G.imag() - G.real() * Gx.imag()) / det;
    const double xn = xs - dx, yn = ys - dy;
    if (!(yn > 0.0) || std::abs(vertical_equation(B, xn, yn)) >= std::abs(G)) break;
    xs = xn;
    ys = yn;
  }
  auto fam = make_vertical(Complex{xs, ys}, B);
  return detail::finish(std::move(fam), VerticalDiagnostics{xs, ys}, {0.0, b});
}

/// Dispatch on the flux target.
inline SolveResult solve(const SolveTarget &target, int window_index = 1) {
  if (!(target.a >= 0.0) || !(target.b >= 0.0) || !std::isfinite(target.a) ||
      !std::isfinite(target.b)) {
    throw DomainError("flux target needs finite a, b >= 0");
  }
  if (target.a == 0.0 && target.b == 0.0) {
    return detail::finish(make_helicoid(), std::monostate{}, target);
  }
  if (target.a == 0.0) return solve_vertical(target.b);
  return solve_nonvertical(target, window_index);
}

}  // namespace minsurf
