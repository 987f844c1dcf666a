#pragma once

// Quadrature of analytic integrands along paths in the complex plane:
// adaptive Gauss-Kronrod (7,15) on parametrized pieces, and the periodic
// trapezoid rule on circles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include "minsurf/core.hpp"

namespace minsurf::quad {

struct Options {
  double rel_tol = 1e-12;   // relative to the L1 mass of the integrand
  double abs_tol = 1e-14;
  int initial_panels = 1;
  int max_panels = 200000;
};

template <std::size_t N>
using CVec = std::array<Complex, N>;

template <std::size_t N>
struct Result {
  CVec<N> value{};
  double error = 0.0;
  double mass = 0.0;  // approximate integral of max_k |integrand_k|
  int panels = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
  double a, b;
  CVec<N> value;
  double error;
  double mass;
  bool operator<(const Panel &o) const { return error < o.error; }
};

template <std::size_t N, class G>
Panel<N> gk15(const G &integrand, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  CVec<N> k15{}, g7{};
  double mass = 0.0;
  auto accumulate = [&](const CVec<N> &v, double wk, double wg) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      k15[i] += wk * v[i];
      g7[i] += wg * v[i];
      m = std::max(m, std::abs(v[i]));
    }
    mass += wk * m;
  };
  accumulate(integrand(c), kWgk[7], kWg[3]);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double wg = (j % 2 == 1) ? kWg[j / 2] : 0.0;
    accumulate(integrand(c - dx), kWgk[j], wg);
    accumulate(integrand(c + dx), kWgk[j], wg);
  }
  double err = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    k15[i] *= h;
    err = std::max(err, std::abs(k15[i] - h * g7[i]));
  }
  return {a, b, k15, err, std::abs(h) * mass};
}

}  // namespace detail

/// Integrates a CVec<N>-valued function of a real parameter over [s0, s1]
/// by globally adaptive Gauss-Kronrod bisection.
template <std::size_t N, class G>
Result<N> integrate_param(const G &integrand, double s0, double s1,
                          const Options &opt = {}) {
  Result<N> out;
  if (s0 == s1) return out;
  std::priority_queue<detail::Panel<N>> heap;
  const int n0 = std::max(1, opt.initial_panels);
  double err = 0.0, mass = 0.0;
  for (int k = 0; k < n0; ++k) {
    const double a = s0 + (s1 - s0) * k / n0;
    const double b = (k + 1 == n0) ? s1 : s0 + (s1 - s0) * (k + 1) / n0;
    auto p = detail::gk15<N>(integrand, a, b);
    err += p.error;
    mass += p.mass;
    heap.push(std::move(p));
  }
  int panels = n0;
  auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * mass); };
  while (err > tolerance()) {
    if (panels >= opt.max_panels) {
      CVec<N> v{};
      auto copy = heap;
      while (!copy.empty()) {
        for (std::size_t i = 0; i < N; ++i) v[i] += copy.top().value[i];
        copy.pop();
      }
      throw QuadratureError("adaptive quadrature exceeded its panel cap",
                            v[0], Complex{err, 0.0});
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15<N>(integrand, worst.a, mid);
    auto right = detail::gk15<N>(integrand, mid, worst.b);
    err += left.error + right.error - worst.error;
    mass += left.mass + right.mass - worst.mass;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++panels;
    if (err < 0.0) err = 0.0;
  }
  // Sum in a heap-independent order so results do not depend on pop order.
  std::vector<detail::Panel<N>> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(),
            [](const auto &l, const auto &r) { return l.a < r.a; });
  for (const auto &p : all) {
    for (std::size_t i = 0; i < N; ++i) out.value[i] += p.value[i];
  }
  out.error = err;
  out.mass = mass;
  out.panels = panels;
  return out;
}

/// Integral of F(z) dz along the straight segment from a to b.
template <std::size_t N, class F>
Result<N> integrate_segment(const F &f, Complex a, Complex b,
                            Options opt = {}, double panel_length = 2.0) {
  const Complex d = b - a;
  const double len = std::abs(d);
  opt.initial_panels = std::max(
      opt.initial_panels, static_cast<int>(std::ceil(len / panel_length)));
  auto g = [&](double s) {
    CVec<N> v = f(a + s * d);
    for (auto &x : v) x *= d;
    return v;
  };
  return integrate_param<N>(g, 0.0, 1.0, opt);
}

/// Integral of F(z) dz along the arc z = radius e^{i phi}, phi from phi0 to
/// phi1 (either direction).
template <std::size_t N, class F>
Result<N> integrate_arc(const F &f, double radius, double phi0, double phi1,
                        Options opt = {}, double panel_length = 2.0) {
  const double len = std::abs(phi1 - phi0) * radius;
  opt.initial_panels = std::max(
      opt.initial_panels, static_cast<int>(std::ceil(len / panel_length)));
  auto g = [&](double phi) {
    const Complex z = std::polar(radius, phi);
    CVec<N> v = f(z);
    const Complex dz = kI * z;
    for (auto &x : v) x *= dz;
    return v;
  };
  return integrate_param<N>(g, phi0, phi1, opt);
}

enum class Orientation {
  ExteriorBoundary,  // clockwise: boundary of {|z| >= R}
  Counterclockwise,
};

struct CircleResult {
  Complex value;
  Complex previous;
  int samples = 0;
  bool converged = false;
};

/// Periodic trapezoid rule for the loop integral of F(z) dz over |z| = R,
/// doubling the sample count from min_samples until two successive values
/// agree to max(abs_tol, 64 eps * sum|terms|), which is the roundoff floor of
/// the sum itself. If F takes std::complex<long double> the nodes, terms and
/// sum are carried in long double.
template <class F>
CircleResult trapezoid_circle(const F &f, double radius, int min_samples,
                              Orientation orient, double abs_tol = 1e-11,
                              int max_samples = 1 << 20) {
  using R = std::conditional_t<std::is_invocable_v<const F &, std::complex<long double>>,
                               long double, double>;
  using C = std::complex<R>;
  const R two_pi = 2 * std::acos(R(-1));
  auto rule = [&](int n, R &scale) {
    // Neumaier summation over the nodes.
    C sum{}, comp{};
    scale = 0;
    for (int k = 0; k < n; ++k) {
      const R phi = two_pi * k / n;
      const C z = std::polar(R(radius), phi);
      const C term = C(f(z)) * (C(0, 1) * z);
      scale += std::abs(term);
      const C t = sum + term;
      const auto fix = [](R s, R x, R tt) {
        return std::abs(s) >= std::abs(x) ? (s - tt) + x : (x - tt) + s;
      };
      comp += C{fix(sum.real(), term.real(), t.real()),
                fix(sum.imag(), term.imag(), t.imag())};
      sum = t;
    }
    scale *= two_pi / n;
    return (sum + comp) * (two_pi / n);
  };
  const auto narrow = [](C v) {
    return Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  };
  const R sign = orient == Orientation::ExteriorBoundary ? -1 : 1;
  R scale = 0;
  int n = std::max(8, min_samples);
  C prev = rule(n, scale);
  CircleResult out{narrow(sign * prev), narrow(sign * prev), n, false};
  while (n < max_samples) {
    n *= 2;
    const C cur = rule(n, scale);
    out.previous = narrow(sign * prev);
    out.value = narrow(sign * cur);
    out.samples = n;
    const R floor = 64 * std::numeric_limits<R>::epsilon() * scale;
    if (std::abs(cur - prev) < std::max(R(abs_tol), floor)) {
      out.converged = true;
      return out;
    }
    prev = cur;
  }
  return out;
}

}  // namespace minsurf::quad
