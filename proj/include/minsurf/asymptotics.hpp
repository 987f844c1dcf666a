#pragma once

// Desk-scale measurements of the end's asymptotic geometry: limits of the
// axis rays, the two multivalued graphs over large circles, their separation,
// convergence to helicoids after vertical translation, and the 180 degree
// symmetry of the vertical-flux ends.
//
// Everything is phrased in normal coordinates w = z + shift (g = e^{iw + f},
// f(inf) = 0), with heights x3 = Re w + lambda log|w - mu_w| and the
// horizontal origin at the midpoint of the two axis limits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "minsurf/core.hpp"
#include "minsurf/periods.hpp"
#include "minsurf/surface.hpp"
#include "minsurf/wdata.hpp"

namespace minsurf {

/// Limits of the horizontal position along the real w axis, w -> +inf (top)
/// and w -> -inf (bottom).
struct AxisLimits {
  Complex top{};
  Complex bottom{};
  double top_error = 0.0;     // change of the accelerated estimate over one step
  double bottom_error = 0.0;
  double s_max = 0.0;
  Complex offset() const { return top - bottom; }
};

namespace detail {

/// Repeated averaging of neighbours: each level halves the oscillating part
/// of an alternating tail. Returns the last two estimates of the top level.
inline std::pair<Complex, Complex> pair_average(std::vector<Complex> v, int levels) {
  for (int l = 0; l < levels && v.size() > 2; ++l) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k) v[k] = 0.5 * (v[k] + v[k + 1]);
    v.pop_back();
  }
  return {v.back(), v[v.size() - 2]};
}

inline double axis_start(const WeierstrassFamily &f, const NormalForm &nf) {
  return kPi * std::ceil((f.domain_radius + std::abs(nf.shift) + 1.0) / kPi);
}

}  // namespace detail

/// Marches along w = pi m, m >= m0, up to s_max on both rays and accelerates
/// the alternating sequence of horizontal positions.
inline AxisLimits axis_limits(const Immersion &im, double s_max, int levels = 3) {
  const auto &f = im.family();
  const NormalForm nf = normal_form(f);
  const double s0 = detail::axis_start(f, nf);
  const int m0 = static_cast<int>(std::lround(s0 / kPi));
  const int m1 = static_cast<int>(std::floor(s_max / kPi));
  if (m1 - m0 < levels + 2) {
    throw DomainError("axis march too short for the requested acceleration");
  }
  std::vector<Complex> top, bottom;
  PathState t = im.at(nf.to_z(kPi * m0)), b = im.at(nf.to_z(-kPi * m0));
  for (int m = m0; m <= m1; ++m) {
    if (m > m0) {
      t = im.advance(t, nf.to_z(kPi * m));
      b = im.advance(b, nf.to_z(-kPi * m));
    }
    top.push_back(Immersion::horizontal(t));
    bottom.push_back(Immersion::horizontal(b));
  }
  auto [t1, t0] = detail::pair_average(std::move(top), levels);
  auto [b1, b0] = detail::pair_average(std::move(bottom), levels);
  return {t1, b1, std::abs(t1 - t0), std::abs(b1 - b0), kPi * m1};
}

/// Top minus bottom axis limit; -i a/2 for flux (a, 0, -b).
inline Complex axis_offset(const WeierstrassFamily &f, double r_max) {
  return axis_limits(Immersion(f), r_max).offset();
}

/// The end in normal coordinates with the horizontal origin centred between
/// the axis limits.
class NormalizedEnd {
 public:
  explicit NormalizedEnd(const WeierstrassFamily &f, double axis_s_max = 1e4)
      : im_(f), nf_(normal_form(f)), axes_(axis_limits(im_, axis_s_max)) {
    center_ = 0.5 * (axes_.top + axes_.bottom);
  }

  const Immersion &immersion() const { return im_; }
  const WeierstrassFamily &family() const { return im_.family(); }
  const NormalForm &normal() const { return nf_; }
  const AxisLimits &axes() const { return axes_; }
  Complex center() const { return center_; }

  PathState at_w(Complex w) const { return im_.at(nf_.to_z(w)); }
  PathState advance_w(const PathState &s, Complex w) const {
    return im_.advance(s, nf_.to_z(w));
  }

  double height(Complex z) const {
    const Complex w = nf_.to_w(z);
    double x3 = w.real();
    if (nf_.lambda != 0.0) x3 += nf_.lambda * std::log(std::abs(w - nf_.pole_w()));
    return x3;
  }
  Complex horizontal(const PathState &s) const {
    return Immersion::horizontal(s) - center_;
  }
  Vec3 position(const PathState &s) const {
    const Complex h = horizontal(s);
    return {h.real(), h.imag(), height(s.z)};
  }

 private:
  Immersion im_;
  NormalForm nf_;
  AxisLimits axes_;
  Complex center_{};
};

struct MultigraphSample {
  double r = 0.0;
  double theta = 0.0;
  int branch = 1;
  Complex z{};
  Complex w{};
  double u = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct NewtonOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-14;  // relative to r; quadrature roundoff grows with |g|
  int max_iter = 60;
};

/// Solves horizontal(z) = r e^{i theta} by damped Newton from the seed
/// w = (theta +- pi/2) +- i log 2r; u is the height at the solution.
inline MultigraphSample extract_multigraph(const NormalizedEnd &end, double r,
                                           double theta, int branch,
                                           const NewtonOptions &opt = {}) {
  if (branch != 1 && branch != 2) throw DomainError("branch must be 1 or 2");
  if (!(r > 0.0) || !std::isfinite(theta)) throw DomainError("need r > 0, finite theta");
  const double L = std::log(2.0 * r);
  const Complex seed = branch == 1 ? Complex{theta + 0.5 * kPi, L}
                                   : Complex{theta - 0.5 * kPi, -L};
  const Complex target = std::polar(r, theta);
  const double tol = std::max(opt.abs_tol, opt.rel_tol * r);
  PathState s = end.at_w(seed);
  Complex F = end.horizontal(s) - target;
  double res = std::abs(F);
  int it = 0;
  for (; it < opt.max_iter && !(res < tol); ++it) {
    const auto [jx, jy] = end.immersion().horizontal_jacobian(s.z);
    const double det = jx.real() * jy.imag() - jy.real() * jx.imag();
    if (det == 0.0 || !std::isfinite(det)) break;
    const Complex step{(F.real() * jy.imag() - jy.real() * F.imag()) / det,
                       (jx.real() * F.imag() - F.real() * jx.imag()) / det};
    bool moved = false;
    for (double damp = 1.0; damp > 1e-6; damp *= 0.5) {
      try {
        PathState n = end.immersion().advance(s, s.z - damp * step);
        const Complex Fn = end.horizontal(n) - target;
        if (std::abs(Fn) < res) {
          s = n;
          F = Fn;
          res = std::abs(Fn);
          moved = true;
          break;
        }
      } catch (const DomainError &) {
        // Step leaves the domain: shorten it.
      }
    }
    if (!moved) break;
  }
  if (!(res < tol)) {
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "multigraph Newton failed at r=%.6g theta=%.6g branch %d: "
                  "seed w=(%.6g,%.6g) last z=(%.6g,%.6g) residual %.3e",
                  r, theta, branch, seed.real(), seed.imag(), s.z.real(),
                  s.z.imag(), res);
    throw SolverError(buf);
  }
  MultigraphSample out;
  out.r = r;
  out.theta = theta;
  out.branch = branch;
  out.z = s.z;
  out.w = end.normal().to_w(s.z);
  out.u = end.height(s.z);
  out.residual = res;
  out.iterations = it;
  return out;
}

/// Model graphs v_1, v_2: (theta +- pi/2) + lambda log |(theta +- pi/2) + i log 2r|.
inline double model_graph(double lambda, double r, double theta, int branch) {
  const double x = theta + (branch == 1 ? 0.5 : -0.5) * kPi;
  return x + lambda * std::log(std::hypot(x, std::log(2.0 * r)));
}

inline bool try_extract(const NormalizedEnd &end, double r, double theta, int branch,
                        MultigraphSample *out = nullptr) {
  try {
    auto s = extract_multigraph(end, r, theta, branch);
    if (out) *out = s;
    return true;
  } catch (const DomainError &) {
    return false;
  } catch (const SolverError &) {
    return false;
  }
}

/// Angles theta_k = start + 2 pi turns k / count, k = 0..count-1.
inline std::vector<double> theta_turns(double start, double turns, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = start + kTwoPi * turns * k / count;
  return v;
}

/// Sample window of `turns` full turns centred at height zero, shifted by the
/// smallest multiple of pi/4 for which both branches exist at every radius
/// in r_list. The multigraphs only cover the part of the end away from its
/// boundary curve, which passes near height zero.
inline std::optional<std::vector<double>> choose_theta_window(
    const NormalizedEnd &end, const std::vector<double> &r_list, double turns,
    int count, int max_shift = 64) {
  for (int k = 0; k <= max_shift; ++k) {
    for (int sgn : {1, -1}) {
      if (k == 0 && sgn < 0) continue;
      const double start = -kPi * turns + sgn * k * 0.25 * kPi;
      auto th = theta_turns(start, turns, count);
      bool ok = true;
      for (double r : r_list) {
        for (double t : th) {
          if (!try_extract(end, r, t, 1) || !try_extract(end, r, t, 2)) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) return th;
    }
  }
  return std::nullopt;
}

struct RadiusValue {
  double r = 0.0;
  double value = 0.0;
};

/// sup over theta and branch of |u_i - v_i| per radius.
inline std::vector<RadiusValue> compare_model_graphs(const NormalizedEnd &end,
                                                     std::vector<double> r_list,
                                                     const std::vector<double> &thetas) {
  std::sort(r_list.begin(), r_list.end());
  std::vector<RadiusValue> out;
  const double lambda = end.normal().lambda;
  for (double r : r_list) {
    double worst = 0.0;
    for (double th : thetas) {
      for (int br : {1, 2}) {
        const auto s = extract_multigraph(end, r, th, br);
        worst = std::max(worst, std::abs(s.u - model_graph(lambda, r, th, br)));
      }
    }
    out.push_back({r, worst});
  }
  return out;
}

struct SeparationStat {
  double r = 0.0;
  double max_deviation = 0.0;  // max |w - pi|
  double min_w = 0.0;
};

/// Separation w = u_1 - u_2 at equal (r, theta).
inline std::vector<SeparationStat> separation(const NormalizedEnd &end,
                                              std::vector<double> r_list,
                                              const std::vector<double> &thetas) {
  std::sort(r_list.begin(), r_list.end());
  std::vector<SeparationStat> out;
  for (double r : r_list) {
    SeparationStat st{r, 0.0, std::numeric_limits<double>::infinity()};
    for (double th : thetas) {
      const double w = extract_multigraph(end, r, th, 1).u -
                       extract_multigraph(end, r, th, 2).u;
      st.max_deviation = std::max(st.max_deviation, std::abs(w - kPi));
      st.min_w = std::min(st.min_w, w);
    }
    out.push_back(st);
  }
  return out;
}

/// Largest finite-difference gradient |(du/dr, du/(r dtheta))| of one branch
/// at radius r.
inline double max_graph_gradient(const NormalizedEnd &end, double r,
                                 const std::vector<double> &thetas, int branch) {
  const double dr = 1e-3 * r, dth = 1e-3;
  double worst = 0.0;
  for (double th : thetas) {
    const double u0 = extract_multigraph(end, r, th, branch).u;
    const double ur = extract_multigraph(end, r + dr, th, branch).u;
    const double ut = extract_multigraph(end, r, th + dth, branch).u;
    worst = std::max(worst, std::hypot((ur - u0) / dr, (ut - u0) / (r * dth)));
  }
  return worst;
}

/// Smallest radius of the ladder r_start 2^k at which both branches exist
/// for every theta in the list.
inline double graph_radius(const NormalizedEnd &end, const std::vector<double> &thetas,
                           double r_start = 10.0, int max_doublings = 40) {
  double r = r_start;
  for (int k = 0; k <= max_doublings; ++k, r *= 2.0) {
    bool ok = true;
    for (double th : thetas) {
      if (!try_extract(end, r, th, 1) || !try_extract(end, r, th, 2)) {
        ok = false;
        break;
      }
    }
    if (ok) return r;
  }
  throw SolverError("no radius found where both multigraph branches exist");
}

/// Helicoid with axis through `axis`, x3 = s on the horizontal line through
/// direction (sin(s - phase), -cos(s - phase)).
struct HelicoidModel {
  Complex axis{};
  double phase = 0.0;

  Complex direction(double s) const { return std::polar(1.0, s - phase - 0.5 * kPi); }

  /// Euclidean distance from p to the surface.
  double distance(const Vec3 &p) const {
    const Complex q = p.horizontal() - axis;
    // Off-line component taken directly; |q|^2 - (along)^2 would floor the
    // distance near sqrt(eps) |q|.
    auto d2 = [&](double s) {
      const double off = (std::conj(direction(s)) * q).imag();
      return off * off + (p.z - s) * (p.z - s);
    };
    // The nearest level is within pi of the height once q is bounded.
    const int n = 96;
    double best_s = p.z, best = d2(p.z);
    const double lo = p.z - kPi, step = kTwoPi / n;
    for (int k = 0; k <= n; ++k) {
      const double s = lo + k * step;
      const double v = d2(s);
      if (v < best) {
        best = v;
        best_s = s;
      }
    }
    double a = best_s - step, b = best_s + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = d2(c), fd = d2(d);
    for (int it = 0; it < 80; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = d2(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = d2(d);
      }
    }
    best = std::min({best, fc, fd});
    return std::sqrt(std::max(0.0, best));
  }
};

struct HelicoidFit {
  int n = 0;
  bool top = true;
  double distance = 0.0;
  HelicoidModel model;
  std::size_t samples = 0;
};

/// Samples the end near height +-2 pi n, translates by -(0,0,2 pi n + lambda
/// log n) (top) or +(0,0,2 pi n - lambda log n) (bottom), fits the axis from
/// the near-axis samples (real w) and the phase by least squares, and reports
/// the largest distance to the fitted helicoid inside the ball of radius
/// `window` about the axis point at height zero.
inline HelicoidFit helicoid_distance(const NormalizedEnd &end, int n, double window,
                                     bool top = true, double step = 0.125) {
  if (n < 1 || !(window > 0.0)) throw DomainError("helicoid_distance needs n >= 1, window > 0");
  const double lambda = end.normal().lambda;
  const double shift = top ? -(kTwoPi * n + lambda * std::log(double(n)))
                           : (kTwoPi * n - lambda * std::log(double(n)));
  const double centre = top ? kTwoPi * n : -kTwoPi * n;
  const double ymax = std::asinh(window) + 0.5;
  const double smax = window + 2.0;
  const int ns = static_cast<int>(std::ceil(smax / step));
  const int ny = static_cast<int>(std::ceil(ymax / step));

  std::vector<Vec3> pts, axis_pts;
  PathState row = end.at_w({centre - ns * step, 0.0});
  for (int i = -ns; i <= ns; ++i) {
    const double x = centre + i * step;
    if (i > -ns) row = end.advance_w(row, {x, 0.0});
    auto record = [&](const PathState &s, bool on_axis) {
      Vec3 p = end.position(s);
      p.z += shift;
      pts.push_back(p);
      if (on_axis) axis_pts.push_back(p);
    };
    record(row, true);
    for (int dir : {1, -1}) {
      PathState col = row;
      for (int j = 1; j <= ny; ++j) {
        col = end.advance_w(col, {x, dir * j * step});
        record(col, false);
      }
    }
  }
  // Axis: mean horizontal position of the real-w samples inside the slab.
  Complex axis{};
  int na = 0;
  for (const auto &p : axis_pts) {
    if (std::abs(p.z) <= window) {
      axis += p.horizontal();
      ++na;
    }
  }
  if (na == 0) throw DomainError("helicoid window holds no near-axis samples");
  axis /= double(na);

  std::vector<Vec3> win;
  for (const auto &p : pts) {
    if (std::norm(p.horizontal() - axis) + p.z * p.z <= window * window) win.push_back(p);
  }
  if (win.empty()) throw DomainError("helicoid window holds no samples");

  // Phase: arg(q) = s - phase - pi/2 (mod pi); circular mean of doubled angles.
  Complex acc{};
  for (const auto &p : win) {
    const Complex q = p.horizontal() - axis;
    const double aq = std::abs(q);
    if (aq < 0.25) continue;
    acc += aq * std::polar(1.0, 2.0 * (p.z - 0.5 * kPi - std::arg(q)));
  }
  HelicoidModel model{axis, 0.5 * std::arg(acc)};
  auto cost = [&](double ph) {
    HelicoidModel m{axis, ph};
    double sum = 0.0;
    for (const auto &p : win) {
      const double d = m.distance(p);
      sum += d * d;
    }
    return sum;
  };
  {
    double a = model.phase - 0.3, b = model.phase + 0.3;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = cost(c), fd = cost(d);
    for (int it = 0; it < 80; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = cost(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = cost(d);
      }
    }
    model.phase = 0.5 * (a + b);
  }
  HelicoidFit fit{n, top, 0.0, model, win.size()};
  for (const auto &p : win) fit.distance = std::max(fit.distance, model.distance(p));
  return fit;
}

/// max over sampled z of |g(conj z) conj(g(z)) - 1| + |h(conj z) - conj(h(z))|.
inline double symmetry_defect(const WeierstrassFamily &f, int rings = 3, int per_ring = 32) {
  if (!f.is_vertical() && !f.is_helicoid()) {
    throw DomainError("symmetry_defect needs a VerticalFlux or Helicoid family");
  }
  double worst = 0.0;
  for (int k = 0; k < rings; ++k) {
    const double rho = std::max(f.domain_radius, 1.0) * (1 << k);
    for (int j = 0; j < per_ring; ++j) {
      const Complex z = std::polar(rho, kTwoPi * (j + 0.5) / per_ring);
      const Complex zb = std::conj(z);
      const double dg = std::abs(eval_g(f, zb) * std::conj(eval_g(f, z)) - 1.0);
      const double dh = std::abs(eval_dh(f, zb) - std::conj(eval_dh(f, z)));
      worst = std::max(worst, dg + dh);
    }
  }
  return worst;
}

/// With the base point R' on the x3 axis, X(conj z) should be X(z) rotated
/// by 180 degrees about the x3 axis. Returns the largest mismatch.
inline double paired_point_defect(const WeierstrassFamily &f, int rings = 3, int per_ring = 16) {
  if (!f.is_vertical() && !f.is_helicoid()) {
    throw DomainError("paired_point_defect needs a VerticalFlux or Helicoid family");
  }
  Immersion im(f);
  double worst = 0.0;
  for (int k = 0; k < rings; ++k) {
    const double rho = std::max(f.domain_radius, 1.0) * (1.0 + k);
    for (int j = 0; j < per_ring; ++j) {
      const double th = kTwoPi * (j + 0.5) / per_ring - kPi;
      const Vec3 p = im.position(im.at_polar(rho, th));
      const Vec3 q = im.position(im.at_polar(rho, -th));
      worst = std::max(worst, norm(Vec3{p.x + q.x, p.y + q.y, p.z - q.z}));
    }
  }
  return worst;
}

/// Largest |K| on the circle |z| = rho. |K| peaks where |g| = 1, near the
/// line Im w = 0, so only the two arcs crossing that line are searched.
inline double ring_max_abs_curvature(const WeierstrassFamily &f, double rho) {
  if (!(rho >= f.domain_radius)) throw DomainError("ring below R'");
  const NormalForm nf = normal_form(f);
  const double y_line = -nf.shift.imag();  // Im z on Im w = 0
  double best = 0.0;
  auto absk = [&](double s, int side) {
    const double x = side * std::sqrt(std::max(0.0, rho * rho - s * s));
    return -gauss_curvature(f, Complex{x, s});
  };
  for (int side : {1, -1}) {
    const double lo = std::max(-rho, y_line - 8.0), hi = std::min(rho, y_line + 8.0);
    if (lo >= hi) continue;
    const int n = 400;
    double bs = lo, bv = -1.0;
    for (int k = 0; k <= n; ++k) {
      const double s = lo + (hi - lo) * k / n;
      const double v = absk(s, side);
      if (v > bv) {
        bv = v;
        bs = s;
      }
    }
    const double h = (hi - lo) / n;
    double a = std::max(lo, bs - h), b = std::min(hi, bs + h);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double c = b - gr * (b - a), d = a + gr * (b - a);
      if (absk(c, side) > absk(d, side)) b = d; else a = c;
    }
    best = std::max({best, bv, absk(0.5 * (a + b), side)});
  }
  return best;
}

/// Multigraph sheets as (r, theta) grids of normalized positions.
inline MeshGrid multigraph_mesh(const NormalizedEnd &end, const std::vector<double> &r_values,
                                const std::vector<double> &thetas, int branch) {
  MeshGrid g;
  g.r_values = r_values;
  g.theta_values = thetas;
  g.sheet = branch;
  g.points.reserve(r_values.size() * thetas.size());
  for (double r : r_values) {
    for (double th : thetas) {
      const auto s = extract_multigraph(end, r, th, branch);
      g.points.push_back({r * std::cos(th), r * std::sin(th), s.u});
      g.z.push_back(s.z);
    }
  }
  return g;
}

}  // namespace minsurf
