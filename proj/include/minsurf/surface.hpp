#pragma once

// The immersion X = Re int (1/2 (1/g - g), i/2 (1/g + g), 1) dh, evaluated
// by path integration from the base point z0 = R' (z0 = 0 for the helicoid).
// Horizontal part: x1 + i x2 = 1/2 (conj G1 - G2), G1 = int h/g, G2 = int g h.
// The height x3 comes from its closed form.
//
// Paths go along the circle |xi| = R' to the target argument and then
// radially outwards. Large circles are avoided on purpose: |e^{iz}| reaches
// e^{|z|} there, while a ray only sees the growth of its endpoint.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <string>
#include <vector>

#include "minsurf/core.hpp"
#include "minsurf/quadrature.hpp"
#include "minsurf/wdata.hpp"

namespace minsurf {

/// Path-integration state: the point reached and the two running integrals.
struct PathState {
  Complex z{};
  Complex g1{};  // int h/g dz
  Complex g2{};  // int g h dz
};

class Immersion {
 public:
  explicit Immersion(WeierstrassFamily f,
                     quad::Options opt = {1e-13, 1e-15, 1, 200000})
      : f_(std::move(f)), opt_(opt) {}

  const WeierstrassFamily &family() const { return f_; }
  Complex base() const { return {f_.domain_radius, 0.0}; }
  PathState start() const { return {base(), {}, {}}; }

  /// Straight segment from s.z to z, which must stay in |xi| >= R'.
  PathState advance(const PathState &s, Complex z) const {
    check_domain(f_, z);
    if (segment_distance(s.z, z) < f_.domain_radius * (1.0 - 1e-12)) {
      throw DomainError("segment crosses the excluded disk |z| < R'");
    }
    auto r = quad::integrate_segment<2>(
        [&](Complex xi) { return integrand(xi); }, s.z, z, opt_);
    return {z, s.g1 + r.value[0], s.g2 + r.value[1]};
  }

  /// Arc on the circle |xi| = |s.z| from arg angle phi0 (the current
  /// position) to phi1; angles live on the universal cover.
  PathState arc(const PathState &s, double phi0, double phi1) const {
    const double rho = std::abs(s.z);
    if (rho < f_.domain_radius * (1.0 - 1e-12)) {
      throw DomainError("arc radius below R'");
    }
    if (phi0 == phi1) return s;
    auto r = quad::integrate_arc<2>([&](Complex xi) { return integrand(xi); },
                                    rho, phi0, phi1, opt_);
    return {std::polar(rho, phi1), s.g1 + r.value[0], s.g2 + r.value[1]};
  }

  /// State at r e^{i theta} reached along the base circle then the ray.
  PathState at_polar(double r, double theta) const {
    if (!(r >= f_.domain_radius * (1.0 - 1e-12)) || !std::isfinite(theta)) {
      throw DomainError("polar point outside the domain");
    }
    PathState s = start();
    if (f_.domain_radius > 0.0) s = arc(s, 0.0, theta);
    return advance(s, std::polar(r, theta));
  }

  PathState at(Complex z) const {
    return at_polar(std::abs(z), std::arg(z));
  }

  static Complex horizontal(const PathState &s) {
    return 0.5 * (std::conj(s.g1) - s.g2);
  }

  Vec3 position(const PathState &s) const {
    const Complex h = horizontal(s);
    return {h.real(), h.imag(), eval_x3(f_, s.z, base())};
  }

  /// d(x1 + i x2) / dx and / dy at z, for Newton solves in z = x + iy.
  std::pair<Complex, Complex> horizontal_jacobian(Complex z) const {
    const Complex h = detail::dh_unchecked(f_, z);
    const Complex g = detail::g_unchecked(f_, z);
    const Complex a = h / g, b = g * h;
    return {0.5 * (std::conj(a) - b), 0.5 * (std::conj(kI * a) - kI * b)};
  }

 private:
  quad::CVec<2> integrand(Complex xi) const {
    const Complex h = detail::dh_unchecked(f_, xi);
    const Complex g = detail::g_unchecked(f_, xi);
    return {h / g, g * h};
  }

  static double segment_distance(Complex a, Complex b) {
    const Complex d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(a);
    const double s = std::clamp(-(std::conj(d) * a).real() / len2, 0.0, 1.0);
    return std::abs(a + s * d);
  }

  WeierstrassFamily f_;
  quad::Options opt_;
};

/// X(z) along the default path from the base point.
inline Vec3 immerse(const WeierstrassFamily &f, Complex z) {
  Immersion im(f);
  return im.position(im.at(z));
}

/// X(z) - X(z0), both reached along the default paths.
inline Vec3 immerse(const WeierstrassFamily &f, Complex z, Complex z0) {
  Immersion im(f);
  return im.position(im.at(z)) - im.position(im.at(z0));
}

/// K = -16 / (|g| + |g|^-1)^4 * |g'/g|^2 / |h|^2.
inline double gauss_curvature(const WeierstrassFamily &f, Complex z) {
  const double ag = std::abs(eval_g(f, z));
  const double s = ag + 1.0 / ag;
  const double s2 = s * s;
  const double ld = std::abs(eval_log_deriv_g(f, z));
  const double h = std::abs(eval_dh(f, z));
  if (!std::isfinite(s2)) return -0.0;
  return -16.0 / (s2 * s2) * (ld * ld) / (h * h);
}

/// Points on an (r, theta) grid, row-major with r as the slow index.
/// sheet 0 marks a conformal domain grid, 1 and 2 the multigraph branches.
struct MeshGrid {
  std::vector<double> r_values;
  std::vector<double> theta_values;
  std::vector<Vec3> points;
  std::vector<Complex> z;
  int sheet = 0;
  double closure_defect = 0.0;

  std::size_t nr() const { return r_values.size(); }
  std::size_t ntheta() const { return theta_values.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * ntheta() + j; }
  const Vec3 &at(std::size_t i, std::size_t j) const { return points[index(i, j)]; }
};

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    v[static_cast<std::size_t>(k)] = (n == 1) ? a : a + (b - a) * k / (n - 1);
  }
  if (n > 1) v.back() = b;
  return v;
}

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immersion on z = r e^{i theta}, r in [r_min, r_max], theta in [0, span].
/// Each spoke is integrated outwards on its own; ring arcs are integrated
/// independently and compared with spoke differences to give the cell
/// closure defect. The defect is relative to max(1, |x1 + i x2|): far out
/// the coordinates grow like e^{|z|} and an absolute bound would sit below
/// double resolution.
inline MeshGrid sample_mesh(const WeierstrassFamily &f, double r_min,
                            double r_max, int nr, int ntheta, double theta_span,
                            int jobs = 1) {
  if (nr < 2 || ntheta < 2) throw DomainError("mesh needs nr, ntheta >= 2");
  if (!(r_min >= f.domain_radius) || !(r_max > r_min) || !std::isfinite(r_max)) {
    throw DomainError("mesh needs R' <= r_min < r_max");
  }
  if (!(theta_span > 0.0) || !std::isfinite(theta_span)) {
    throw DomainError("theta span must be positive");
  }
  Immersion im(f);
  MeshGrid g;
  g.r_values = linspace(r_min, r_max, nr);
  g.theta_values = linspace(0.0, theta_span, ntheta);
  g.points.resize(static_cast<std::size_t>(nr) * ntheta);
  g.z.resize(g.points.size());
  std::vector<std::vector<Complex>> horiz(static_cast<std::size_t>(ntheta));

  auto spoke = [&](std::size_t j) {
    const double th = g.theta_values[j];
    std::vector<Complex> h(static_cast<std::size_t>(nr));
    try {
      PathState s = im.at_polar(g.r_values[0], th);
      for (std::size_t i = 0; i < g.nr(); ++i) {
        if (i > 0) s = im.advance(s, std::polar(g.r_values[i], th));
        g.points[g.index(i, j)] = im.position(s);
        g.z[g.index(i, j)] = s.z;
        h[i] = Immersion::horizontal(s);
      }
    } catch (const std::exception &e) {
      throw MeshError("spoke " + std::to_string(j) + ": " + e.what());
    }
    horiz[j] = std::move(h);
  };
  auto ring_defect = [&](std::size_t i) {
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < g.ntheta(); ++j) {
      const PathState s{std::polar(g.r_values[i], g.theta_values[j]), {}, {}};
      PathState e;
      try {
        e = im.arc(s, g.theta_values[j], g.theta_values[j + 1]);
      } catch (const std::exception &ex) {
        throw MeshError("ring " + std::to_string(i) + " cell " +
                        std::to_string(j) + ": " + ex.what());
      }
      const Complex d = horiz[j + 1][i] - horiz[j][i] - Immersion::horizontal(e);
      const double scale = std::max({1.0, std::abs(horiz[j][i]), std::abs(horiz[j + 1][i])});
      worst = std::max(worst, std::abs(d) / scale);
    }
    return worst;
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (std::size_t j = 0; j < g.ntheta(); ++j) spoke(j);
    for (std::size_t i = 0; i < g.nr(); ++i) {
      g.closure_defect = std::max(g.closure_defect, ring_defect(i));
    }
    return g;
  }
  // Static striping keeps every result independent of the job count.
  auto stripe = [&](auto &&work, std::size_t count) {
    std::vector<std::future<void>> fs;
    for (int w = 0; w < jobs; ++w) {
      fs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t k = static_cast<std::size_t>(w); k < count;
             k += static_cast<std::size_t>(jobs)) {
          work(k);
        }
      }));
    }
    for (auto &fu : fs) fu.get();
  };
  stripe(spoke, g.ntheta());
  std::vector<double> defects(g.nr(), 0.0);
  stripe([&](std::size_t i) { defects[i] = ring_defect(i); }, g.nr());
  for (double d : defects) g.closure_defect = std::max(g.closure_defect, d);
  return g;
}

enum class MeshFormat { Obj, Ply };

struct MeshExport {
  std::string bytes;
  std::size_t vertices = 0;
  std::size_t triangles = 0;
  std::size_t skipped = 0;  // degenerate triangles left out
};

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Two triangles per grid cell, split along the (i,j)-(i+1,j+1) diagonal.
/// Triangles with area below 1e-14 are skipped and counted. Comment lines
/// are written verbatim into the header.
inline MeshExport export_mesh(const MeshGrid &g, MeshFormat fmt,
                              const std::vector<std::string> &comments = {}) {
  if (g.points.empty() || g.nr() < 2 || g.ntheta() < 2 ||
      g.points.size() != g.nr() * g.ntheta()) {
    throw DomainError("export_mesh needs a nonempty consistent grid");
  }
  std::vector<std::array<std::size_t, 3>> tris;
  std::size_t skipped = 0;
  auto push = [&](std::size_t a, std::size_t b, std::size_t c) {
    const Vec3 n = cross(g.points[b] - g.points[a], g.points[c] - g.points[a]);
    if (0.5 * norm(n) < 1e-14) {
      ++skipped;
      return;
    }
    tris.push_back({a, b, c});
  };
  for (std::size_t i = 0; i + 1 < g.nr(); ++i) {
    for (std::size_t j = 0; j + 1 < g.ntheta(); ++j) {
      push(g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1));
      push(g.index(i, j), g.index(i + 1, j + 1), g.index(i, j + 1));
    }
  }
  std::string out;
  auto vline = [&](const Vec3 &p) {
    return format_double(p.x) + " " + format_double(p.y) + " " + format_double(p.z);
  };
  if (fmt == MeshFormat::Obj) {
    for (const auto &c : comments) out += "# " + c + "\n";
    for (const auto &p : g.points) out += "v " + vline(p) + "\n";
    for (const auto &t : tris) {
      out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) +
             " " + std::to_string(t[2] + 1) + "\n";
    }
  } else {
    out += "ply\nformat ascii 1.0\n";
    for (const auto &c : comments) out += "comment " + c + "\n";
    out += "element vertex " + std::to_string(g.points.size()) + "\n";
    out += "property double x\nproperty double y\nproperty double z\n";
    out += "element face " + std::to_string(tris.size()) + "\n";
    out += "property list uchar int vertex_indices\nend_header\n";
    for (const auto &p : g.points) out += vline(p) + "\n";
    for (const auto &t : tris) {
      out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
             std::to_string(t[2]) + "\n";
    }
  }
  return {std::move(out), g.points.size(), tris.size(), skipped};
}

}  // namespace minsurf
