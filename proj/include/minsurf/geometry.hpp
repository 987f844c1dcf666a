#pragma once

// Sampled embeddedness: exact-arithmetic-free triangle/triangle intersection
// (interval overlap on the line of the two planes, with a coplanar branch)
// behind a uniform spatial hash.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "minsurf/core.hpp"
#include "minsurf/surface.hpp"

namespace minsurf {

using Triangle = std::array<Vec3, 3>;

namespace detail {

inline int sign_eps(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }

inline double orient2(const std::array<double, 2> &a, const std::array<double, 2> &b,
                      const std::array<double, 2> &c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

inline bool segments_cross_2d(const std::array<double, 2> &p1, const std::array<double, 2> &p2,
                              const std::array<double, 2> &q1, const std::array<double, 2> &q2,
                              double eps) {
  const int a = sign_eps(orient2(p1, p2, q1), eps), b = sign_eps(orient2(p1, p2, q2), eps);
  const int c = sign_eps(orient2(q1, q2, p1), eps), d = sign_eps(orient2(q1, q2, p2), eps);
  if (a * b > 0 || c * d > 0) return false;
  if (a == 0 && b == 0) {
    // Collinear: overlap of the projections on both axes.
    for (int k = 0; k < 2; ++k) {
      if (std::max(p1[k], p2[k]) < std::min(q1[k], q2[k]) - eps ||
          std::max(q1[k], q2[k]) < std::min(p1[k], p2[k]) - eps) {
        return false;
      }
    }
  }
  return true;
}

inline bool point_in_tri_2d(const std::array<double, 2> &p,
                            const std::array<std::array<double, 2>, 3> &t, double eps) {
  const double s = orient2(t[0], t[1], t[2]) >= 0.0 ? 1.0 : -1.0;
  for (int k = 0; k < 3; ++k) {
    if (s * orient2(t[k], t[(k + 1) % 3], p) < -eps) return false;
  }
  return true;
}

inline bool coplanar_overlap(const Triangle &a, const Triangle &b, const Vec3 &n, double eps) {
  // Drop the dominant normal axis.
  const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
  auto proj = [&](const Vec3 &p) -> std::array<double, 2> {
    if (ax >= ay && ax >= az) return {p.y, p.z};
    if (ay >= az) return {p.x, p.z};
    return {p.x, p.y};
  };
  std::array<std::array<double, 2>, 3> pa{proj(a[0]), proj(a[1]), proj(a[2])};
  std::array<std::array<double, 2>, 3> pb{proj(b[0]), proj(b[1]), proj(b[2])};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (segments_cross_2d(pa[i], pa[(i + 1) % 3], pb[j], pb[(j + 1) % 3], eps)) return true;
    }
  }
  return point_in_tri_2d(pa[0], pb, eps) || point_in_tri_2d(pb[0], pa, eps);
}

/// Interval of triangle t on the line direction D, given signed plane
/// distances d (one vertex isolated on its side).
inline std::pair<double, double> line_interval(const Triangle &t, const std::array<double, 3> &d,
                                               const Vec3 &D) {
  std::array<double, 3> p{dot(D, t[0]), dot(D, t[1]), dot(D, t[2])};
  // Pick the vertex alone on its side of the plane.
  int lone;
  if (d[0] * d[1] > 0.0) lone = 2;
  else if (d[0] * d[2] > 0.0) lone = 1;
  else if (d[1] * d[2] > 0.0 || d[0] != 0.0) lone = 0;
  else if (d[1] != 0.0) lone = 1;
  else lone = 2;
  const int i1 = (lone + 1) % 3, i2 = (lone + 2) % 3;
  auto cut = [&](int k) {
    const double den = d[lone] - d[k];
    return den == 0.0 ? p[k] : p[lone] + (p[k] - p[lone]) * d[lone] / den;
  };
  double s = cut(i1), e = cut(i2);
  if (s > e) std::swap(s, e);
  return {s, e};
}

}  // namespace detail

/// True when the closed triangles share at least one point. Tolerances are
/// relative to the size of the pair.
inline bool triangles_intersect(const Triangle &a, const Triangle &b) {
  double scale = 0.0;
  for (const auto &t : {a, b}) {
    for (const auto &p : t) scale = std::max({scale, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
  }
  const double tiny = 1e-12;
  const Vec3 n2 = cross(b[1] - b[0], b[2] - b[0]);
  const double n2len = norm(n2);
  std::array<double, 3> da{};
  for (int k = 0; k < 3; ++k) da[k] = dot(n2, a[k] - b[0]);
  const double eps_a = tiny * n2len * std::max(1.0, scale);
  for (auto &v : da) if (std::abs(v) <= eps_a) v = 0.0;
  if ((da[0] > 0 && da[1] > 0 && da[2] > 0) || (da[0] < 0 && da[1] < 0 && da[2] < 0)) return false;

  const Vec3 n1 = cross(a[1] - a[0], a[2] - a[0]);
  const double n1len = norm(n1);
  std::array<double, 3> db{};
  for (int k = 0; k < 3; ++k) db[k] = dot(n1, b[k] - a[0]);
  const double eps_b = tiny * n1len * std::max(1.0, scale);
  for (auto &v : db) if (std::abs(v) <= eps_b) v = 0.0;
  if ((db[0] > 0 && db[1] > 0 && db[2] > 0) || (db[0] < 0 && db[1] < 0 && db[2] < 0)) return false;

  if (da[0] == 0.0 && da[1] == 0.0 && da[2] == 0.0) {
    return detail::coplanar_overlap(a, b, n1, tiny * scale * scale);
  }
  const Vec3 D = cross(n1, n2);
  const auto [a0, a1] = detail::line_interval(a, da, D);
  const auto [b0, b1] = detail::line_interval(b, db, D);
  const double slack = tiny * norm(D) * std::max(1.0, scale);
  return !(a1 < b0 - slack || b1 < a0 - slack);
}

struct EmbeddingReport {
  bool embedded = true;
  std::size_t triangles = 0;
  std::size_t skipped_degenerate = 0;
  std::size_t candidate_pairs = 0;
  std::size_t intersecting_pairs = 0;
};

/// Sampled injectivity check over one or more grids. Each grid is its own
/// sheet; triangles sharing a (welded) vertex in the same sheet are
/// neighbours and are not tested against each other.
inline EmbeddingReport check_embedded(const std::vector<const MeshGrid *> &grids,
                                      bool stop_at_first = true) {
  struct Tri {
    std::array<std::uint32_t, 3> v;  // welded vertex ids
    int sheet;
    Triangle p;
    Vec3 lo, hi;
  };
  std::vector<Tri> tris;
  EmbeddingReport rep;
  std::uint32_t next_id = 0;
  for (std::size_t s = 0; s < grids.size(); ++s) {
    const MeshGrid &g = *grids[s];
    if (g.points.size() != g.nr() * g.ntheta() || g.nr() < 2 || g.ntheta() < 2) {
      throw DomainError("check_embedded needs consistent grids");
    }
    double scale = 1.0;
    for (const auto &p : g.points) scale = std::max({scale, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
    // Weld coincident vertices of this sheet (e.g. a closed ring of spokes).
    const double q = 1e-9 * scale;
    std::map<std::tuple<long long, long long, long long>, std::uint32_t> seen;
    std::vector<std::uint32_t> id(g.points.size());
    std::vector<std::size_t> owner;  // representative point index per id of this sheet
    const std::uint32_t first_id = next_id;
    for (std::size_t k = 0; k < g.points.size(); ++k) {
      const auto &p = g.points[k];
      const long long kx = std::llround(p.x / q), ky = std::llround(p.y / q), kz = std::llround(p.z / q);
      // Look in the neighbouring cells too, so points straddling a rounding
      // boundary still weld.
      bool found = false;
      for (long long dx = -1; dx <= 1 && !found; ++dx)
        for (long long dy = -1; dy <= 1 && !found; ++dy)
          for (long long dz = -1; dz <= 1 && !found; ++dz) {
            auto it = seen.find({kx + dx, ky + dy, kz + dz});
            if (it != seen.end() && norm(g.points[owner[it->second - first_id]] - p) <= q) {
              id[k] = it->second;
              found = true;
            }
          }
      if (!found) {
        seen.emplace(std::make_tuple(kx, ky, kz), next_id);
        owner.push_back(k);
        id[k] = next_id++;
      }
    }
    auto add = [&](std::size_t a, std::size_t b, std::size_t c) {
      Triangle t{g.points[a], g.points[b], g.points[c]};
      if (0.5 * norm(cross(t[1] - t[0], t[2] - t[0])) < 1e-14) {
        ++rep.skipped_degenerate;
        return;
      }
      Tri tr{{id[a], id[b], id[c]}, static_cast<int>(s), t, t[0], t[0]};
      for (const auto &p : t) {
        tr.lo = {std::min(tr.lo.x, p.x), std::min(tr.lo.y, p.y), std::min(tr.lo.z, p.z)};
        tr.hi = {std::max(tr.hi.x, p.x), std::max(tr.hi.y, p.y), std::max(tr.hi.z, p.z)};
      }
      tris.push_back(tr);
    };
    for (std::size_t i = 0; i + 1 < g.nr(); ++i) {
      for (std::size_t j = 0; j + 1 < g.ntheta(); ++j) {
        add(g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1));
        add(g.index(i, j), g.index(i + 1, j + 1), g.index(i, j + 1));
      }
    }
  }
  rep.triangles = tris.size();
  if (tris.empty()) return rep;

  // Per-axis cell sizes from median extents; triangles are very anisotropic
  // far out on the multigraphs.
  std::array<double, 3> cell{};
  for (int ax = 0; ax < 3; ++ax) {
    std::vector<double> ext;
    ext.reserve(tris.size());
    for (const auto &t : tris) {
      const double e = ax == 0 ? t.hi.x - t.lo.x : ax == 1 ? t.hi.y - t.lo.y : t.hi.z - t.lo.z;
      ext.push_back(e);
    }
    std::nth_element(ext.begin(), ext.begin() + ext.size() / 2, ext.end());
    cell[ax] = std::max(ext[ext.size() / 2], 1e-9);
  }
  auto cidx = [&](double v, int ax) { return static_cast<long long>(std::floor(v / cell[ax])); };
  struct KeyHash {
    std::size_t operator()(const std::tuple<long long, long long, long long> &k) const {
      const auto [a, b, c] = k;
      std::uint64_t h = 1469598103934665603ull;
      for (long long v : {a, b, c}) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ull;
      }
      return static_cast<std::size_t>(h);
    }
  };
  std::unordered_map<std::tuple<long long, long long, long long>, std::vector<std::uint32_t>, KeyHash> hash;
  for (std::uint32_t k = 0; k < tris.size(); ++k) {
    const auto &t = tris[k];
    for (long long x = cidx(t.lo.x, 0); x <= cidx(t.hi.x, 0); ++x)
      for (long long y = cidx(t.lo.y, 1); y <= cidx(t.hi.y, 1); ++y)
        for (long long z = cidx(t.lo.z, 2); z <= cidx(t.hi.z, 2); ++z)
          hash[{x, y, z}].push_back(k);
  }
  auto neighbours = [&](const Tri &a, const Tri &b) {
    if (a.sheet != b.sheet) return false;
    for (auto u : a.v)
      for (auto v : b.v)
        if (u == v) return true;
    return false;
  };
  auto boxes_overlap = [](const Tri &a, const Tri &b) {
    return !(a.hi.x < b.lo.x || b.hi.x < a.lo.x || a.hi.y < b.lo.y || b.hi.y < a.lo.y ||
             a.hi.z < b.lo.z || b.hi.z < a.lo.z);
  };
  // Test each pair once: in the first cell (lexicographic) both boxes share.
  for (const auto &[key, list] : hash) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        const Tri &a = tris[list[i]], &b = tris[list[j]];
        if (!boxes_overlap(a, b)) continue;
        const auto first = std::make_tuple(
            std::max(cidx(a.lo.x, 0), cidx(b.lo.x, 0)), std::max(cidx(a.lo.y, 1), cidx(b.lo.y, 1)),
            std::max(cidx(a.lo.z, 2), cidx(b.lo.z, 2)));
        if (first != key) continue;
        // Two distinct triangles on the same welded vertices are a doubled
        // patch, which is not injective either.
        auto sa = a.v, sb = b.v;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        const bool duplicate = sa == sb;
        if (!duplicate && neighbours(a, b)) continue;
        ++rep.candidate_pairs;
        if (duplicate || triangles_intersect(a.p, b.p)) {
          ++rep.intersecting_pairs;
          rep.embedded = false;
          if (stop_at_first) return rep;
        }
      }
    }
  }
  return rep;
}

inline EmbeddingReport check_embedded(const MeshGrid &g) { return check_embedded({&g}); }

}  // namespace minsurf
