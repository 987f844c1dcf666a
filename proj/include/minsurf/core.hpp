#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace minsurf {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Point or vector in R^3.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 &operator+=(const Vec3 &o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3 &operator-=(const Vec3 &o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  friend constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
  friend constexpr Vec3 operator*(double s, const Vec3 &a) {
    return {s * a.x, s * a.y, s * a.z};
  }
  friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;

  /// Horizontal part as x + iy.
  Complex horizontal() const { return {x, y}; }
};

inline double dot(const Vec3 &a, const Vec3 &b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3 &a, const Vec3 &b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}
inline bool is_finite(const Vec3 &v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Input outside an operation's domain (|z| < R', wrong variant, bad
/// parameters).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive or periodic quadrature hit its work cap before converging.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string &what, Complex last, Complex previous)
      : std::runtime_error(what), last_(last), previous_(previous) {}
  Complex last() const { return last_; }
  Complex previous() const { return previous_; }

 private:
  Complex last_;
  Complex previous_;
};

/// A root finder, bracket search or certificate check failed.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string &what, std::string trace = {})
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::string &trace() const { return trace_; }

 private:
  std::string trace_;
};

}  // namespace minsurf
