#pragma once

// Explicit Weierstrass data (g, dh) for the annular ends built in this
// library, all of the form g = e^{i alpha} * (helicoid factor) * rational,
// dh = (1 + lambda / (z - mu)) dz on the exterior disk |z| >= R'.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "minsurf/core.hpp"

namespace minsurf {

/// g(z) = e^{iz}, dh = dz.
struct Helicoid {};

/// g(z) = t e^{iz} (z - A) / z, dh = (1 + B/z) dz.
struct NonVerticalFlux {
  double t = 1.0;
  Complex A{1.0, 0.0};
  double B = 0.0;
};

/// g(z) = e^{iz} (z - A) / (z - conj(A)), dh = (1 + B/z) dz, Im A > 0.
struct VerticalFlux {
  Complex A{kTwoPi, 1.0};
  double B = 1.0;
};

/// g(z) = e^{iz + f(z)} with f(z) = sum_k c_k z^{-k}, dh = (1 + lambda/(z-mu)) dz.
struct GenericExp {
  std::vector<Complex> laurent;  // c_1 .. c_m
  double lambda = 0.0;
  Complex mu{0.0, 0.0};
};

using FamilyVariant =
    std::variant<Helicoid, NonVerticalFlux, VerticalFlux, GenericExp>;

/// One member of the explicit families, post-rotated by e^{i rotation} and
/// living on |z| >= domain_radius. Build through the make_* helpers so the
/// invariants are checked.
struct WeierstrassFamily {
  FamilyVariant data;
  double rotation = 0.0;
  double domain_radius = 0.0;

  bool is_helicoid() const { return std::holds_alternative<Helicoid>(data); }
  bool is_nonvertical() const {
    return std::holds_alternative<NonVerticalFlux>(data);
  }
  bool is_vertical() const { return std::holds_alternative<VerticalFlux>(data); }
  bool is_generic() const { return std::holds_alternative<GenericExp>(data); }
};

inline std::string_view variant_name(const WeierstrassFamily &f) {
  struct V {
    std::string_view operator()(const Helicoid &) const { return "Helicoid"; }
    std::string_view operator()(const NonVerticalFlux &) const {
      return "NonVerticalFlux";
    }
    std::string_view operator()(const VerticalFlux &) const {
      return "VerticalFlux";
    }
    std::string_view operator()(const GenericExp &) const {
      return "GenericExp";
    }
  };
  return std::visit(V{}, f.data);
}

/// Largest modulus of a zero or pole of g or dh (the disk the end must
/// avoid). Zero for the helicoid.
inline double singular_radius(const FamilyVariant &v) {
  struct V {
    double operator()(const Helicoid &) const { return 0.0; }
    double operator()(const NonVerticalFlux &p) const {
      return std::max(std::abs(p.A), p.B);
    }
    double operator()(const VerticalFlux &p) const {
      return std::max(std::abs(p.A), p.B);
    }
    double operator()(const GenericExp &p) const {
      // f itself is singular only at the origin.
      return std::max(std::abs(p.mu), std::abs(p.mu - p.lambda));
    }
  };
  return std::visit(V{}, v);
}

/// Default R': half a unit outside the singular disk (at least 1.5), or 0
/// for the helicoid, whose data are entire.
inline double default_domain_radius(const FamilyVariant &v) {
  if (std::holds_alternative<Helicoid>(v)) return 0.0;
  return std::max(singular_radius(v), 1.0) + 0.5;
}

namespace detail {

inline void require(bool ok, const char *msg) {
  if (!ok) throw DomainError(msg);
}

inline void validate(const WeierstrassFamily &f) {
  require(std::isfinite(f.rotation), "rotation must be finite");
  require(std::isfinite(f.domain_radius) && f.domain_radius >= 0.0,
          "domain radius must be finite and nonnegative");
  struct V {
    double R;
    void operator()(const Helicoid &) const {}
    void operator()(const NonVerticalFlux &p) const {
      require(std::isfinite(p.t) && p.t > 0.0, "t must be positive");
      require(is_finite(p.A) && p.A != Complex{}, "A must be nonzero");
      require(std::isfinite(p.B) && p.B >= 0.0, "B must be nonnegative");
    }
    void operator()(const VerticalFlux &p) const {
      require(is_finite(p.A) && p.A.imag() > 0.0, "vertical flux needs Im A > 0");
      require(std::isfinite(p.B) && p.B > 0.0, "vertical flux needs B > 0");
    }
    void operator()(const GenericExp &p) const {
      for (const auto &c : p.laurent) require(is_finite(c), "Laurent coefficient not finite");
      require(std::isfinite(p.lambda) && p.lambda >= 0.0, "lambda must be nonnegative");
      require(is_finite(p.mu), "mu must be finite");
      require(R > 0.0 || p.laurent.empty(), "Laurent tail needs R' > 0");
    }
  };
  std::visit(V{f.domain_radius}, f.data);
  if (!f.is_helicoid()) {
    require(f.domain_radius > singular_radius(f.data),
            "R' must exceed every zero/pole modulus of g and dh");
  }
}

}  // namespace detail

/// Builds and validates a family; a negative radius selects the default rule.
inline WeierstrassFamily make_family(FamilyVariant v, double rotation = 0.0,
                                     double domain_radius = -1.0) {
  WeierstrassFamily f{std::move(v), rotation, domain_radius};
  if (domain_radius < 0.0) f.domain_radius = default_domain_radius(f.data);
  detail::validate(f);
  return f;
}

inline WeierstrassFamily make_helicoid(double rotation = 0.0) {
  return make_family(Helicoid{}, rotation);
}
inline WeierstrassFamily make_nonvertical(double t, Complex A, double B,
                                          double rotation = 0.0) {
  return make_family(NonVerticalFlux{t, A, B}, rotation);
}
inline WeierstrassFamily make_vertical(Complex A, double B,
                                       double rotation = 0.0) {
  return make_family(VerticalFlux{A, B}, rotation);
}
inline WeierstrassFamily make_generic(std::vector<Complex> laurent,
                                      double lambda, Complex mu,
                                      double rotation = 0.0) {
  return make_family(GenericExp{std::move(laurent), lambda, mu}, rotation);
}

/// Throws DomainError unless |z| >= R' (with a relative slack of 1e-12).
inline void check_domain(const WeierstrassFamily &f, Complex z) {
  if (!is_finite(z)) throw DomainError("non-finite point");
  const double R = f.domain_radius;
  if (std::abs(z) < R * (1.0 - 1e-12)) {
    throw DomainError("point lies inside the excluded disk |z| < R'");
  }
}

namespace detail {

template <class C = Complex>
C laurent_value(const std::vector<Complex> &c, C z) {
  // Horner in 1/z.
  if (c.empty()) return {};
  const C u = C(1) / z;
  C acc{};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = (acc + C(*it)) * u;
  return acc;
}

inline Complex laurent_derivative(const std::vector<Complex> &c, Complex z) {
  const Complex u = 1.0 / z;
  Complex acc{};
  Complex power = u * u;  // z^{-k-1} for k = 1
  for (std::size_t k = 0; k < c.size(); ++k) {
    acc -= static_cast<double>(k + 1) * c[k] * power;
    power *= u;
  }
  return acc;
}

// Unchecked kernels shared by the quadrature loops. C is Complex, or
// std::complex<long double> for loop integrals whose terms grow like e^{|z|}.
template <class C = Complex>
C g_unchecked(const WeierstrassFamily &f, C z) {
  using R = typename C::value_type;
  struct V {
    C z, i;
    C operator()(const Helicoid &) const { return std::exp(i * z); }
    C operator()(const NonVerticalFlux &p) const {
      return R(p.t) * std::exp(i * z) * ((z - C(p.A)) / z);
    }
    C operator()(const VerticalFlux &p) const {
      return std::exp(i * z) * ((z - C(p.A)) / (z - C(std::conj(p.A))));
    }
    C operator()(const GenericExp &p) const {
      return std::exp(i * z + laurent_value<C>(p.laurent, z));
    }
  };
  return std::polar(R(1), R(f.rotation)) * std::visit(V{z, C(0, 1)}, f.data);
}

template <class C = Complex>
C dh_unchecked(const WeierstrassFamily &f, C z) {
  using R = typename C::value_type;
  struct V {
    C z;
    C operator()(const Helicoid &) const { return C(1); }
    C operator()(const NonVerticalFlux &p) const { return R(1) + R(p.B) / z; }
    C operator()(const VerticalFlux &p) const { return R(1) + R(p.B) / z; }
    C operator()(const GenericExp &p) const {
      return R(1) + R(p.lambda) / (z - C(p.mu));
    }
  };
  return std::visit(V{z}, f.data);
}

inline Complex log_deriv_unchecked(const WeierstrassFamily &f, Complex z) {
  struct V {
    Complex z;
    Complex operator()(const Helicoid &) const { return kI; }
    Complex operator()(const NonVerticalFlux &p) const {
      return kI + p.A / (z * (z - p.A));
    }
    Complex operator()(const VerticalFlux &p) const {
      // d/dz log((z - A)/(z - conj A))
      const Complex Ab = std::conj(p.A);
      return kI + (p.A - Ab) / ((z - p.A) * (z - Ab));
    }
    Complex operator()(const GenericExp &p) const {
      return kI + laurent_derivative(p.laurent, z);
    }
  };
  return std::visit(V{z}, f.data);
}

}  // namespace detail

/// g(z), rotation included.
inline Complex eval_g(const WeierstrassFamily &f, Complex z) {
  check_domain(f, z);
  return detail::g_unchecked(f, z);
}

/// h(z) with dh = h(z) dz.
inline Complex eval_dh(const WeierstrassFamily &f, Complex z) {
  check_domain(f, z);
  return detail::dh_unchecked(f, z);
}

/// (dg/g)/dz = i + f'(z).
inline Complex eval_log_deriv_g(const WeierstrassFamily &f, Complex z) {
  check_domain(f, z);
  return detail::log_deriv_unchecked(f, z);
}

/// Height-differential residue data: dh = (1 + lambda/(z - pole)) dz.
struct HeightPole {
  double lambda = 0.0;
  Complex pole{};
};

inline HeightPole height_pole(const WeierstrassFamily &f) {
  struct V {
    HeightPole operator()(const Helicoid &) const { return {}; }
    HeightPole operator()(const NonVerticalFlux &p) const { return {p.B, {}}; }
    HeightPole operator()(const VerticalFlux &p) const { return {p.B, {}}; }
    HeightPole operator()(const GenericExp &p) const { return {p.lambda, p.mu}; }
  };
  return std::visit(V{}, f.data);
}

/// Re of the integral of dh from z0 to z: Re(z - z0) + lambda log|(z-mu)/(z0-mu)|.
inline double eval_x3(const WeierstrassFamily &f, Complex z, Complex z0) {
  check_domain(f, z);
  check_domain(f, z0);
  const auto hp = height_pole(f);
  double x3 = (z - z0).real();
  if (hp.lambda != 0.0) {
    x3 += hp.lambda * (std::log(std::abs(z - hp.pole)) -
                       std::log(std::abs(z0 - hp.pole)));
  }
  return x3;
}

/// Coordinates w = z + shift in which g = e^{iw + f(w)} with f(inf) = 0, and
/// dh = (1 + lambda/(w - mu_w)) dw. The asymptotic statements (axis rays
/// along real w, model graphs, helicoid limits) are phrased in w.
struct NormalForm {
  Complex shift{};
  double lambda = 0.0;
  Complex pole_z{};  // pole of dh in z coordinates

  Complex to_w(Complex z) const { return z + shift; }
  Complex to_z(Complex w) const { return w - shift; }
  Complex pole_w() const { return pole_z + shift; }
};

inline NormalForm normal_form(const WeierstrassFamily &f) {
  Complex shift{f.rotation, 0.0};
  if (const auto *p = std::get_if<NonVerticalFlux>(&f.data)) {
    shift -= kI * std::log(p->t);
  }
  const auto hp = height_pole(f);
  return {shift, hp.lambda, hp.pole};
}

}  // namespace minsurf
