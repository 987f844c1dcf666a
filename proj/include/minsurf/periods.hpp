#pragma once

// Boundary integrals of g dh, dh/g and dh over |z| = R, the horizontal
// period residual and the flux vector.

#include <array>
#include <cmath>
#include <string>

#include "minsurf/core.hpp"
#include "minsurf/quadrature.hpp"
#include "minsurf/wdata.hpp"

namespace minsurf {

enum class Integrand { GDh, DhOverG, Dh };

struct ContourSpec {
  double radius = 1.0;
  int samples = 64;  // starting sample count, power of two >= 64
  quad::Orientation orientation = quad::Orientation::ExteriorBoundary;
};

/// Loop integrals and the derived period defect and flux.
struct PeriodReport {
  Complex int_gdh{};
  Complex int_dh_over_g{};
  Complex int_dh{};
  double period_residual = 0.0;
  Vec3 flux{};
};

/// |conj(int g dh) - int dh/g| + |Re int dh|, flux = (i int g dh, Im int dh).
inline PeriodReport assemble_report(Complex gdh, Complex dh_over_g, Complex dh) {
  PeriodReport r{gdh, dh_over_g, dh, 0.0, {}};
  r.period_residual = std::abs(std::conj(gdh) - dh_over_g) + std::abs(dh.real());
  const Complex horizontal = kI * gdh;
  r.flux = {horizontal.real(), horizontal.imag(), dh.imag()};
  return r;
}

inline Complex contour_integral(const WeierstrassFamily &f, Integrand which,
                                const ContourSpec &spec) {
  if (!(spec.radius >= f.domain_radius) || spec.radius <= 0.0) {
    throw DomainError("contour radius must be positive and at least R'");
  }
  if (spec.samples < 64 || (spec.samples & (spec.samples - 1)) != 0) {
    throw DomainError("contour samples must be a power of two >= 64");
  }
  // Long double: on |z| = R the terms reach e^R while the loop integral
  // stays O(1).
  using CL = std::complex<long double>;
  auto integrand = [&](CL z) -> CL {
    const CL h = detail::dh_unchecked(f, z);
    switch (which) {
      case Integrand::GDh: return detail::g_unchecked(f, z) * h;
      case Integrand::DhOverG: return h / detail::g_unchecked(f, z);
      case Integrand::Dh: return h;
    }
    return {};
  };
  auto res = quad::trapezoid_circle(integrand, spec.radius, spec.samples,
                                    spec.orientation);
  if (!res.converged) {
    throw QuadratureError("circle quadrature did not converge at " +
                              std::to_string(res.samples) + " samples",
                          res.value, res.previous);
  }
  return res.value;
}

/// Residue-calculus values for the constructed variants (exterior-boundary
/// orientation). GenericExp has no closed form and is rejected.
inline PeriodReport closed_form_periods(const WeierstrassFamily &f) {
  const Complex rot = std::polar(1.0, f.rotation);
  const Complex two_pi_i = kTwoPi * kI;
  if (f.is_helicoid()) return assemble_report({}, {}, {});
  if (const auto *p = std::get_if<NonVerticalFlux>(&f.data)) {
    const Complex A = p->A;
    const double B = p->B, t = p->t;
    const Complex gdh = two_pi_i * t * (A - B + kI * A * B);
    const Complex dhg = -two_pi_i * (A + B) / (t * std::exp(kI * A));
    return assemble_report(rot * gdh, std::conj(rot) * dhg,
                           -two_pi_i * B);
  }
  if (const auto *p = std::get_if<VerticalFlux>(&f.data)) {
    const Complex A = p->A, Ab = std::conj(A);
    const double B = p->B;
    // Sum of residues of g dh at 0 and conj(A); dh/g gives its conjugate.
    const Complex S =
        std::exp(kI * Ab) * (Ab - A + B - A * B / Ab) + A * B / Ab;
    return assemble_report(rot * (-two_pi_i * S),
                           std::conj(rot) * (-two_pi_i * std::conj(S)),
                           -two_pi_i * B);
  }
  throw DomainError("closed-form periods are not available for GenericExp");
}

/// Closed forms when available, otherwise quadrature just outside R'.
inline PeriodReport period_residual_and_flux(const WeierstrassFamily &f) {
  if (!f.is_generic()) return closed_form_periods(f);
  ContourSpec spec{f.domain_radius + 0.25, 64,
                   quad::Orientation::ExteriorBoundary};
  return assemble_report(contour_integral(f, Integrand::GDh, spec),
                         contour_integral(f, Integrand::DhOverG, spec),
                         contour_integral(f, Integrand::Dh, spec));
}

/// Same report computed entirely by quadrature on the given contour.
inline PeriodReport quadrature_periods(const WeierstrassFamily &f,
                                       const ContourSpec &spec) {
  return assemble_report(contour_integral(f, Integrand::GDh, spec),
                         contour_integral(f, Integrand::DhOverG, spec),
                         contour_integral(f, Integrand::Dh, spec));
}

}  // namespace minsurf
