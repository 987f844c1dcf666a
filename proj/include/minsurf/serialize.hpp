#pragma once

// JSON documents for families, period reports and solve results. Field names
// are the external contract of the command-line tool.

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "minsurf/core.hpp"
#include "minsurf/periods.hpp"
#include "minsurf/solver.hpp"
#include "minsurf/wdata.hpp"

namespace minsurf {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "0.1.0";

/// Malformed or inconsistent JSON document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }
inline Json to_json(const Vec3 &v) { return Json::array({v.x, v.y, v.z}); }

inline Json to_json(const WeierstrassFamily &f) {
  Json j;
  j["variant"] = std::string(variant_name(f));
  if (const auto *p = std::get_if<NonVerticalFlux>(&f.data)) {
    j["t"] = p->t;
    j["A"] = to_json(p->A);
    j["B"] = p->B;
  } else if (const auto *p = std::get_if<VerticalFlux>(&f.data)) {
    j["A"] = to_json(p->A);
    j["B"] = p->B;
  } else if (const auto *p = std::get_if<GenericExp>(&f.data)) {
    Json c = Json::array();
    for (auto z : p->laurent) c.push_back(to_json(z));
    j["laurentF"] = c;
    j["lambda"] = p->lambda;
    j["mu"] = to_json(p->mu);
  }
  j["rotation"] = f.rotation;
  j["Rprime"] = f.domain_radius;
  return j;
}

namespace detail {

inline double get_real(const Json &j, const char *key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ParseError(std::string("missing or non-numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

inline Complex get_complex(const Json &j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("complex values are written as [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Complex get_complex(const Json &j, const char *key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return get_complex(j.at(key));
}

}  // namespace detail

/// Accepts a family document or any document with a "family" member.
inline WeierstrassFamily family_from_json(const Json &doc) {
  const Json &j = (doc.is_object() && doc.contains("family")) ? doc.at("family") : doc;
  if (!j.is_object() || !j.contains("variant") || !j.at("variant").is_string()) {
    throw ParseError("family document needs a string 'variant'");
  }
  const std::string v = j.at("variant").get<std::string>();
  const double rot = j.contains("rotation") ? detail::get_real(j, "rotation") : 0.0;
  const double R = j.contains("Rprime") ? detail::get_real(j, "Rprime") : -1.0;
  try {
    if (v == "Helicoid") return make_family(Helicoid{}, rot, R);
    if (v == "NonVerticalFlux") {
      return make_family(NonVerticalFlux{detail::get_real(j, "t"), detail::get_complex(j, "A"),
                                         detail::get_real(j, "B")},
                         rot, R);
    }
    if (v == "VerticalFlux") {
      return make_family(VerticalFlux{detail::get_complex(j, "A"), detail::get_real(j, "B")}, rot,
                         R);
    }
    if (v == "GenericExp") {
      GenericExp g;
      if (j.contains("laurentF")) {
        if (!j.at("laurentF").is_array()) throw ParseError("'laurentF' must be an array");
        for (const auto &c : j.at("laurentF")) g.laurent.push_back(detail::get_complex(c));
      }
      g.lambda = j.contains("lambda") ? detail::get_real(j, "lambda") : 0.0;
      g.mu = j.contains("mu") ? detail::get_complex(j, "mu") : Complex{};
      return make_family(std::move(g), rot, R);
    }
  } catch (const DomainError &e) {
    throw ParseError(std::string("invalid family parameters: ") + e.what());
  }
  throw ParseError("unknown variant '" + v + "'");
}

inline Json to_json(const PeriodReport &r) {
  Json j;
  j["intGdh"] = to_json(r.int_gdh);
  j["intDhOverG"] = to_json(r.int_dh_over_g);
  j["intDh"] = to_json(r.int_dh);
  j["periodResidual"] = r.period_residual;
  j["flux"] = to_json(r.flux);
  return j;
}

inline Json to_json(const SolveResult &r) {
  Json j;
  j["family"] = to_json(r.family);
  j["achievedFlux"] = to_json(r.achieved_flux);
  j["periodResidual"] = r.period_residual;
  j["rotationAngle"] = r.rotation_angle;
  Json d = Json::object();
  if (const auto *p = std::get_if<NonVerticalDiagnostics>(&r.diagnostics)) {
    d["x1"] = p->x1;
    d["y"] = p->y;
    d["t"] = p->t;
    d["windowIndex"] = p->window_index;
  } else if (const auto *p = std::get_if<VerticalDiagnostics>(&r.diagnostics)) {
    d["x"] = p->x;
    d["y"] = p->y;
  }
  j["diagnostics"] = d;
  return j;
}

/// 64-bit FNV-1a, used to fingerprint run configurations.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Tool block embedded in every artifact.
inline Json tool_block(const Json &config) {
  Json j;
  j["name"] = "minsurf";
  j["version"] = std::string(kVersion);
  j["configHash"] = hex64(fnv1a(config.dump()));
  return j;
}

}  // namespace minsurf
