#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anncap/bounds.hpp"
#include "anncap/capacity.hpp"
#include "anncap/decay.hpp"
#include "anncap/gallery.hpp"
#include "anncap/oracle.hpp"

namespace anncap {

using Json = nlohmann::ordered_json;

/// 17 significant digits, '.' decimal point regardless of locale.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Finite values as JSON numbers; inf and nan as strings.
inline Json json_number(double x) {
  if (std::isfinite(x)) return Json(x);
  return Json(format_number(x));
}

// Quantities whose exact digits matter are emitted as decimal strings.
inline Json json_exact(double x) { return Json(format_number(x)); }

// ---------------------------------------------------------------------------
// Capacity
// ---------------------------------------------------------------------------

inline Json to_json(const CapacityResult& c) {
  return Json{{"value", json_exact(c.value)},
              {"method", to_string(c.method)},
              {"quadrature_error", json_number(c.quadrature_error)}};
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

inline void write_sweep_csv(const SweepReport& r, std::ostream& out) {
  out << "r,R,cap,bound,ratio\n";
  for (const auto& row : r.rows) {
    out << format_number(row.r) << ',' << format_number(row.R) << ',' << format_number(row.cap) << ','
        << format_number(row.bound) << ',' << format_number(row.ratio) << '\n';
  }
}

inline Json to_json(const SweepReport& r) {
  return Json{{"bound", r.bound},
              {"quantity", r.quantity},
              {"p", json_number(r.p)},
              {"annuli", r.rows.size()},
              {"dropped", r.dropped},
              {"min_ratio", json_number(r.min_ratio)},
              {"max_ratio", json_number(r.max_ratio)},
              {"slope", json_number(r.slope)},
              {"trend_variable", r.trend_variable},
              {"quantity_slope", json_number(r.quantity_slope)},
              {"hypotheses_ok", r.hypotheses_ok},
              {"failed_hypotheses", r.failed_hypotheses},
              {"verdict", r.verdict()}};
}

inline void write_blowup_csv(const BlowupReport& r, std::ostream& out) {
  out << "delta,cap\n";
  for (const auto& row : r.rows) out << format_number(row.delta) << ',' << format_number(row.cap) << '\n';
}

inline Json to_json(const RefinementReport& r) {
  Json j{{"tends_to_zero", r.tends_to_zero},
         {"monotone", r.monotone},
         {"rate_slope", json_number(r.rate_slope)},
         {"rate_rel_residual", json_number(r.rate_rel_residual)}};
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.h.size(); ++i) {
    rows.push_back(Json{{"h", json_exact(r.h[i])}, {"cap", json_exact(r.cap[i])}});
  }
  j["meshes"] = rows;
  Json red = Json::array();
  for (double x : r.reduction) red.push_back(json_number(x));
  j["reduction"] = red;
  return j;
}

inline Json to_json(const BlowupReport& r) {
  Json j{{"p", json_number(r.p)},
         {"R", json_number(r.R)},
         {"direction", r.direction == ProbeDirection::Inner ? "inner" : "outer"},
         {"strictly_increasing", r.strictly_increasing},
         {"growth", json_number(r.growth)},
         {"delta_exponent", json_number(r.delta_exponent)},
         {"measure_exponent", json_number(r.measure_exponent)},
         {"expected_measure_exponent", json_number(r.expected_measure_exponent)},
         {"hypotheses_ok", r.hypotheses_ok},
         {"failed_hypotheses", r.failed_hypotheses},
         {"verdict", r.verdict()}};
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(Json{{"delta", json_exact(row.delta)}, {"cap", json_exact(row.cap)}});
  j["rows"] = rows;
  if (!r.refinements.empty()) {
    Json refs = Json::array();
    for (const auto& s : r.refinements) refs.push_back(to_json(s));
    j["refinements"] = refs;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Decay analysis
// ---------------------------------------------------------------------------

inline Json to_json(const AdFitReport& r) {
  Json slopes = Json::array();
  for (double s : r.group_slopes) slopes.push_back(json_number(s));
  return Json{{"eta_hat", json_number(r.eta_hat)},
              {"constant_hat", json_number(r.constant_hat)},
              {"residual", json_number(r.residual)},
              {"sample_count", r.sample_count},
              {"r_min", json_number(r.r_min)},
              {"R_max", json_number(r.R_max)},
              {"group_slopes", slopes},
              {"has_ad", r.has_ad()},
              {"ad", r.has_ad() ? Json(r.eta_hat) : Json("NONE")}};
}

inline Json to_json(const OneAdReport& r) {
  return Json{{"rho_lo", json_number(r.rho_lo)},
              {"rho_hi", json_number(r.rho_hi)},
              {"grid_size", r.grid_size},
              {"sup_ratio", json_number(r.sup_ratio)},
              {"inf_ratio", json_number(r.inf_ratio)},
              {"jump_detected", r.jump_detected},
              {"lipschitz_bound", json_number(r.lipschitz_bound)},
              {"max_growth_exponent", json_number(r.max_growth_exponent)},
              {"octave_min_slope", json_number(r.octave_min_slope)},
              {"octave_min_slope_low", json_number(r.octave_min_slope_low)},
              {"condition_b", r.condition_b},
              {"condition_d", r.condition_d}};
}

inline Json to_json(const DoublingReport& r) {
  return Json{{"min_ratio", json_number(r.min_ratio)},
              {"max_ratio", json_number(r.max_ratio)},
              {"tail_slope", json_number(r.tail_slope)},
              {"worst_gamma", json_number(r.worst_gamma)},
              {"holds", r.holds}};
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

// Wall time is left out so that reruns are byte-identical.
inline Json to_json(const OracleRun& r) {
  return Json{{"capacity", json_exact(r.capacity)},
              {"vertices", r.vertices},
              {"edges", r.edges},
              {"iterations", r.iterations},
              {"kkt_residual", json_number(r.kkt_residual)}};
}

inline Json to_json(const OracleComparison& c) {
  return Json{{"formula", json_exact(c.formula)},
              {"discrete", to_json(c.discrete)},
              {"rel_error", json_number(c.rel_error)}};
}

// ---------------------------------------------------------------------------
// Gallery
// ---------------------------------------------------------------------------

inline std::string describe_geometry(const SpaceSpec& s) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RadialRn>) {
          return "R^" + std::to_string(g.n);
        } else if constexpr (std::is_same_v<T, HalfLine>) {
          return "half-line";
        } else if constexpr (std::is_same_v<T, Snake>) {
          return "snake(k_max=" + std::to_string(g.k_max) + ")";
        } else {
          return "bow-tie(n=" + std::to_string(g.n) + ", alpha=" + format_number(g.alpha) + ")";
        }
      },
      s.geometry());
}

inline Json to_json(const PiRange& r) {
  return Json{{"q_min", json_number(r.q_min)}, {"inclusive", r.inclusive}};
}

inline Json to_json(const TraitSet& t) {
  Json pi = Json::array(), gpi = Json::array();
  for (const auto& r : t.pi_exponents) pi.push_back(to_json(r));
  for (const auto& r : t.global_pi) gpi.push_back(to_json(r));
  Json j{{"pi_exponents", pi},
         {"global_pi", gpi},
         {"lambda", json_number(t.lambda)},
         {"doubling", t.doubling},
         {"global_doubling", t.global_doubling}};
  j["reverse_doubling"] = t.reverse_doubling
                              ? Json{{"tau", json_number(t.reverse_doubling->tau)},
                                     {"gamma", json_number(t.reverse_doubling->gamma)}}
                              : Json(nullptr);
  j["corkscrew_a"] = t.corkscrew_a ? json_number(*t.corkscrew_a) : Json(nullptr);
  j["point_mass_at_center"] = t.point_mass_at_center;
  j["ad_eta"] = t.ad_eta ? json_number(*t.ad_eta) : Json("NONE");
  j["diameter"] = json_number(t.diameter);
  return j;
}

inline Json to_json(const ExpectedBehavior& e) {
  auto opt_bool = [](const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); };
  Json j;
  j["ad_eta"] = e.ad_claimed ? (e.ad_eta ? json_number(*e.ad_eta) : Json("NONE")) : Json(nullptr);
  j["one_ad"] = opt_bool(e.one_ad);
  j["reverse_doubling"] = opt_bool(e.reverse_doubling);
  j["doubling"] = opt_bool(e.doubling);
  j["pi_sharp_q"] = e.pi_sharp_q;
  Json claims = Json::array();
  for (const auto& c : e.sharpness_claims) {
    claims.push_back(Json{{"id", c.id},
                          {"bound", c.bound},
                          {"exponent", c.exponent ? json_number(*c.exponent) : Json(nullptr)},
                          {"expects_failure", c.expects_failure},
                          {"statement", c.statement},
                          {"decidable", static_cast<bool>(c.check)}});
  }
  j["sharpness_claims"] = claims;
  return j;
}

inline Json to_json(const GalleryEntry& g) {
  return Json{{"key", g.key},
              {"geometry", describe_geometry(g.space)},
              {"weight", g.space.weight().describe()},
              {"center", g.space.center() == CenterTag::Origin ? "origin" : "bow-tie tip"},
              {"traits", to_json(g.space.traits())},
              {"expected", to_json(g.expected)}};
}

inline Json gallery_manifest(const std::vector<GalleryEntry>& gallery) {
  Json arr = Json::array();
  for (const auto& g : gallery) arr.push_back(to_json(g));
  return Json{{"spaces", arr}};
}

inline Json to_json(const ClaimVerdict& v) {
  return Json{{"space", v.space}, {"claim", v.claim}, {"status", to_string(v.status)}, {"evidence", v.evidence}};
}

}  // namespace anncap
