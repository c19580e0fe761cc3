#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "anncap/measure.hpp"

namespace anncap {

enum class CapacityMethod { ClosedForm, RadialIntegral, InfCut, PathFormula };

inline const char* to_string(CapacityMethod m) {
  switch (m) {
    case CapacityMethod::ClosedForm: return "ClosedForm";
    case CapacityMethod::RadialIntegral: return "RadialIntegral";
    case CapacityMethod::InfCut: return "InfCut";
    case CapacityMethod::PathFormula: return "PathFormula";
  }
  return "?";
}

struct CapacityResult {
  double value = 0.0;  // may be +inf
  CapacityMethod method = CapacityMethod::ClosedForm;
  double quadrature_error = 0.0;
};

inline void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("capacity needs p >= 1");
}

/// Unweighted R^n with Lebesgue measure.
inline CapacityResult cap_rn_unweighted(int n, double p, const AnnulusSpec& ann) {
  check_p(p);
  if (n < 1) throw DomainError("cap_rn_unweighted needs n >= 1");
  const double S = surface_constant(n);
  CapacityResult res;
  res.method = CapacityMethod::ClosedForm;
  if (p == 1.0) {
    res.value = S * std::pow(ann.r, n - 1);
  } else if (std::abs(p - n) < 1e-12) {
    res.value = S * std::pow(std::log1p(ann.delta() / ann.r), 1.0 - n);
  } else {
    const double k = (p - n) / (p - 1.0);
    // R^k - r^k = r^k expm1(k log(R/r)), accurate for thin annuli
    const double diff = std::abs(std::pow(ann.r, k) * std::expm1(k * std::log1p(ann.delta() / ann.r)));
    res.value = S * std::pow(std::abs((n - p) / (p - 1.0)), p - 1.0) * std::pow(diff, 1.0 - p);
  }
  return res;
}

namespace detail {

struct RadialSetup {
  int n;
  double S;
};

inline RadialSetup radial_setup(const SpaceSpec& space, const char* who) {
  if (auto* g = std::get_if<RadialRn>(&space.geometry())) return {g->n, surface_constant(g->n)};
  if (space.is_half_line()) return {1, 1.0};
  throw DomainError(std::string(who) + " needs a RadialRn or HalfLine space");
}

}  // namespace detail

/// S (int_r^R (w rho^(n-1))^(1/(1-p)) drho)^(1-p); the half-line drops S and
/// rho^(n-1). A divergent integral gives capacity 0.
inline CapacityResult cap_radial_weighted(const SpaceSpec& space, double p, const AnnulusSpec& ann,
                                          const MeasureOptions& opt = MeasureOptions::relative()) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("cap_radial_weighted needs p > 1");
  const auto [n, S] = detail::radial_setup(space, "cap_radial_weighted");
  const WeightSpec& w = space.weight();
  const double e = 1.0 / (1.0 - p);
  auto integrand = [&](const QuadNode& node) {
    double v = detail::weight_at(w, node);
    if (n > 1) v *= std::pow(node.x, n - 1);
    return std::pow(v, e);
  };
  const auto cuts = detail::weight_cuts(w);
  CapacityResult res;
  res.method = CapacityMethod::RadialIntegral;
  QuadResult q;
  try {
    q = integrate(integrand, ann.r, ann.R, cuts, {opt.abs_tol, opt.rel_tol});
  } catch (const QuadratureError& err) {
    if (std::isfinite(err.achieved_error())) throw;
    return res;  // non-integrable: capacity degenerates to 0
  }
  if (!std::isfinite(q.value)) return res;
  res.value = S * std::pow(q.value, 1.0 - p);
  res.quadrature_error = S * (p - 1.0) * std::pow(q.value, -p) * q.error;
  return res;
}

/// p = 1: inf over t in [r, R] of S t^(n-1) w(t) (weighted sphere area).
inline CapacityResult cap_radial_p1(const SpaceSpec& space, const AnnulusSpec& ann) {
  const auto [n, S] = detail::radial_setup(space, "cap_radial_p1");
  const WeightSpec& w = space.weight();
  auto area = [&](double t) {
    double v = w(t);
    if (n > 1) v *= std::pow(t, n - 1);
    return S * v;
  };
  // dense grid plus the weight's breakpoints, then golden-section refinement
  std::vector<double> ts;
  const int G = 4096;
  for (int i = 0; i <= G; ++i) ts.push_back(ann.r + (ann.R - ann.r) * i / G);
  for (const auto& bp : w.breakpoints()) {
    if (bp.at > ann.r && bp.at < ann.R && bp.exponent >= 0.0) ts.push_back(bp.at);
  }
  std::sort(ts.begin(), ts.end());
  std::size_t best = 0;
  std::vector<double> vals(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    vals[i] = area(ts[i]);
    if (vals[i] < vals[best]) best = i;
  }
  double value = vals[best];
  if (best > 0 && best + 1 < ts.size()) {
    double a = ts[best - 1], b = ts[best + 1];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = area(c), fd = area(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = area(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = area(d);
      }
    }
    value = std::min({value, fc, fd});
  }
  return {value, CapacityMethod::InfCut, 0.0};
}

/// Path capacity of the snake: the annulus is one arc of length L.
inline CapacityResult cap_snake_annulus(const SpaceSpec& space, double p, const AnnulusSpec& ann) {
  check_p(p);
  const auto* g = std::get_if<Snake>(&space.geometry());
  if (!g) throw DomainError("cap_snake_annulus needs a Snake space");
  check_snake_radius(*g, ann.R);
  const double L = mu_annulus(space, ann);
  return {p == 1.0 ? 1.0 : std::pow(L, 1.0 - p), CapacityMethod::PathFormula, 0.0};
}

/// r = 2^k - delta, R = 2^k + delta: L = 2 delta + pi 2^k.
inline CapacityResult cap_snake(double p, int k, double delta, int k_max = 10) {
  check_p(p);
  if (k < 0) throw DomainError("cap_snake needs k >= 0");
  if (k >= k_max) throw DomainError("cap_snake: k beyond the represented snake");
  if (!(delta > 0.0) || !(delta < std::ldexp(1.0, k - 1))) {
    throw DomainError("cap_snake needs 0 < delta < 2^(k-1)");
  }
  const double L = 2.0 * delta + std::numbers::pi * std::ldexp(1.0, k);
  return {p == 1.0 ? 1.0 : std::pow(L, 1.0 - p), CapacityMethod::PathFormula, 0.0};
}

/// (1 - r/R)^(1-p) mu(B_R) / R^p, for thin annuli.
inline double nice_case_estimate(const SpaceSpec& space, double p, const AnnulusSpec& ann,
                                 const MeasureOptions& opt = MeasureOptions::relative()) {
  check_p(p);
  if (!ann.is_thin()) throw DomainError("nice_case_estimate needs a thin annulus (R/2 <= r)");
  return std::pow(ann.thickness(), 1.0 - p) * mu_ball(space, ann.R, opt) / std::pow(ann.R, p);
}

/// Picks the exact engine for the space; the bow-tie has none.
inline CapacityResult compute_capacity(const SpaceSpec& space, double p, const AnnulusSpec& ann,
                                       const MeasureOptions& opt = MeasureOptions::relative()) {
  check_p(p);
  if (space.is_snake()) return cap_snake_annulus(space, p, ann);
  if (space.is_bowtie()) {
    throw DomainError("bow-tie capacity has no exact reduction; use the discrete oracle");
  }
  if (auto* g = std::get_if<RadialRn>(&space.geometry()); g && space.weight().is_unit()) {
    return cap_rn_unweighted(g->n, p, ann);
  }
  if (p == 1.0) return cap_radial_p1(space, ann);
  return cap_radial_weighted(space, p, ann, opt);
}

}  // namespace anncap
