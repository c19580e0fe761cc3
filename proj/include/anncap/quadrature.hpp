#pragma once

// Adaptive double-exponential (tanh-sinh) quadrature.
//
// Integrands receive a QuadNode carrying the abscissa together with its exact
// distances to both panel endpoints. Weights with a power singularity at a
// breakpoint evaluate through the offset, so nodes that sit 1e-200 away from
// the singular point are not rounded onto it.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "anncap/errors.hpp"

namespace anncap {

struct QuadNode {
  double x;           // abscissa
  double from_left;   // x - a, exact
  double from_right;  // b - x, exact
  double a;           // panel endpoints
  double b;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 48;
  int max_level = 7;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

inline constexpr double kTanhSinhSpan = 6.0;

// One tanh-sinh pass over [a, b] at successively halved steps. Returns the
// value of the finest level reached and the difference to the previous level.
template <typename F>
QuadResult tanh_sinh_panel(F& f, double a, double b, double tol, int max_level) {
  const double half = 0.5 * (b - a);
  const double pi_2 = 0.5 * std::numbers::pi;

  auto term = [&](double t) -> double {
    const double s = std::sinh(t);
    const double u = pi_2 * s;
    const double au = std::abs(u);
    if (au > 350.0) return 0.0;
    const double e = std::exp(-2.0 * au);
    const double near = 2.0 * half * e / (1.0 + e);  // distance to the close end
    if (!(near > 0.0)) return 0.0;
    const double far = 2.0 * half - near;
    const double ch = std::cosh(u);
    const double weight = half * pi_2 * std::cosh(t) / (ch * ch);
    if (weight == 0.0) return 0.0;
    QuadNode node{};
    node.a = a;
    node.b = b;
    if (u >= 0.0) {
      node.from_right = near;
      node.from_left = far;
      node.x = b - near;
    } else {
      node.from_left = near;
      node.from_right = far;
      node.x = a + near;
    }
    const double v = f(node);
    return weight * v;
  };

  double step = 1.0;
  double sum = term(0.0);
  for (int k = 1; k * step <= kTanhSinhSpan; ++k) {
    sum += term(k * step) + term(-k * step);
  }
  double prev = sum * step;
  double err = std::abs(prev);
  for (int level = 1; level <= max_level; ++level) {
    step *= 0.5;
    double add = 0.0;
    for (int k = 1; k * step <= kTanhSinhSpan; k += 2) {
      add += term(k * step) + term(-k * step);
    }
    sum += add;
    const double cur = sum * step;
    err = std::abs(cur - prev);
    prev = cur;
    if (!std::isfinite(cur)) return {cur, INFINITY};
    if (level >= 3 && (err <= tol || err <= 1e-14 * std::abs(cur))) break;
  }
  return {prev, err};
}

template <typename F>
void adaptive(F& f, double a, double b, double tol, double floor, int depth,
              const QuadOptions& opt, QuadResult& acc, bool& ok) {
  QuadResult r = tanh_sinh_panel(f, a, b, tol, opt.max_level);
  if (!std::isfinite(r.value)) {
    ok = false;
    acc.error = INFINITY;
    return;
  }
  // Differences at the roundoff floor count as converged.
  if (r.error <= std::max(tol, floor) || r.error <= 1e-14 * std::abs(r.value)) {
    acc.value += r.value;
    acc.error += r.error;
    return;
  }
  const double mid = 0.5 * (a + b);
  if (depth >= opt.max_depth || !(mid > a && mid < b)) {
    ok = false;
    acc.value += r.value;
    acc.error += std::isfinite(r.error) ? r.error : INFINITY;
    return;
  }
  adaptive(f, a, mid, 0.5 * tol, floor, depth + 1, opt, acc, ok);
  adaptive(f, mid, b, 0.5 * tol, floor, depth + 1, opt, acc, ok);
}

}  // namespace detail

/// Integrates f over [a, b], splitting first at every breakpoint inside (a, b).
/// Breakpoints should mark kinks and integrable singularities of the integrand.
template <typename F>
QuadResult integrate(F&& f, double a, double b, std::span<const double> breakpoints = {},
                     const QuadOptions& opt = {}) {
  if (!(b >= a)) throw DomainError("integrate: reversed interval");
  if (a == b) return {};
  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Rough magnitude first so the relative tolerance means something.
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    scale += std::abs(detail::tanh_sinh_panel(f, cuts[i], cuts[i + 1], INFINITY, 2).value);
  }
  if (!std::isfinite(scale)) scale = 0.0;
  const double tol = std::max(opt.abs_tol, opt.rel_tol * scale);
  const double panel_tol = tol / static_cast<double>(cuts.size() - 1);
  const double floor = 4e-15 * scale;

  QuadResult acc;
  bool ok = true;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    detail::adaptive(f, cuts[i], cuts[i + 1], panel_tol, floor, 0, opt, acc, ok);
  }
  if (!ok || !std::isfinite(acc.value)) {
    throw QuadratureError("integrate: tolerance not reached on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]",
                          acc.error);
  }
  return acc;
}

/// Convenience overload for plain f(x) integrands without singular endpoints.
template <typename F>
QuadResult integrate_plain(F&& f, double a, double b, std::span<const double> breakpoints = {},
                           const QuadOptions& opt = {}) {
  auto g = [&](const QuadNode& n) { return f(n.x); };
  return integrate(g, a, b, breakpoints, opt);
}

}  // namespace anncap
