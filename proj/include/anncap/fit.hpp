#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "anncap/errors.hpp"

namespace anncap {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // max |y - fit(x)|
  std::size_t count = 0;
};

inline double variance_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return v / static_cast<double>(xs.size());
}

/// Ordinary least squares y ~ a + b x.
inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw InputError("fit_line: need >= 2 paired samples");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  // relative test so that tightly clustered but distinct abscissae still fit
  if (!(sxx > 1e-24 * std::max(1.0, mx * mx) * n)) {
    throw InputError("fit_line: zero variance in abscissa");
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.count = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    f.max_residual = std::max(f.max_residual, std::abs(ys[i] - (f.intercept + f.slope * xs[i])));
  }
  return f;
}

/// Fits log y against log x.
inline LineFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw InputError("fit_loglog: nonpositive sample");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return fit_line(lx, ly);
}

// "Uniformly bounded": max/min <= 1e3 and no log-trend beyond +-0.05.
inline constexpr double kRatioWindow = 1e3;
inline constexpr double kTrendTolerance = 0.05;

struct BoundednessVerdict {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double slope = 0.0;
  std::string trend_variable;  // "log(1-r/R)" or "log R"
  bool bounded = false;        // two-sided: max/min <= 1e3, |slope| <= 0.05
  bool bounded_above = false;  // one-sided: max <= 1e3, no growth as 1-r/R -> 0
};

/// Applies the boundedness rule to positive ratios. The trend is fitted
/// against `primary` (normally log(1-r/R)); if that has no spread, against
/// `fallback` (normally log R).
inline BoundednessVerdict assess_boundedness(std::span<const double> ratios,
                                             std::span<const double> primary,
                                             std::span<const double> fallback,
                                             std::string primary_name = "log(1-r/R)",
                                             std::string fallback_name = "log R") {
  BoundednessVerdict v;
  if (ratios.empty()) throw InputError("assess_boundedness: empty family");
  v.min_ratio = *std::min_element(ratios.begin(), ratios.end());
  v.max_ratio = *std::max_element(ratios.begin(), ratios.end());
  if (!(v.min_ratio > 0.0) || !std::isfinite(v.max_ratio)) {
    v.slope = std::isfinite(v.max_ratio) ? -INFINITY : INFINITY;
    v.trend_variable = primary_name;
    v.bounded = false;
    v.bounded_above = std::isfinite(v.max_ratio) && v.max_ratio <= kRatioWindow;
    return v;
  }
  std::vector<double> ly;
  for (double r : ratios) ly.push_back(std::log(r));
  try {
    v.slope = fit_line(primary, ly).slope;
    v.trend_variable = primary_name;
  } catch (const InputError&) {
    v.slope = fit_line(fallback, ly).slope;
    v.trend_variable = fallback_name;
  }
  v.bounded = v.max_ratio / v.min_ratio <= kRatioWindow && std::abs(v.slope) <= kTrendTolerance;
  const bool no_growth = v.trend_variable == primary_name ? v.slope >= -kTrendTolerance
                                                          : std::abs(v.slope) <= kTrendTolerance;
  v.bounded_above = v.max_ratio <= kRatioWindow && no_growth;
  return v;
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace anncap
