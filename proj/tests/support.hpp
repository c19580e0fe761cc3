#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>

#include "anncap/measure.hpp"

namespace anncap::test {

// Seeded draws for property tests. Every test owns its own stream so that
// adding a case elsewhere never shifts the samples.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  // R in [R_lo, R_hi], thickness 1 - r/R in [2^-14, 1/2]
  AnnulusSpec thin_annulus(double R_lo = 0.25, double R_hi = 4.0) {
    const double R = log_uniform(R_lo, R_hi);
    const double t = log_uniform(std::ldexp(1.0, -14), 0.5);
    return AnnulusSpec(R * (1.0 - t), R);
  }

  AnnulusSpec annulus(double lo, double hi) {
    const double a = log_uniform(lo, hi), b = log_uniform(lo, hi);
    if (a == b) return AnnulusSpec(a, a * 1.5);
    return AnnulusSpec(std::min(a, b), std::max(a, b));
  }

  double exponent() {
    static constexpr double ps[] = {1.25, 1.5, 2.0, 2.5, 3.0, 4.0};
    return ps[integer(0, 5)];
  }

 private:
  std::mt19937_64 rng_;
};

// Composite Simpson with n (even) panels; deliberately plain.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// int_0^L f(t) dt after t = L u^k, which flattens an integrable singularity
// at t = 0. Callers pass the distance to the singular point, not the abscissa.
inline double simpson_graded(const std::function<double(double)>& f, double L, double k = 4.0, int n = 20000) {
  return simpson(
      [&](double u) {
        if (u <= 0.0) return 0.0;
        return f(L * std::pow(u, k)) * L * k * std::pow(u, k - 1.0);
      },
      0.0, 1.0, n);
}

inline double unit_sphere_area(int n) {
  // |S^(n-1)|, written out for the dimensions the tests use
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    case 4: return 2.0 * std::numbers::pi * std::numbers::pi;
    default: return NAN;
  }
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace anncap::test
