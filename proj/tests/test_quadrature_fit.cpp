#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "anncap/fit.hpp"
#include "anncap/parallel.hpp"
#include "anncap/quadrature.hpp"
#include "support.hpp"

using namespace anncap;
using anncap::test::Gen;

TEST(Quadrature, PolynomialsAndTranscendentals) {
  EXPECT_NEAR(integrate_plain([](double x) { return x * x; }, 0.0, 3.0).value, 9.0, 1e-12);
  EXPECT_NEAR(integrate_plain([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value, 2.0, 1e-12);
  EXPECT_NEAR(integrate_plain([](double x) { return std::exp(-x); }, 0.0, 40.0).value, -std::expm1(-40.0), 1e-12);
  EXPECT_EQ(integrate_plain([](double) { return 1.0; }, 2.0, 2.0).value, 0.0);
}

TEST(Quadrature, EndpointSingularities) {
  // int_0^1 x^(s-1) dx = 1/s
  for (double s : {0.05, 0.3, 0.5, 0.9}) {
    const QuadOptions o{0.0, 1e-12};
    const double v = integrate_plain([&](double x) { return std::pow(x, s - 1.0); }, 0.0, 1.0, {}, o).value;
    EXPECT_LT(std::abs(v * s - 1.0), 1e-9) << s;
  }
  // singularity at an interior breakpoint
  const double bp[] = {1.0};
  const double v = integrate(
                       [](const QuadNode& n) {
                         const double d = n.b <= 1.0 ? (n.b == 1.0 ? n.from_right : 1.0 - n.x)
                                                     : (n.a == 1.0 ? n.from_left : n.x - 1.0);
                         return std::pow(d, -0.5);
                       },
                       0.0, 2.0, bp, {0.0, 1e-12})
                       .value;
  EXPECT_NEAR(v, 4.0, 1e-9);
}

TEST(Quadrature, KinkAtBreakpoint) {
  const double bp[] = {0.3};
  const double v = integrate_plain([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, bp).value;
  EXPECT_NEAR(v, 0.5 * (0.09 + 0.49), 1e-13);
}

TEST(Quadrature, ReportsFailure) {
  EXPECT_THROW(integrate_plain([](double x) { return 1.0 / x; }, 0.0, 1.0), QuadratureError);
  EXPECT_THROW(integrate_plain([](double x) { return x; }, 1.0, 0.0), DomainError);
}

TEST(Fit, RecoversExactLine) {
  Gen g(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double m = g.uniform(-5, 5), c = g.uniform(-5, 5);
    const int n = g.integer(2, 40);
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
      xs.push_back(g.uniform(-10, 10) + i);
      ys.push_back(m * xs.back() + c);
    }
    const LineFit f = fit_line(xs, ys);
    EXPECT_NEAR(f.slope, m, 1e-9);
    EXPECT_NEAR(f.intercept, c, 1e-8);
    EXPECT_LT(f.max_residual, 1e-8);
    EXPECT_EQ(f.count, static_cast<std::size_t>(n));
  }
}

TEST(Fit, LogLogPowerLaw) {
  std::vector<double> xs, ys;
  for (int j = 1; j <= 12; ++j) {
    xs.push_back(std::ldexp(1.0, -j));
    ys.push_back(3.0 * std::pow(xs.back(), -1.5));
  }
  EXPECT_NEAR(fit_loglog(xs, ys).slope, -1.5, 1e-12);
  ys[3] = 0.0;
  EXPECT_THROW(fit_loglog(xs, ys), InputError);
}

TEST(Fit, DegenerateInputs) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(fit_line(one, one), InputError);
  const std::vector<double> same{2.0, 2.0, 2.0}, y{1.0, 2.0, 3.0};
  EXPECT_THROW(fit_line(same, y), InputError);
}

TEST(Fit, BoundednessRule) {
  std::vector<double> lt, lR(12, 0.0), flat, growing, decaying;
  for (int j = 1; j <= 12; ++j) {
    lt.push_back(std::log(std::ldexp(1.0, -j)));
    flat.push_back(2.0 + 0.01 * (j % 2));
    growing.push_back(std::pow(std::ldexp(1.0, -j), -0.5));
    decaying.push_back(std::pow(std::ldexp(1.0, -j), 0.5));
  }
  auto v = assess_boundedness(flat, lt, lR);
  EXPECT_TRUE(v.bounded);
  EXPECT_TRUE(v.bounded_above);
  EXPECT_EQ(v.trend_variable, "log(1-r/R)");
  v = assess_boundedness(growing, lt, lR);
  EXPECT_FALSE(v.bounded);
  EXPECT_FALSE(v.bounded_above);
  EXPECT_NEAR(v.slope, -0.5, 1e-12);
  v = assess_boundedness(decaying, lt, lR);
  EXPECT_FALSE(v.bounded);
  EXPECT_TRUE(v.bounded_above);
  // constant thickness: the trend falls back to log R
  std::vector<double> same_t(12, std::log(0.25)), logR;
  for (int j = 0; j < 12; ++j) logR.push_back(j * 0.5);
  v = assess_boundedness(flat, same_t, logR);
  EXPECT_EQ(v.trend_variable, "log R");
  EXPECT_TRUE(v.bounded);
}

TEST(Fit, Median) {
  EXPECT_EQ(median_of({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median_of({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_EQ(median_of({}), 0.0);
}

TEST(Parallel, MapIsOrderedAndJobIndependent) {
  auto sq = [](std::size_t i) { return static_cast<double>(i * i); };
  const auto a = parallel_map<double>(257, sq, 1);
  const auto b = parallel_map<double>(257, sq, 4);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], static_cast<double>(i * i));
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_map<int>(
                   10,
                   [](std::size_t i) -> int {
                     if (i == 7) throw InputError("boom");
                     return 0;
                   },
                   3),
               InputError);
}
