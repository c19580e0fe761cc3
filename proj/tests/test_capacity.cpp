#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "anncap/capacity.hpp"
#include "anncap/gallery.hpp"
#include "support.hpp"

using namespace anncap;
using anncap::test::Gen;
using anncap::test::rel_err;

namespace {

// Euclidean condenser capacity, written from the radial p-harmonic profile.
double euclid_cap(int n, double p, double r, double R) {
  const double S = test::unit_sphere_area(n);
  if (p == n) return S * std::pow(std::log(R / r), 1.0 - p);
  const double k = (p - n) / (p - 1.0);
  return S * std::pow(std::abs(k), p - 1.0) * std::pow(std::abs(std::pow(R, k) - std::pow(r, k)), 1.0 - p);
}

SpaceSpec radial(int n, WeightSpec w) { return SpaceSpec("t", RadialRn{n}, std::move(w), TraitSet{}); }

}  // namespace

TEST(Capacity, PlaneLogFormula) {
  EXPECT_NEAR(cap_rn_unweighted(2, 2.0, AnnulusSpec(1.0, 2.0)).value, 2.0 * std::numbers::pi / std::log(2.0), 1e-12);
  EXPECT_EQ(cap_rn_unweighted(2, 2.0, AnnulusSpec(1.0, 2.0)).method, CapacityMethod::ClosedForm);
}

TEST(CapacityProperty, ClosedFormMatchesProfile) {
  Gen g(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = g.integer(1, 4);
    const double p = g.coin() ? static_cast<double>(n) : g.exponent();
    const AnnulusSpec a = g.annulus(0.01, 100.0);
    EXPECT_LT(rel_err(cap_rn_unweighted(n, p, a).value, euclid_cap(n, p, a.r, a.R)), 1e-10)
        << "n=" << n << " p=" << p << " (" << a.r << "," << a.R << ")";
  }
}

TEST(CapacityProperty, RadialIntegralAgreesWithClosedForm) {
  Gen g(42);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = g.integer(1, 4);
    const double p = g.exponent();
    const AnnulusSpec a = g.annulus(0.05, 20.0);
    const SpaceSpec s = radial(n, WeightSpec::constant(2.0));
    EXPECT_EQ(compute_capacity(s, p, a).method, CapacityMethod::RadialIntegral);
    EXPECT_LT(rel_err(compute_capacity(s, p, a).value, 2.0 * cap_rn_unweighted(n, p, a).value), 1e-9);
  }
}

TEST(Capacity, BuckleyAgainstSimpson) {
  for (double eta : {0.3, 0.5, 0.8}) {
    const SpaceSpec s = radial(2, WeightSpec::buckley(eta));
    for (int j : {2, 6, 10}) {
      const double d0 = std::ldexp(1.0, -j);
      // p = 2: cap = 2 pi / int_r^1 drho / (rho (1-rho)^(eta-1)), in d = 1 - rho
      const double I = test::simpson([&](double d) { return std::pow(d, 1.0 - eta) / (1.0 - d); }, 0.0, d0, 200000);
      const double exact = 2.0 * std::numbers::pi / I;
      EXPECT_LT(rel_err(compute_capacity(s, 2.0, AnnulusSpec(1.0 - d0, 1.0)).value, exact), 1e-6)
          << "eta=" << eta << " j=" << j;
    }
  }
}

TEST(Capacity, HalfLineClosedForms) {
  TraitSet t;
  const SpaceSpec flat("flat", HalfLine{}, WeightSpec(), t);
  for (int j = 1; j <= 20; ++j) {
    const double d = std::ldexp(1.0, -j);
    EXPECT_NEAR(compute_capacity(flat, 2.0, AnnulusSpec(1.0 - d, 1.0)).value * d, 1.0, 1e-10);
  }
  const SpaceSpec e = make_halfline(HalfLineKind::ExpDecay).space;
  for (auto [r, R] : {std::pair{0.5, 1.0}, std::pair{2.0, 5.0}}) {
    // p = 2: 1 / int_r^R e^x dx
    EXPECT_LT(rel_err(compute_capacity(e, 2.0, AnnulusSpec(r, R)).value, 1.0 / (std::exp(R) - std::exp(r))), 1e-10);
  }
}

TEST(CapacityProperty, PowerWeightScaling) {
  Gen g(43);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = g.integer(1, 3);
    const double alpha = g.uniform(-n + 0.3, 2.5), p = g.exponent();
    const SpaceSpec s = radial(n, WeightSpec::power(alpha));
    const AnnulusSpec a = g.annulus(0.1, 10.0);
    const double lambda = g.log_uniform(0.01, 100.0);
    const double c1 = compute_capacity(s, p, a).value;
    const double c2 = compute_capacity(s, p, AnnulusSpec(lambda * a.r, lambda * a.R)).value;
    EXPECT_LT(rel_err(c2, std::pow(lambda, n + alpha - p) * c1), 1e-8);
  }
}

TEST(CapacityProperty, MonotoneInTheCondenser) {
  // a larger inner plate or a smaller outer one can only raise the capacity
  Gen g(44);
  const std::vector<SpaceSpec> spaces{make_rn(2).space, make_rn(3).space, make_buckley(0.5).space,
                                      make_summed_buckley(0.5).space,
                                      make_halfline(HalfLineKind::MinOneOverX).space};
  for (const auto& s : spaces) {
    for (int trial = 0; trial < 20; ++trial) {
      const double p = g.exponent();
      const double R = g.uniform(1.0, 3.0);
      const double r1 = g.uniform(0.1, 0.9) * R, r2 = g.uniform(r1 / R, 0.99) * R;
      const double c1 = compute_capacity(s, p, AnnulusSpec(r1, R)).value;
      const double c2 = compute_capacity(s, p, AnnulusSpec(r2, R)).value;
      EXPECT_LE(c1, c2 * (1.0 + 1e-9)) << s.name();
      const double c3 = compute_capacity(s, p, AnnulusSpec(r1, R * g.uniform(1.0, 2.0))).value;
      EXPECT_LE(c3, c1 * (1.0 + 1e-9)) << s.name();
    }
  }
}

TEST(Capacity, OneExponentIsTheSmallestSphere) {
  Gen g(45);
  for (int trial = 0; trial < 20; ++trial) {
    const AnnulusSpec a = g.annulus(0.1, 10.0);
    EXPECT_NEAR(compute_capacity(make_rn(2).space, 1.0, a).value, 2.0 * std::numbers::pi * a.r, 1e-12);
    EXPECT_NEAR(compute_capacity(make_rn(3).space, 1.0, a).value, 4.0 * std::numbers::pi * a.r * a.r, 1e-10);
  }
  // Buckley: the sphere area 2 pi t w(t) has its minimum at the plateau edge
  const SpaceSpec b = make_buckley(0.5).space;
  const double v = cap_radial_p1(b, AnnulusSpec(1.5, 3.0)).value;
  const double brute = [&] {
    double m = INFINITY;
    for (int i = 0; i <= 200000; ++i) {
      const double t = 1.5 + 1.5 * i / 200000.0;
      m = std::min(m, 2.0 * std::numbers::pi * t * std::max(1.0, std::pow(std::abs(t - 1.0), -0.5)));
    }
    return m;
  }();
  EXPECT_NEAR(v, brute, 1e-6);
  EXPECT_EQ(cap_radial_p1(b, AnnulusSpec(1.5, 3.0)).method, CapacityMethod::InfCut);
}

TEST(Capacity, SnakePathFormula) {
  const SpaceSpec s = make_snake().space;
  // inside the first segment the annulus is a plain interval
  for (double p : {1.5, 2.0, 3.0}) {
    EXPECT_NEAR(compute_capacity(s, p, AnnulusSpec(0.25, 0.75)).value, std::pow(0.5, 1.0 - p), 1e-12);
  }
  // straddling 2^k: two segment pieces plus the half circle
  for (int k = 1; k <= 6; ++k) {
    const double d = 1e-3 * std::ldexp(1.0, k), R = std::ldexp(1.0, k);
    const double L = 2.0 * d + std::numbers::pi * R;
    EXPECT_NEAR(cap_snake(2.0, k, d).value * L, 1.0, 1e-12);
    EXPECT_NEAR(compute_capacity(s, 2.0, AnnulusSpec(R - d, R + d)).value, cap_snake(2.0, k, d).value, 1e-12);
  }
  EXPECT_THROW(cap_snake(2.0, 12, 0.1), DomainError);
  EXPECT_THROW(cap_snake(2.0, 3, 8.0), DomainError);
}

TEST(Capacity, NiceCaseEstimate) {
  const AnnulusSpec a(0.75, 1.0);
  EXPECT_NEAR(nice_case_estimate(make_rn(2).space, 2.0, a), std::numbers::pi / 0.25, 1e-9);
  EXPECT_THROW(nice_case_estimate(make_rn(2).space, 2.0, AnnulusSpec(0.25, 1.0)), DomainError);
}

TEST(Capacity, Errors) {
  EXPECT_THROW(compute_capacity(make_rn(2).space, 0.5, AnnulusSpec(1.0, 2.0)), DomainError);
  EXPECT_THROW(compute_capacity(make_rn(2).space, NAN, AnnulusSpec(1.0, 2.0)), DomainError);
  EXPECT_THROW(compute_capacity(make_bowtie(0.5).space, 2.0, AnnulusSpec(0.5, 1.0)), DomainError);
  EXPECT_THROW(cap_rn_unweighted(0, 2.0, AnnulusSpec(1.0, 2.0)), DomainError);
  EXPECT_THROW(cap_radial_weighted(make_rn(2).space, 1.0, AnnulusSpec(1.0, 2.0)), DomainError);
}
