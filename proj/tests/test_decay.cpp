#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "anncap/decay.hpp"
#include "anncap/gallery.hpp"
#include "support.hpp"

using namespace anncap;
using anncap::test::Gen;

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

SpaceSpec power_space(int n, double alpha) {
  return SpaceSpec("pw", RadialRn{n}, WeightSpec::power(alpha), TraitSet{});
}

}  // namespace

TEST(Families, Shapes) {
  const auto t = thin_family(2.0, 3, 9, 4);
  ASSERT_EQ(t.size(), 7u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t.group[i], 4);
    EXPECT_DOUBLE_EQ(t.annuli[i].R, 2.0);
    EXPECT_DOUBLE_EQ(t.annuli[i].thickness(), std::ldexp(1.0, -static_cast<int>(i) - 3));
  }
  const auto m = multi_r_family({1.0, 4.0}, 2, 5);
  EXPECT_EQ(m.size(), 8u);
  EXPECT_EQ(m.group.back(), 1);
  for (const auto& a : straddle_family(16.0, 3, 10).annuli) {
    EXPECT_LT(a.r, 16.0);
    EXPECT_GT(a.R, 16.0);
  }
  EXPECT_EQ(geometric_radii(1.0, 8.0), (std::vector<double>{1.0, 2.0, 4.0, 8.0}));
}

TEST(AnnularDecay, EuclideanMatchesAnalyticFit) {
  for (int n : {1, 2, 3}) {
    const SpaceSpec s("rn", RadialRn{n}, WeightSpec(), TraitSet{});
    const auto fam = thin_family(1.0, 4, 14);
    std::vector<double> x, y;
    for (const auto& a : fam.annuli) {
      x.push_back(std::log(a.thickness()));
      y.push_back(std::log(1.0 - std::pow(1.0 - a.thickness(), n)));  // mu(ann)/mu(ball)
    }
    const AdFitReport rep = estimate_ad_exponent(s, fam);
    EXPECT_NEAR(rep.eta_hat, ls_slope(x, y), 1e-9) << n;
    EXPECT_TRUE(rep.has_ad());
  }
}

TEST(AnnularDecay, BuckleyExponent) {
  for (double eta : {0.3, 0.5, 0.8}) {
    const GalleryEntry g = make_buckley(eta);
    const AdFitReport rep = estimate_ad_exponent(g.space, g.probes.ad_family);
    EXPECT_NEAR(rep.eta_hat, eta, 0.03) << eta;
    EXPECT_EQ(rep.group_slopes.size(), 1u);
  }
}

TEST(AnnularDecay, SnakeHasNone) {
  const GalleryEntry g = make_snake();
  const AdFitReport rep = estimate_ad_exponent(g.space, g.probes.ad_family);
  EXPECT_FALSE(rep.has_ad());
  EXPECT_GT(rep.group_slopes.size(), 1u);
}

TEST(AnnularDecay, RejectsBadFamilies) {
  EXPECT_THROW(estimate_ad_exponent(make_rn(2).space, thin_family(1.0, 2, 6)), InputError);
  AnnulusFamily wide;
  for (int i = 0; i < 8; ++i) wide.add(AnnulusSpec(0.1, 1.0 + i), 0);
  EXPECT_THROW(estimate_ad_exponent(make_rn(2).space, wide), InputError);
  EXPECT_THROW(ad_ratio(make_rn(2).space, AnnulusSpec(0.5, 1.0), 0.0), DomainError);
}

TEST(AnnularDecayProperty, RatioIsScaleInvariantForPowerWeights) {
  Gen g(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = g.integer(1, 3);
    const double alpha = g.uniform(-n + 0.2, 3.0);
    const SpaceSpec s = power_space(n, alpha);
    const AnnulusSpec a = g.thin_annulus();
    const double lambda = g.log_uniform(1e-2, 1e2);
    const double eta = g.uniform(0.1, 1.0);
    const double r1 = ad_ratio(s, a, eta), r2 = ad_ratio(s, AnnulusSpec(lambda * a.r, lambda * a.R), eta);
    EXPECT_NEAR(r1 / r2, 1.0, 1e-8) << "n=" << n << " alpha=" << alpha;
  }
}

TEST(AnnularDecayProperty, ExponentNeverExceedsOne) {
  // random power weights and random families of thin annuli
  Gen g(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = g.integer(1, 4);
    const SpaceSpec s = power_space(n, g.uniform(-n + 0.1, 4.0));
    std::vector<double> Rs;
    const int groups = g.integer(1, 3);
    for (int k = 0; k < groups; ++k) Rs.push_back(g.log_uniform(1e-3, 1e3));
    const AdFitReport rep = estimate_ad_exponent(s, multi_r_family(Rs, g.integer(2, 5), 14));
    EXPECT_LE(rep.eta_hat, 1.05);
  }
}

TEST(AnnularDecay, EnvelopeAtTheFittedExponent) {
  const GalleryEntry g = make_buckley(0.5);
  EXPECT_TRUE(ad_envelope(g.space, g.probes.ad_family, 0.5).bounded);
  const auto over = ad_envelope(g.space, g.probes.ad_family, 0.8);
  EXPECT_FALSE(over.bounded_above);
  EXPECT_LT(over.slope, -0.05);
}

TEST(OneAd, EuclideanPlane) {
  const OneAdReport r = check_one_ad(make_rn(2).space, 0.25, 4.0);
  EXPECT_FALSE(r.jump_detected);
  EXPECT_NEAR(r.sup_ratio, 2.0, 1e-3);  // rho f'/f = n
  EXPECT_NEAR(r.inf_ratio, 2.0, 1e-3);
  EXPECT_TRUE(r.condition_b);
  EXPECT_TRUE(r.condition_d);
}

TEST(OneAd, SnakeJumps) {
  const OneAdReport r = check_one_ad(make_snake().space, 1.0, 64.0);
  EXPECT_TRUE(r.jump_detected);
  EXPECT_FALSE(r.condition_b);
}

TEST(OneAd, HalfLinesLackReverseDoubling) {
  for (auto k : {HalfLineKind::MinOneOverX, HalfLineKind::ExpDecay}) {
    const GalleryEntry g = make_halfline(k);
    const OneAdReport r = check_one_ad(g.space, g.probes.one_ad_lo, g.probes.one_ad_hi);
    EXPECT_TRUE(r.condition_b) << g.key;
    EXPECT_FALSE(r.condition_d) << g.key;
  }
}

TEST(OneAd, RejectsBadRange) {
  EXPECT_THROW(check_one_ad(make_rn(2).space, 2.0, 1.0), DomainError);
}

TEST(Doubling, AgreesWithDeclaredTraits) {
  std::vector<GalleryEntry> entries{make_rn(2), make_buckley(0.5), make_snake(),
                                    make_halfline(HalfLineKind::MinOneOverX),
                                    make_halfline(HalfLineKind::ExpInvOverXSq)};
  for (const auto& g : entries) {
    const DoublingReport d = check_doubling(g.space, g.probes.doubling_radii);
    EXPECT_EQ(d.holds, g.space.traits().doubling) << g.key;
    const auto& rd = g.space.traits().reverse_doubling;
    const DoublingReport r = check_reverse_doubling(g.space, rd ? rd->tau : 2.0, g.probes.doubling_radii);
    EXPECT_EQ(r.holds, rd.has_value()) << g.key;
  }
}

TEST(Doubling, EuclideanConstant) {
  const DoublingReport d = check_doubling(make_rn(3).space, geometric_radii(1e-3, 1e3));
  EXPECT_NEAR(d.min_ratio, 8.0, 1e-9);
  EXPECT_NEAR(d.max_ratio, 8.0, 1e-9);
  EXPECT_THROW(check_doubling(make_rn(3).space, {1.0}), InputError);
  EXPECT_THROW(check_doubling(make_rn(3).space, {1.0, 2.0}, 1.0), DomainError);
}
