#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "anncap/bounds.hpp"
#include "anncap/gallery.hpp"
#include "support.hpp"

using namespace anncap;
using anncap::test::Gen;
using anncap::test::rel_err;

namespace {

std::vector<GalleryEntry> computable() {
  return {make_rn(2),
          make_rn(3),
          make_buckley(0.3),
          make_buckley(0.8),
          make_summed_buckley(0.5),
          make_snake(),
          make_halfline(HalfLineKind::MinOneOverX),
          make_halfline(HalfLineKind::ExpDecay),
          make_halfline(HalfLineKind::ExpInvOverXSq)};
}

SpaceSpec flat_halfline() {
  TraitSet t;
  t.pi_exponents = {{1.0, true}};
  t.global_pi = {{1.0, true}};
  return SpaceSpec("halfline-flat", HalfLine{}, WeightSpec(), t);
}

std::vector<double> dyadic(int lo, int hi) {
  std::vector<double> v;
  for (int j = lo; j <= hi; ++j) v.push_back(std::ldexp(1.0, -j));
  return v;
}

}  // namespace

TEST(Bounds, PlaneUpperSimple) {
  const BoundSpec s{BoundId::UpperSimple, 2.0};
  const AnnulusSpec a(1.0, 2.0);
  const double b = evaluate_bound(s, make_rn(2).space, a);
  EXPECT_NEAR(b, 3.0 * std::numbers::pi, 1e-9);
  EXPECT_LE(compute_capacity(make_rn(2).space, 2.0, a).value, b);
}

TEST(Bounds, NiceCaseAtOneExponent) {
  Gen g(61);
  const SpaceSpec s = make_rn(3).space;
  for (int trial = 0; trial < 20; ++trial) {
    const AnnulusSpec a = g.thin_annulus();
    const double v = evaluate_bound({BoundId::TwoSidedNice, 1.0}, s, a);
    EXPECT_LT(rel_err(v, mu_ball(s, a.R) / a.R), 1e-12);
  }
}

TEST(Bounds, MeasureLowerFailsWithoutReverseDoubling) {
  const SpaceSpec s = make_halfline(HalfLineKind::MinOneOverX).space;
  BoundSpec spec{BoundId::MeasureLowerQ, 2.0};
  spec.q = 1.0;
  double last = 0.0;
  for (double R : {4.0, 64.0, 4096.0, 1048576.0}) {
    const AnnulusSpec a(R / 2.0, R);
    const double b = evaluate_bound_unchecked(spec, s, a);
    EXPECT_LT(rel_err(b, 0.5 * (1.0 + std::log(R))), 1e-9);
    EXPECT_NEAR(mu_annulus(s, a), std::log(2.0), 1e-9);
    EXPECT_GT(b, last);
    last = b;
    try {
      evaluate_bound(spec, s, a);
      ADD_FAILURE() << "gating let the bound through";
    } catch (const ApplicabilityError& e) {
      EXPECT_EQ(e.hypothesis(), "reverse-doubling at x0");
    }
  }
}

TEST(Bounds, SnakeFailsCorkscrewForAnnular) {
  try {
    evaluate_bound({BoundId::TwoSidedAnnular, 2.0}, make_snake().space, AnnulusSpec(15.9, 16.1));
    ADD_FAILURE();
  } catch (const ApplicabilityError& e) {
    EXPECT_EQ(e.hypothesis(), "corkscrew_a");
  }
}

TEST(BoundsProperty, GatingMatchesHypotheses) {
  // evaluate_bound returns a value exactly when no hypothesis fails
  Gen g(62);
  int gated = 0, passed = 0;
  for (const auto& entry : full_gallery()) {
    for (BoundId id : kAllBounds) {
      for (int trial = 0; trial < 6; ++trial) {
        BoundSpec spec{id, g.coin() ? 1.0 : g.exponent()};
        if (detail::needs_q(id)) spec.q = g.uniform(1.0, spec.p + 1.0);
        spec.self_improved_q = id == BoundId::LowerCorkscrewQ && g.coin();
        const AnnulusSpec a = g.coin() ? g.thin_annulus(0.25, 1.5) : g.annulus(0.1, 1.5);
        const auto failed = failed_hypotheses(spec, entry.space, a);
        if (failed.empty()) {
          ++passed;
          const double v = evaluate_bound(spec, entry.space, a);
          EXPECT_EQ(v, evaluate_bound_unchecked(spec, entry.space, a));
          EXPECT_GE(v, 0.0);
        } else {
          ++gated;
          try {
            evaluate_bound(spec, entry.space, a);
            ADD_FAILURE() << entry.key << " " << to_string(id);
          } catch (const ApplicabilityError& e) {
            EXPECT_EQ(e.hypothesis(), failed.front());
          }
        }
      }
    }
  }
  EXPECT_GT(gated, 50);
  EXPECT_GT(passed, 50);
}

TEST(BoundsProperty, PiAdLowerStaysBelowNiceExpression) {
  Gen g(63);
  const auto spaces = computable();
  for (int trial = 0; trial < 200; ++trial) {
    const SpaceSpec& s = spaces[g.integer(0, static_cast<int>(spaces.size()) - 1)].space;
    const double p = g.uniform(1.05, 5.0);
    BoundSpec lower{BoundId::LowerPiAd, p, 1.0, g.uniform(1.0, p)};
    const AnnulusSpec a = g.thin_annulus(0.5, 2.0);
    EXPECT_LE(evaluate_bound_unchecked(lower, s, a),
              evaluate_bound_unchecked({BoundId::TwoSidedNice, p}, s, a) * (1.0 + 1e-12));
  }
}

TEST(BoundsProperty, UpperSimpleDominatesCapacity) {
  Gen g(64);
  for (const auto& entry : computable()) {
    for (int trial = 0; trial < 25; ++trial) {
      const double p = g.coin() ? 1.0 : g.exponent();
      const AnnulusSpec a = g.annulus(0.3, 40.0);
      const double cap = compute_capacity(entry.space, p, a).value;
      EXPECT_LE(cap, evaluate_bound({BoundId::UpperSimple, p}, entry.space, a) * (1.0 + 1e-8))
          << entry.key << " p=" << p << " (" << a.r << "," << a.R << ")";
    }
  }
}

TEST(Bounds, NamesRoundTrip) {
  for (BoundId id : kAllBounds) EXPECT_EQ(bound_from_string(to_string(id)), id);
  EXPECT_THROW(bound_from_string("NoSuchBound"), InputError);
}

TEST(Bounds, MissingParameters) {
  EXPECT_THROW(evaluate_bound_unchecked({BoundId::LowerCorkscrewQ, 2.0}, make_rn(2).space, AnnulusSpec(0.9, 1.0)),
               DomainError);
  EXPECT_THROW(evaluate_bound({BoundId::UpperSimple, 0.5}, make_rn(2).space, AnnulusSpec(0.9, 1.0)), DomainError);
}

TEST(Envelope, PlaneNiceCaseIsFlat) {
  const SweepReport r =
      verify_envelope(make_rn(2).space, {BoundId::TwoSidedNice, 2.0}, thin_family(1.0, 1, 12), {}, Gating::Enforce);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.hypotheses_ok);
  EXPECT_LT(std::abs(r.slope), 0.05);
  EXPECT_EQ(r.rows.size(), 12u);
  for (const auto& row : r.rows) EXPECT_NEAR(row.ratio, row.cap / row.bound, 1e-15 * row.ratio);
}

TEST(Envelope, BuckleyNiceCaseTrends) {
  const GalleryEntry b = make_buckley(0.5);
  const BoundSpec spec{BoundId::TwoSidedNice, 2.0};
  EXPECT_THROW(verify_envelope(b.space, spec, thin_family(1.0, 2, 14), {}, Gating::Enforce), ApplicabilityError);
  const SweepReport r = verify_envelope(b.space, spec, thin_family(1.0, 2, 14), {}, Gating::Diagnose);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.hypotheses_ok);
  EXPECT_NEAR(r.slope, -0.5, 0.05);
  EXPECT_NEAR(r.quantity_slope, -1.5, 0.05);
}

TEST(Envelope, SnakeAttainsTheBaseLowerBound) {
  AnnulusFamily fam;
  for (int j = 1; j <= 8; ++j) {
    const double c = std::ldexp(1.0, j);
    fam.add(AnnulusSpec(c - 1e-3 * c, c + 1e-3 * c), 0);
  }
  const SweepReport r = verify_envelope(make_snake().space, {BoundId::LowerPBase, 2.0}, fam, {}, Gating::Diagnose);
  EXPECT_TRUE(r.pass) << r.min_ratio << " " << r.max_ratio << " " << r.slope;
}

TEST(Envelope, UpperSimpleFlagsAViolation) {
  // a source twice the true capacity exceeds the constant-free upper bound
  const SpaceSpec s = make_rn(2).space;
  const QuantitySource doubled = [&](const AnnulusSpec& a) { return 2.0 * compute_capacity(s, 2.0, a).value; };
  const auto fam = thin_family(1.0, 1, 10);
  EXPECT_TRUE(verify_envelope(s, {BoundId::UpperSimple, 2.0}, fam).pass);
  EXPECT_FALSE(verify_envelope(s, {BoundId::UpperSimple, 2.0}, fam, doubled).pass);
}

TEST(Envelope, Errors) {
  EXPECT_THROW(verify_envelope(make_rn(2).space, {BoundId::TwoSidedNice, 2.0}, thin_family(1.0, 1, 5)), InputError);
  EXPECT_THROW(verify_envelope(make_rn(2).space, BoundSpec{BoundId::UpperSimple, 2.0},
                               BoundSpec{BoundId::LowerPBase, 2.0}, thin_family(1.0, 1, 10)),
               DomainError);
  // thick annuli are dropped by Enforce, kept by Diagnose
  const auto wide = thin_family(1.0, 1, 10);
  AnnulusFamily mixed = wide;
  mixed.add(AnnulusSpec(0.1, 1.0), 0);
  const SpaceSpec s = make_rn(2).space;
  EXPECT_EQ(verify_envelope(s, {BoundId::TwoSidedNice, 2.0}, mixed).dropped, 1u);
  const SweepReport d = verify_envelope(s, {BoundId::TwoSidedNice, 2.0}, mixed, {}, Gating::Diagnose);
  EXPECT_EQ(d.dropped, 0u);
  EXPECT_FALSE(d.hypotheses_ok);
}

TEST(Blowup, FlatHalfLineIsExact) {
  const BlowupReport b = blowup_probe(flat_halfline(), 2.0, 1.0, dyadic(1, 12), {}, Gating::Enforce, 1.0);
  ASSERT_EQ(b.rows.size(), 12u);
  for (const auto& row : b.rows) EXPECT_NEAR(row.cap * row.delta, 1.0, 1e-10);
  EXPECT_TRUE(b.blowup);
  EXPECT_NEAR(b.delta_exponent, -1.0, 1e-9);
  EXPECT_NEAR(b.measure_exponent, 1.0 - 2.0 / 1.0, 1e-9);  // mu(ann) = delta
  EXPECT_NEAR(b.expected_measure_exponent, -1.0, 1e-15);
}

TEST(Blowup, BuckleyDivergenceExponent) {
  const BlowupReport b = blowup_probe(make_buckley(0.5).space, 2.0, 1.0, dyadic(2, 14), {}, Gating::Diagnose);
  EXPECT_TRUE(b.blowup);
  EXPECT_NEAR(b.delta_exponent, 0.5 - 2.0, 0.05);
}

TEST(Blowup, BoundedCapacityIsNoBlowup) {
  const QuantitySource flat = [](const AnnulusSpec&) { return 3.0; };
  const BlowupReport b = blowup_probe(flat_halfline(), 2.0, 1.0, dyadic(1, 8), flat, Gating::Enforce, 1.0);
  EXPECT_FALSE(b.blowup);
  EXPECT_STREQ(b.verdict(), "NO-BLOWUP");
}

TEST(BlowupProperty, GatingMatchesHypotheses) {
  Gen g(65);
  for (const auto& entry : full_gallery()) {
    for (int trial = 0; trial < 4; ++trial) {
      const double p = g.exponent(), R = g.log_uniform(0.25, 4.0);
      const std::optional<double> q = g.coin() ? std::optional<double>(g.uniform(1.0, p + 1.0)) : std::nullopt;
      const auto failed = detail::blowup_hypotheses(entry.space, p, R, q);
      const QuantitySource dummy = [](const AnnulusSpec& a) { return 1.0 / a.delta(); };
      if (failed.empty()) {
        EXPECT_NO_THROW(blowup_probe(entry.space, p, R, {R / 4, R / 8}, dummy, Gating::Enforce, q));
      } else {
        EXPECT_THROW(blowup_probe(entry.space, p, R, {R / 4, R / 8}, dummy, Gating::Enforce, q), ApplicabilityError)
            << entry.key;
        EXPECT_FALSE(blowup_probe(entry.space, p, R, {R / 4, R / 8}, dummy, Gating::Diagnose, q).hypotheses_ok);
      }
    }
  }
}

TEST(Refinement, LogarithmicDecayCountsAsZero) {
  const double p = 2.5;
  const auto model = [&](double h) { return 4.0 * std::pow(1.0 + 0.7 * std::log(1.0 / h), 1.0 - p); };
  const RefinementReport r = refinement_study(model, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}, p, 1);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.tends_to_zero);
  EXPECT_NEAR(r.rate_slope, 0.7 * std::pow(4.0, 1.0 / (1.0 - p)), 1e-9);
  ASSERT_EQ(r.reduction.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r.reduction[k], 1.0 - r.cap[k + 1] / r.cap[k], 1e-15);
}

TEST(Refinement, ConvergentSequenceIsNotZero) {
  const auto model = [](double h) { return 2.0 + h; };
  const RefinementReport r = refinement_study(model, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}, 2.0, 1);
  EXPECT_TRUE(r.monotone);
  EXPECT_FALSE(r.tends_to_zero);
  EXPECT_THROW(refinement_study(model, {0.1, 0.05}, 2.0, 1), InputError);
  EXPECT_THROW(refinement_study(model, {0.1, 0.05, 0.025}, 1.0, 1), DomainError);
}
