#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "anncap/bounds.hpp"
#include "anncap/decay.hpp"
#include "anncap/oracle.hpp"

namespace anncap {

enum class ClaimStatus { Pass, Fail, Skipped, Unresolved };

inline const char* to_string(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::Pass: return "PASS";
    case ClaimStatus::Fail: return "FAIL";
    case ClaimStatus::Skipped: return "SKIPPED";
    case ClaimStatus::Unresolved: return "UNRESOLVED";
  }
  return "?";
}

struct ClaimOutcome {
  bool holds = false;
  std::string evidence;
};

struct SharpnessClaim {
  std::string id;                  // unique within the gallery
  std::string bound;               // a BoundId name, or "AD", "Blowup", "Measure"
  std::optional<double> exponent;  // claimed exponent, when the claim has one
  bool expects_failure = false;    // the claim is that an estimate fails here
  std::string statement;
  std::function<ClaimOutcome()> check;  // empty: no decisive computation exists
};

struct ExpectedBehavior {
  bool ad_claimed = false;
  std::optional<double> ad_eta;  // NONE (no AD) when claimed but empty
  std::optional<bool> one_ad;
  std::optional<bool> reverse_doubling;
  std::optional<bool> doubling;
  std::string pi_sharp_q;
  std::vector<SharpnessClaim> sharpness_claims;
};

/// Families used to test the generic expectations of one space.
struct ProbePlan {
  AnnulusFamily ad_family;
  double one_ad_lo = 0.25;
  double one_ad_hi = 4.0;
  std::vector<double> doubling_radii;
  double tau = 2.0;
};

struct GalleryEntry {
  std::string key;
  SpaceSpec space;
  ExpectedBehavior expected;
  ProbePlan probes;
};

struct ClaimVerdict {
  std::string space;
  std::string claim;
  ClaimStatus status = ClaimStatus::Skipped;
  std::string evidence;
};

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline std::string describe(const SweepReport& r) {
  return r.bound + " " + r.verdict() + ": ratio in [" + fmt(r.min_ratio) + ", " + fmt(r.max_ratio) +
         "], slope " + fmt(r.slope) + " vs " + r.trend_variable + ", quantity slope " + fmt(r.quantity_slope);
}

/// r = R/2, R = R0 * factor^k for k = 0..count-1.
inline AnnulusFamily half_family(double R0, double factor, int count) {
  AnnulusFamily fam;
  double R = R0;
  for (int k = 0; k < count; ++k, R *= factor) fam.add(AnnulusSpec(R / 2.0, R), 0);
  return fam;
}

inline SharpnessClaim gate_claim(std::string id, const SpaceSpec& space, BoundSpec spec, std::string hypothesis,
                                 std::string statement, AnnulusSpec ann) {
  SharpnessClaim c;
  c.id = std::move(id);
  c.bound = to_string(spec.id);
  c.expects_failure = true;
  c.statement = std::move(statement);
  c.check = [space, spec, hypothesis, ann] {
    try {
      const double v = evaluate_bound(spec, space, ann);
      return ClaimOutcome{false, "bound evaluated to " + fmt(v) + " without an applicability error"};
    } catch (const ApplicabilityError& e) {
      return ClaimOutcome{e.hypothesis() == hypothesis, std::string("applicability error: ") + e.what()};
    }
  };
  return c;
}

inline SharpnessClaim envelope_claim(std::string id, const SpaceSpec& space, BoundSpec spec, AnnulusFamily fam,
                                     bool expect_pass, std::string statement, QuantitySource source = {}) {
  SharpnessClaim c;
  c.id = std::move(id);
  c.bound = to_string(spec.id);
  c.expects_failure = !expect_pass;
  c.statement = std::move(statement);
  c.check = [space, spec, fam, expect_pass, source] {
    const SweepReport r = verify_envelope(space, spec, fam, source, Gating::Diagnose, 1);
    return ClaimOutcome{r.pass == expect_pass, describe(r)};
  };
  return c;
}

/// Fitted slope of log(quantity) against log(1 - r/R) equals `exponent`.
inline SharpnessClaim slope_claim(std::string id, const SpaceSpec& space, BoundSpec spec, AnnulusFamily fam,
                                  double exponent, double tol, std::string statement) {
  SharpnessClaim c;
  c.id = std::move(id);
  c.bound = to_string(spec.id);
  c.exponent = exponent;
  c.statement = std::move(statement);
  c.check = [space, spec, fam, exponent, tol] {
    const SweepReport r = verify_envelope(space, spec, fam, {}, Gating::Diagnose, 1);
    const bool ok = std::abs(r.quantity_slope - exponent) <= tol;
    return ClaimOutcome{ok, "slope " + fmt(r.quantity_slope) + " vs claimed " + fmt(exponent) + "; " + describe(r)};
  };
  return c;
}

inline TraitSet euclidean_traits(double eta) {
  TraitSet t;
  t.pi_exponents = {{1.0, true}};
  t.global_pi = {{1.0, true}};
  t.doubling = true;
  t.global_doubling = true;
  t.reverse_doubling = ReverseDoubling{2.0, 2.0};
  t.corkscrew_a = 0.5;
  t.ad_eta = eta;
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline GalleryEntry make_rn(int n = 2) {
  if (n < 1 || n > 8) throw DomainError("make_rn needs 1 <= n <= 8");
  SpaceSpec space("rn" + std::to_string(n), RadialRn{n}, WeightSpec(), detail::euclidean_traits(1.0));
  ExpectedBehavior e;
  e.ad_claimed = true;
  e.ad_eta = 1.0;
  e.one_ad = true;
  e.reverse_doubling = true;
  e.doubling = true;
  e.pi_sharp_q = "q >= 1";
  const std::string k = space.name();
  for (double p : {1.5, 2.0, 3.0}) {
    e.sharpness_claims.push_back(detail::slope_claim(k + "/thin-exponent-p" + detail::fmt(p), space,
                                                     {BoundId::TwoSidedNice, p}, thin_family(1.0, 4, 14), 1.0 - p,
                                                     0.03, "thin annuli: cap ~ (1-r/R)^(1-p) mu(B_R)/R^p"));
  }
  e.sharpness_claims.push_back(detail::envelope_claim(k + "/nice-two-sided", space, {BoundId::TwoSidedNice, 2.0},
                                                      thin_family(1.0, 2, 12), true,
                                                      "two-sided nice-case estimate holds"));
  e.sharpness_claims.push_back(detail::envelope_claim(k + "/annular-two-sided", space,
                                                      {BoundId::TwoSidedAnnular, 2.0}, thin_family(1.0, 2, 12), true,
                                                      "annular estimate mu(ann)/delta^p holds"));
  e.sharpness_claims.push_back(detail::envelope_claim(k + "/upper-simple", space, {BoundId::UpperSimple, 2.0},
                                                      thin_family(1.0, 1, 12), true,
                                                      "cap <= mu(ann)/(R-r)^p with constant 1"));
  ProbePlan probes;
  probes.ad_family = multi_r_family({1.0, 4.0}, 4, 14);
  probes.one_ad_lo = 0.25;
  probes.one_ad_hi = 4.0;
  probes.doubling_radii = geometric_radii(1.0 / 64.0, 64.0);
  return {k, space, e, probes};
}

inline GalleryEntry make_buckley(double eta, int n = 2) {
  if (n < 1 || n > 8) throw DomainError("make_buckley needs 1 <= n <= 8");
  SpaceSpec space("buckley" + std::to_string(n) + "d-" + detail::fmt(eta), RadialRn{n}, WeightSpec::buckley(eta),
                  detail::euclidean_traits(eta));
  ExpectedBehavior e;
  e.ad_claimed = true;
  e.ad_eta = eta;
  e.one_ad = false;
  e.reverse_doubling = true;
  e.doubling = true;
  e.pi_sharp_q = "q >= 1 (A_1 weight)";
  const std::string k = space.name();
  const AnnulusFamily fam = thin_family(1.0, 2, 12);
  e.sharpness_claims.push_back(detail::slope_claim(k + "/upper-eta-sharp", space, {BoundId::UpperEta, 2.0}, fam,
                                                   eta - 2.0, 0.05,
                                                   "R = 1, p = 2: cap ~ (1-r)^(eta-p), the eta-AD upper bound is sharp"));
  e.sharpness_claims.push_back(detail::envelope_claim(k + "/upper-eta-envelope", space, {BoundId::UpperEta, 2.0},
                                                      fam, true, "cap / upper-eta bound stays bounded without trend"));
  e.sharpness_claims.push_back(detail::envelope_claim(k + "/upper-eta-p1", space, {BoundId::UpperEta, 1.0}, fam,
                                                      true, "p = 1: the eta-AD upper bound is sharp as well"));
  {
    auto c = detail::envelope_claim(k + "/nice-fails", space, {BoundId::TwoSidedNice, 2.0}, fam, false,
                                    "nice-case estimate fails: trend (1-r/R)^(eta-1), 1-AD is needed");
    c.exponent = eta - 1.0;
    const SpaceSpec sp = space;
    c.check = [sp, fam, eta] {
      const SweepReport r = verify_envelope(sp, {BoundId::TwoSidedNice, 2.0}, fam, {}, Gating::Diagnose, 1);
      const bool ok = !r.pass && std::abs(r.slope - (eta - 1.0)) <= 0.05;
      return ClaimOutcome{ok, detail::describe(r)};
    };
    e.sharpness_claims.push_back(std::move(c));
  }
  e.sharpness_claims.push_back(detail::gate_claim(k + "/nice-gated", space, {BoundId::TwoSidedNice, 2.0},
                                                  "1-AD at x0", "nice-case theorem is not applicable",
                                                  AnnulusSpec(0.9, 1.0)));
  ProbePlan probes;
  probes.ad_family = thin_family(1.0, 2, 12);
  probes.one_ad_lo = 0.25;
  probes.one_ad_hi = 256.0;
  probes.doubling_radii = geometric_radii(1.0 / 64.0, 64.0);
  return {k, space, e, probes};
}

inline GalleryEntry make_summed_buckley(double eta, std::vector<std::pair<double, double>> terms = {},
                                        int n = 2) {
  if (terms.empty()) terms = {{1.0, 1.0}, {2.0, 0.5}, {4.0, 0.25}};
  SpaceSpec space("summed-buckley" + std::to_string(n) + "d-" + detail::fmt(eta), RadialRn{n},
                  WeightSpec::summed_buckley(eta, terms), detail::euclidean_traits(eta));
  ExpectedBehavior e;
  e.ad_claimed = true;
  e.ad_eta = eta;
  e.one_ad = false;
  e.reverse_doubling = true;
  e.doubling = true;
  e.pi_sharp_q = "q >= 1 (A_1 weight)";
  const std::string k = space.name();
  std::vector<double> Rs;
  for (auto [q, a] : terms) {
    (void)a;
    Rs.push_back(1.0 / q);
    e.sharpness_claims.push_back(detail::slope_claim(
        k + "/upper-eta-sharp-R" + detail::fmt(1.0 / q), space, {BoundId::UpperEta, 2.0},
        thin_family(1.0 / q, 10, 22), eta - 2.0, 0.05, "R = 1/q_j, p = 2: the eta-AD upper bound is sharp"));
  }
  ProbePlan probes;
  probes.ad_family = multi_r_family(Rs, 2, 12);
  probes.one_ad_lo = 0.125;
  probes.one_ad_hi = 256.0;
  probes.doubling_radii = geometric_radii(1.0 / 64.0, 64.0);
  return {k, space, e, probes};
}

/// Bow-tie grid capacity of (r, R) about the tip at mesh h.
inline double bowtie_discrete_capacity(double alpha, double p, const AnnulusSpec& ann, double h) {
  return bowtie_oracle(alpha, p, ann, h).capacity;
}

/// Mesh sizes delta/4, delta/8, delta/16 (dyadic, at most 1/16).
inline std::vector<double> bowtie_meshes(double delta) {
  std::vector<double> hs;
  double h = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(delta))) - 2);
  for (int k = 0; k < 3; ++k, h /= 2.0) hs.push_back(std::min(h, 1.0 / 16.0));
  return hs;
}

inline GalleryEntry make_bowtie(double alpha, int n = 2) {
  if (n < 2) throw DomainError("make_bowtie needs n >= 2");
  if (!(alpha > -n)) throw DomainError("make_bowtie needs alpha > -n");
  const double dim = n + alpha;
  TraitSet t;
  if (dim > 1.0) {
    t.global_pi = {{dim, false}};
  } else {
    t.global_pi = {{1.0, true}};
  }
  t.doubling = true;
  t.global_doubling = true;
  t.reverse_doubling = ReverseDoubling{2.0, 1.5};
  t.corkscrew_a = 0.25;
  t.ad_eta = std::min(1.0, dim);
  t.diameter = std::hypot(3.0, 1.5);
  SpaceSpec space("bowtie" + std::to_string(n) + "d-" + detail::fmt(alpha), BowTie{n, alpha}, WeightSpec(), t);
  ExpectedBehavior e;
  e.ad_claimed = true;
  e.ad_eta = std::min(1.0, dim);
  e.one_ad = dim >= 1.0;
  e.reverse_doubling = true;
  e.doubling = true;
  e.pi_sharp_q = "global q-PI iff q > n+alpha or q = 1 >= n+alpha";
  const std::string k = space.name();
  {
    SharpnessClaim c;
    c.id = k + "/measure-decay";
    c.bound = "Measure";
    c.exponent = dim;
    c.statement = "mu(B_1 \\ B_(1-delta)) ~ delta^(n+alpha): the PI hypothesis of the measure lower bound is needed";
    const SpaceSpec sp = space;
    c.check = [sp, dim] {
      std::vector<double> x, y;
      for (int j = 2; j <= 12; ++j) {
        const double d = std::ldexp(1.0, -j);
        x.push_back(std::log(d));
        y.push_back(std::log(mu_annulus(sp, 1.0 - d, 1.0)));
      }
      const double s = fit_line(x, y).slope;
      return ClaimOutcome{std::abs(s - dim) <= 0.1, "measure slope " + detail::fmt(s) + " vs " + detail::fmt(dim)};
    };
    e.sharpness_claims.push_back(std::move(c));
  }
  if (dim > 1.0) {
    e.sharpness_claims.push_back(detail::gate_claim(k + "/measure-lower-gated", space,
                                                    {BoundId::MeasureLowerQ, 2.0, std::nullopt, 1.0},
                                                    "q-PI at x0", "no 1-PI at x0: the measure lower bound with q = 1 "
                                                    "is not applicable", AnnulusSpec(0.9, 1.0)));
    for (double p : {dim + 0.5, dim + 1.5}) {
      SharpnessClaim c;
      c.id = k + "/nice-fails-p" + detail::fmt(p);
      c.bound = "TwoSidedNice";
      c.exponent = dim - 1.0;
      c.expects_failure = true;
      c.statement = "cap <~ delta^(n+alpha-p) << nice-case expression: global q-PI, q > 1, does not suffice";
      const SpaceSpec sp = space;
      c.check = [sp, p, dim] {
        std::vector<double> x, y;
        for (int j = 2; j <= 12; ++j) {
          const AnnulusSpec a(1.0 - std::ldexp(1.0, -j), 1.0);
          const double up = evaluate_bound_unchecked({BoundId::UpperSimple, p}, sp, a);
          const double nice = evaluate_bound_unchecked({BoundId::TwoSidedNice, p}, sp, a);
          x.push_back(std::log(a.thickness()));
          y.push_back(std::log(up / nice));
        }
        const double s = fit_line(x, y).slope;
        return ClaimOutcome{std::abs(s - (dim - 1.0)) <= 0.1,
                            "log(upper-simple / nice) slope " + detail::fmt(s) + " vs " + detail::fmt(dim - 1.0)};
      };
      e.sharpness_claims.push_back(std::move(c));
    }
    e.sharpness_claims.push_back(detail::gate_claim(k + "/nice-gated", space, {BoundId::TwoSidedNice, 2.0},
                                                    "1-PI at x0", "nice-case theorem is not applicable",
                                                    AnnulusSpec(0.9, 1.0)));
    e.sharpness_claims.push_back(detail::gate_claim(k + "/p-base-gated", space, {BoundId::LowerPBase, dim},
                                                    "p-PI at x0", "p = n+alpha: no p-PI at x0",
                                                    AnnulusSpec(0.9, 1.0)));
    SharpnessClaim c;
    c.id = k + "/no-blowup";
    c.bound = "Blowup";
    c.expects_failure = true;
    c.statement = "p = n+alpha: cap(B_(1-delta), B_1) = 0, no blowup";
    const SpaceSpec sp = space;
    c.check = [sp, alpha, dim] {
      const BlowupReport r = blowup_probe_refined(
          sp, dim, 1.0, {0.25, 0.125},
          [&](const AnnulusSpec& a, double h) { return bowtie_discrete_capacity(alpha, dim, a, h); },
          bowtie_meshes, Gating::Diagnose, std::nullopt, 1);
      std::string ev = std::string(r.verdict()) + ";";
      for (const auto& s : r.refinements) {
        ev += " finest " + detail::fmt(s.cap.back()) + " rate " + detail::fmt(s.rate_slope) +
              (s.tends_to_zero ? " ->0" : " (no limit 0)") + ";";
      }
      return ClaimOutcome{!r.blowup && std::all_of(r.rows.begin(), r.rows.end(),
                                                   [](const BlowupRow& row) { return row.cap == 0.0; }),
                          ev};
    };
    e.sharpness_claims.push_back(std::move(c));
  } else if (dim < 1.0) {
    e.sharpness_claims.push_back(detail::gate_claim(k + "/nice-gated", space, {BoundId::TwoSidedNice, 2.0},
                                                    "1-AD at x0", "eta = n+alpha < 1: nice-case theorem is not "
                                                    "applicable", AnnulusSpec(0.9, 1.0)));
  }
  {
    SharpnessClaim c;
    c.id = k + "/nice-all-q-pointwise";
    c.bound = "TwoSidedNice";
    c.statement = "nice-case conclusion under pointwise q-PI for all q > 1: no counterexample known";
    e.sharpness_claims.push_back(std::move(c));
  }
  ProbePlan probes;
  probes.ad_family = multi_r_family({0.25, 0.5, 1.0, 2.0}, 2, 12);
  probes.one_ad_lo = 0.25;
  probes.one_ad_hi = 1.5;
  probes.doubling_radii = geometric_radii(1.0 / 128.0, 0.5);
  return {k, space, e, probes};
}

inline GalleryEntry make_snake(int k_max = 10) {
  TraitSet t;
  t.pi_exponents = {{1.0, true}};
  t.global_pi = {{1.0, true}};
  t.doubling = true;
  t.global_doubling = true;
  t.reverse_doubling = ReverseDoubling{2.0, 1.5};
  SpaceSpec space("snake", Snake{k_max}, WeightSpec(), t);
  ExpectedBehavior e;
  e.ad_claimed = true;
  e.ad_eta = std::nullopt;
  e.one_ad = false;
  e.reverse_doubling = true;
  e.doubling = true;
  e.pi_sharp_q = "global 1-PI (bi-Lipschitz to a half-line)";
  const std::string k = space.name();
  AnnulusFamily straddle;  // delta = 1e-3 2^k around the half-circles
  for (int j = 1; j <= std::min(8, k_max - 1); ++j) {
    const double c = std::ldexp(1.0, j), d = 1e-3 * c;
    straddle.add(AnnulusSpec(c - d, c + d), 0);
  }
  const AnnulusFamily fixed_k = straddle_family(16.0, 3, 13);
  e.sharpness_claims.push_back(detail::envelope_claim(k + "/p-base-sharp", space, {BoundId::LowerPBase, 2.0},
                                                      straddle, true,
                                                      "cap ~ mu(B_R)/R^p: the p-PI lower bound is attained"));
  e.sharpness_claims.push_back(detail::gate_claim(k + "/annular-gated", space, {BoundId::TwoSidedAnnular, 2.0},
                                                  "corkscrew_a", "annular theorem is not applicable",
                                                  AnnulusSpec(16.0 - 0.1, 16.0 + 0.1)));
  e.sharpness_claims.push_back(detail::envelope_claim(
      k + "/annular-fails", space, {BoundId::TwoSidedAnnular, 2.0}, fixed_k, false,
      "without the corkscrew condition mu(ann)/delta^p is not comparable to the capacity"));
  e.sharpness_claims.push_back(detail::gate_claim(k + "/pi-ad-gated", space,
                                                  {BoundId::LowerPiAd, 2.0, std::nullopt, 1.0}, "eta-AD at x0",
                                                  "no AD: the PI-and-AD lower bound is not applicable",
                                                  AnnulusSpec(16.0 - 0.1, 16.0 + 0.1)));
  e.sharpness_claims.push_back(detail::envelope_claim(
      k + "/nice-fails", space, {BoundId::TwoSidedNice, 2.0}, fixed_k, false,
      "doubling cannot replace AD: the nice-case expression overshoots as delta -> 0"));
  {
    SharpnessClaim c;
    c.id = k + "/outer-no-blowup";
    c.bound = "Blowup";
    c.expects_failure = true;
    c.statement = "mu({d = R}) > 0 on the half-circle: cap(B_R, B_(R+delta)) stays bounded";
    const SpaceSpec sp = space;
    c.check = [sp] {
      std::vector<double> ds;
      for (int j = 1; j <= 12; ++j) ds.push_back(std::ldexp(1.0, -j));
      const auto outer = blowup_probe(sp, 2.0, 16.0, ds, {}, Gating::Enforce, 1.0, ProbeDirection::Outer, 1);
      const auto inner = blowup_probe(sp, 2.0, 16.0, ds, {}, Gating::Enforce, 1.0, ProbeDirection::Inner, 1);
      return ClaimOutcome{!outer.blowup && inner.blowup, std::string("outer ") + outer.verdict() + " (growth " +
                                                             detail::fmt(outer.growth) + "), inner " +
                                                             inner.verdict() + " (growth " +
                                                             detail::fmt(inner.growth) + ")"};
    };
    e.sharpness_claims.push_back(std::move(c));
  }
  ProbePlan probes;
  probes.ad_family = AnnulusFamily{};
  for (int j = 2; j <= 5; ++j) {
    auto part = straddle_family(std::ldexp(1.0, j), 3, 12, j - 2);
    for (std::size_t i = 0; i < part.size(); ++i) probes.ad_family.add(part.annuli[i], part.group[i]);
  }
  probes.one_ad_lo = 1.0;
  probes.one_ad_hi = 64.0;
  probes.doubling_radii = geometric_radii(0.75 / 64.0, 0.75 * 512.0);
  return {k, space, e, probes};
}

inline const char* halfline_key(HalfLineKind kind) {
  switch (kind) {
    case HalfLineKind::MinOneOverX: return "halfline-min-one-over-x";
    case HalfLineKind::ExpDecay: return "halfline-exp-decay";
    case HalfLineKind::ExpInvOverXSq: return "halfline-exp-inv-over-x-sq";
  }
  return "?";
}

inline GalleryEntry make_halfline(HalfLineKind kind) {
  TraitSet t;
  t.pi_exponents = {{1.0, true}};
  t.global_pi = {{1.0, true}};
  ExpectedBehavior e;
  e.pi_sharp_q = "global 1-PI (monotone weight)";
  ProbePlan probes;
  probes.tau = 2.0;
  if (kind == HalfLineKind::ExpInvOverXSq) {
    t.reverse_doubling = ReverseDoubling{2.0, 1.5};
    t.corkscrew_a = 0.5;
    e.reverse_doubling = true;
    e.doubling = false;
    probes.ad_family = multi_r_family({0.125, 0.25, 1.0, 4.0}, 2, 12);
    probes.one_ad_lo = 1.0 / 64.0;
    probes.one_ad_hi = 64.0;
    probes.doubling_radii = geometric_radii(1.0 / 64.0, 64.0);
  } else {
    t.doubling = true;
    t.ad_eta = 1.0;
    if (kind == HalfLineKind::ExpDecay) t.corkscrew_a = 0.5;
    e.ad_claimed = true;
    e.ad_eta = 1.0;
    e.one_ad = true;
    e.reverse_doubling = false;
    e.doubling = true;
    probes.ad_family = multi_r_family({1.0, 8.0, 64.0}, 2, 12);
    probes.one_ad_lo = kind == HalfLineKind::MinOneOverX ? 2.0 : 0.5;
    probes.one_ad_hi = 100.0;
    probes.doubling_radii = geometric_radii(1.0 / 64.0, 512.0);
  }
  SpaceSpec space(halfline_key(kind), HalfLine{}, WeightSpec::half_line(kind), t);
  const std::string k = space.name();
  if (kind == HalfLineKind::MinOneOverX) {
    SharpnessClaim c;
    c.id = k + "/log2-annuli";
    c.bound = "Measure";
    c.statement = "mu(B_R \\ B_(R/2)) = log 2 for R >= 2";
    const SpaceSpec sp = space;
    c.check = [sp] {
      double worst = 0.0;
      for (double R : {2.0, 4.0, 16.0, 64.0, 1024.0}) {
        worst = std::max(worst, std::abs(mu_annulus(sp, R / 2.0, R) - std::log(2.0)));
      }
      return ClaimOutcome{worst <= 1e-9, "max deviation " + detail::fmt(worst)};
    };
    e.sharpness_claims.push_back(std::move(c));
    const AnnulusFamily fam = detail::half_family(4.0, 4.0, 9);
    for (BoundId id : {BoundId::LowerPiAd, BoundId::LowerPBase, BoundId::TwoSidedNice}) {
      const BoundSpec spec{id, 2.0, std::nullopt, 1.0};
      const std::string name = to_string(id);
      e.sharpness_claims.push_back(detail::gate_claim(k + "/" + name + "-gated", space, spec,
                                                      "reverse-doubling at x0", name + " is not applicable",
                                                      AnnulusSpec(8.0, 16.0)));
      auto c2 = detail::envelope_claim(k + "/" + name + "-fails", space, spec, fam, false,
                                       "R/2 < r < R, R -> oo: the lower bound outgrows log 2 / R^p");
      e.sharpness_claims.push_back(std::move(c2));
    }
    e.sharpness_claims.push_back(detail::gate_claim(k + "/measure-lower-gated", space,
                                                    {BoundId::MeasureLowerQ, 2.0, std::nullopt, 1.0},
                                                    "reverse-doubling at x0", "measure lower bound is not applicable",
                                                    AnnulusSpec(8.0, 16.0)));
    e.sharpness_claims.push_back(detail::envelope_claim(k + "/measure-lower-fails", space,
                                                        {BoundId::MeasureLowerQ, 2.0, std::nullopt, 1.0}, fam, false,
                                                        "mu(B_R \\ B_(R/2)) = log 2 while mu(B_R) -> oo"));
  } else if (kind == HalfLineKind::ExpDecay) {
    SharpnessClaim c;
    c.id = k + "/ball-volume";
    c.bound = "Measure";
    c.statement = "mu(B_R) = 1 - e^(-R)";
    const SpaceSpec sp = space;
    c.check = [sp] {
      double worst = 0.0;
      for (double R : {0.1, 1.0, 5.0, 20.0}) worst = std::max(worst, std::abs(mu_ball(sp, R) + std::expm1(-R)));
      return ClaimOutcome{worst <= 1e-10, "max deviation " + detail::fmt(worst)};
    };
    e.sharpness_claims.push_back(std::move(c));
    e.sharpness_claims.push_back(detail::gate_claim(k + "/annular-gated", space, {BoundId::TwoSidedAnnular, 2.0},
                                                    "global doubling", "annular theorem is not applicable",
                                                    AnnulusSpec(8.0, 16.0)));
    e.sharpness_claims.push_back(detail::envelope_claim(
        k + "/annular-fails", space, {BoundId::TwoSidedAnnular, 2.0}, detail::half_family(2.0, 1.5, 10), false,
        "doubling at x0 cannot replace global doubling: cap << mu(ann)/delta^p"));
  } else {
    SharpnessClaim c;
    c.id = k + "/ball-volume";
    c.bound = "Measure";
    c.statement = "mu(B_R) = e^(-1/R) for R < 1/2";
    const SpaceSpec sp = space;
    c.check = [sp] {
      double worst = 0.0;
      for (double R : {0.05, 0.1, 0.25, 0.45}) {
        worst = std::max(worst, std::abs(mu_ball(sp, R) - std::exp(-1.0 / R)) / std::exp(-1.0 / R));
      }
      return ClaimOutcome{worst <= 1e-10, "max relative deviation " + detail::fmt(worst)};
    };
    e.sharpness_claims.push_back(std::move(c));
    const AnnulusFamily small = detail::half_family(1.0 / 256.0, std::sqrt(2.0), 12);
    e.sharpness_claims.push_back(detail::gate_claim(k + "/p-base-gated", space, {BoundId::LowerPBase, 2.0},
                                                    "doubling at x0", "PI lower bound is not applicable",
                                                    AnnulusSpec(0.1, 0.2)));
    e.sharpness_claims.push_back(detail::envelope_claim(k + "/p-base-fails", space, {BoundId::LowerPBase, 2.0},
                                                        small, false,
                                                        "R -> 0: cap << mu(B_R)/R^p, doubling cannot be dropped"));
    e.sharpness_claims.push_back(detail::gate_claim(k + "/annular-gated", space, {BoundId::TwoSidedAnnular, 2.0},
                                                    "global doubling", "annular theorem is not applicable",
                                                    AnnulusSpec(0.1, 0.2)));
    e.sharpness_claims.push_back(detail::envelope_claim(
        k + "/annular-fails", space, {BoundId::TwoSidedAnnular, 2.0}, small, false,
        "global reverse doubling cannot replace global doubling: cap << mu(ann)/delta^p"));
    {
      SharpnessClaim c2;
      c2.id = k + "/p1-no-doubling";
      c2.bound = "LowerP1NoDoubling";
      c2.statement = "p = 1 without doubling: cap_1 >~ mu(B_r)/r";
      const SpaceSpec sp2 = space;
      c2.check = [sp2, small] {
        const SweepReport r =
            verify_envelope(sp2, {BoundId::LowerP1NoDoubling, 1.0}, small, {}, Gating::Enforce, 1);
        const bool lower_ok = r.min_ratio >= 1.0 / kRatioWindow;
        return ClaimOutcome{lower_ok, detail::describe(r)};
      };
      e.sharpness_claims.push_back(std::move(c2));
    }
  }
  return {k, space, e, probes};
}

/// Every example space in the canonical parameterizations.
inline std::vector<GalleryEntry> full_gallery() {
  std::vector<GalleryEntry> g;
  g.push_back(make_rn(2));
  g.push_back(make_rn(3));
  for (double eta : {0.3, 0.5, 0.8}) g.push_back(make_buckley(eta));
  g.push_back(make_summed_buckley(0.5));
  for (double a : {-0.5, 0.5, -1.5}) g.push_back(make_bowtie(a));
  g.push_back(make_snake());
  for (auto k : {HalfLineKind::MinOneOverX, HalfLineKind::ExpDecay, HalfLineKind::ExpInvOverXSq}) {
    g.push_back(make_halfline(k));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

inline constexpr double kAdTolerance = 0.1;
inline constexpr double kEtaCap = 1.05;

namespace detail {

inline std::vector<SharpnessClaim> generic_claims(const GalleryEntry& g) {
  std::vector<SharpnessClaim> out;
  const SpaceSpec sp = g.space;
  const ExpectedBehavior& e = g.expected;
  const ProbePlan pr = g.probes;
  if (e.ad_claimed || !sp.traits().point_mass_at_center) {
    SharpnessClaim c;
    c.id = g.key + "/ad-exponent";
    c.bound = "AD";
    c.exponent = e.ad_eta;
    c.statement = e.ad_claimed ? (e.ad_eta ? "optimal AD exponent" : "no AD for any eta > 0") : "AD exponent <= 1";
    const bool claimed = e.ad_claimed;
    const std::optional<double> eta = e.ad_eta;
    c.check = [sp, pr, claimed, eta] {
      const AdFitReport r = estimate_ad_exponent(sp, pr.ad_family, MeasureOptions::relative(), 1);
      bool ok = r.eta_hat <= kEtaCap || sp.traits().point_mass_at_center;
      if (claimed) ok = ok && (eta ? std::abs(r.eta_hat - *eta) <= kAdTolerance : !r.has_ad());
      return ClaimOutcome{ok, "eta_hat " + fmt(r.eta_hat) + (claimed ? " vs " + (eta ? fmt(*eta) : "NONE") : "")};
    };
    out.push_back(std::move(c));
  }
  if (e.one_ad) {
    SharpnessClaim c;
    c.id = g.key + "/one-ad";
    c.bound = "AD";
    c.statement = *e.one_ad ? "1-AD: rho f'(rho) / f(rho) bounded" : "not 1-AD";
    const bool want = *e.one_ad;
    c.check = [sp, pr, want] {
      const OneAdReport r = check_one_ad(sp, pr.one_ad_lo, pr.one_ad_hi, 256, {}, MeasureOptions::relative(), 1);
      return ClaimOutcome{r.condition_b == want, "condition (b) " + std::string(r.condition_b ? "holds" : "fails") +
                                                     ", sup " + fmt(r.sup_ratio) +
                                                     (r.jump_detected ? ", jump detected" : "")};
    };
    out.push_back(std::move(c));
  }
  if (e.reverse_doubling) {
    SharpnessClaim c;
    c.id = g.key + "/reverse-doubling";
    c.bound = "Measure";
    c.statement = *e.reverse_doubling ? "reverse doubling at x0" : "not reverse doubling at x0";
    const bool want = *e.reverse_doubling;
    c.check = [sp, pr, want] {
      const DoublingReport r = check_reverse_doubling(sp, pr.tau, pr.doubling_radii, MeasureOptions::relative(), 1);
      return ClaimOutcome{r.holds == want, "min ratio " + fmt(r.min_ratio) + ", tail slope " + fmt(r.tail_slope)};
    };
    out.push_back(std::move(c));
  }
  if (e.doubling) {
    SharpnessClaim c;
    c.id = g.key + "/doubling";
    c.bound = "Measure";
    c.statement = *e.doubling ? "doubling at x0" : "not doubling at x0";
    const bool want = *e.doubling;
    c.check = [sp, pr, want] {
      const DoublingReport r = check_doubling(sp, pr.doubling_radii, 2.0, MeasureOptions::relative(), 1);
      return ClaimOutcome{r.holds == want, "max ratio " + fmt(r.max_ratio) + ", tail slope " + fmt(r.tail_slope)};
    };
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

/// All claims checked for an entry: generic expectations, then the sharpness list.
inline std::vector<SharpnessClaim> all_claims(const GalleryEntry& g) {
  auto out = detail::generic_claims(g);
  for (const auto& c : g.expected.sharpness_claims) out.push_back(c);
  return out;
}

/// Runs every claim of the entry. Claims not started before `budget_seconds`
/// elapse are SKIPPED; claims without a check are UNRESOLVED.
inline std::vector<ClaimVerdict> verify_expectations(const GalleryEntry& g, double budget_seconds = 300.0,
                                                     int jobs = default_jobs()) {
  const auto claims = all_claims(g);
  const auto t0 = std::chrono::steady_clock::now();
  return parallel_map<ClaimVerdict>(
      claims.size(),
      [&](std::size_t i) {
        const SharpnessClaim& c = claims[i];
        ClaimVerdict v{g.key, c.id, ClaimStatus::Skipped, ""};
        if (!c.check) {
          v.status = ClaimStatus::Unresolved;
          v.evidence = "no decisive computation";
          return v;
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (elapsed > budget_seconds) {
          v.evidence = "budget exhausted";
          return v;
        }
        try {
          const ClaimOutcome o = c.check();
          v.status = o.holds ? ClaimStatus::Pass : ClaimStatus::Fail;
          v.evidence = o.evidence;
        } catch (const std::exception& ex) {
          v.status = ClaimStatus::Fail;
          v.evidence = std::string("error: ") + ex.what();
        }
        return v;
      },
      jobs);
}

}  // namespace anncap
