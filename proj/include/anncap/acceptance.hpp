#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "anncap/bounds.hpp"
#include "anncap/capacity.hpp"
#include "anncap/decay.hpp"
#include "anncap/gallery.hpp"
#include "anncap/oracle.hpp"

namespace anncap {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<std::string> info;
  double seconds = 0.0;
};

namespace acceptance {

using detail::fmt;

inline void note(CriterionResult& r, std::string s) { r.info.push_back(std::move(s)); }

inline bool check(CriterionResult& r, bool ok, std::string s) {
  note(r, std::string(ok ? "ok   " : "MISS ") + s);
  return ok;
}

inline std::string format17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline SpaceSpec unweighted(int n) { return make_rn(n).space; }

// 1. closed form vs 2000-cell radial network
inline CriterionResult oracle_equivalence(int jobs) {
  CriterionResult r{1, "oracle equivalence: closed form vs radial network, n in {2,3}, p in {1.5,2,3}"};
  struct Case {
    int n;
    double p, a, b;
  };
  std::vector<Case> cases;
  for (int n : {2, 3})
    for (double p : {1.5, 2.0, 3.0})
      for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{0.9, 1.0}}) cases.push_back({n, p, a, b});
  auto runs = parallel_map<OracleComparison>(
      cases.size(),
      [&](std::size_t i) {
        const Case& c = cases[i];
        const AnnulusSpec ann(c.a, c.b);
        return compare_with_formula(cap_rn_unweighted(c.n, c.p, ann).value,
                                    radial_oracle(unweighted(c.n), c.p, ann, 2000));
      },
      jobs);
  bool ok = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    const auto& cmp = runs[i];
    ok &= check(r, cmp.rel_error <= 0.01 && cmp.discrete.seconds < 2.0,
                "n=" + std::to_string(c.n) + " p=" + fmt(c.p) + " (" + fmt(c.a) + "," + fmt(c.b) +
                    "): formula " + fmt(cmp.formula) + " network " + fmt(cmp.discrete.capacity) + " rel " +
                    fmt(cmp.rel_error) + " in " + fmt(cmp.discrete.seconds) + " s");
  }
  r.pass = ok;
  return r;
}

// 2. thin-annulus exponent 1 - p in the plane
inline CriterionResult thin_exponent(int jobs) {
  CriterionResult r{2, "thin-annulus exponent: n=2, slope 1-p +-0.03, ratio to nice-case estimate flat"};
  const SpaceSpec s = unweighted(2);
  const AnnulusFamily fam = thin_family(1.0, 2, 12);
  bool ok = true;
  for (double p : {1.5, 2.0, 3.0}) {
    std::vector<double> t, caps, ratios, lR;
    for (const auto& a : fam.annuli) {
      const double c = compute_capacity(s, p, a).value;
      t.push_back(a.thickness());
      caps.push_back(c);
      ratios.push_back(c / nice_case_estimate(s, p, a));
      lR.push_back(std::log(a.R));
    }
    const double slope = fit_loglog(t, caps).slope;
    std::vector<double> lt;
    for (double x : t) lt.push_back(std::log(x));
    const auto v = assess_boundedness(ratios, lt, lR);
    ok &= check(r, std::abs(slope - (1.0 - p)) <= 0.03 && std::abs(v.slope) <= kTrendTolerance,
                "p=" + fmt(p) + ": slope " + fmt(slope) + " vs " + fmt(1.0 - p) + ", ratio trend " + fmt(v.slope));
  }
  (void)jobs;
  r.pass = ok;
  return r;
}

// 3. Buckley weights: slope eta - p, nice-case envelope fails with slope eta - 1
inline CriterionResult buckley_sharpness(int jobs) {
  CriterionResult r{3, "Buckley sharpness: slope eta-p +-0.05; nice-case envelope FAIL with slope eta-1 +-0.05"};
  bool ok = true;
  for (double eta : {0.3, 0.5, 0.8}) {
    const SpaceSpec s = make_buckley(eta).space;
    const AnnulusFamily fam = thin_family(1.0, 2, 12);
    const SweepReport nice = verify_envelope(s, {BoundId::TwoSidedNice, 2.0}, fam, {}, Gating::Diagnose, jobs);
    ok &= check(r,
                std::abs(nice.quantity_slope - (eta - 2.0)) <= 0.05 && !nice.pass &&
                    std::abs(nice.slope - (eta - 1.0)) <= 0.05,
                "eta=" + fmt(eta) + ": cap slope " + fmt(nice.quantity_slope) + " vs " + fmt(eta - 2.0) +
                    ", nice envelope " + nice.verdict() + " slope " + fmt(nice.slope) + " vs " + fmt(eta - 1.0));
  }
  r.pass = ok;
  return r;
}

// 4. exact measure identities on the half-line
inline CriterionResult measure_identities(int) {
  CriterionResult r{4, "exact measure identities on the half-line weights"};
  bool ok = true;
  const SpaceSpec m = make_halfline(HalfLineKind::MinOneOverX).space;
  for (double R : {4.0, 16.0, 64.0}) {
    const double v = mu_annulus(m, R / 2.0, R);
    ok &= check(r, std::abs(v - std::log(2.0)) <= 1e-9, "min(1,1/x), R=" + fmt(R) + ": " + format17(v));
  }
  const SpaceSpec e = make_halfline(HalfLineKind::ExpDecay).space;
  for (double R : {0.5, 1.0, 3.0, 10.0}) {
    const double v = mu_ball(e, R);
    ok &= check(r, std::abs(v + std::expm1(-R)) <= 1e-10, "e^-x, R=" + fmt(R) + ": " + format17(v));
  }
  const SpaceSpec g = make_halfline(HalfLineKind::ExpInvOverXSq).space;
  for (double R : {0.1, 0.25, 0.4, 0.49}) {
    const double v = mu_ball(g, R);
    ok &= check(r, std::abs(v - std::exp(-1.0 / R)) <= 1e-10, "e^(-1/x)/x^2, R=" + fmt(R) + ": " + format17(v));
  }
  r.pass = ok;
  return r;
}

// 5. snake: no AD, sharp p-PI lower bound, path formula vs network
inline CriterionResult snake_suite(int jobs) {
  CriterionResult r{5, "snake: no AD; cap 2^k constant; path formula vs snake network"};
  const GalleryEntry g = make_snake();
  bool ok = true;
  const AdFitReport fit = estimate_ad_exponent(g.space, g.probes.ad_family, MeasureOptions::relative(), jobs);
  AnnulusFamily shrinking;
  for (int j = 3; j <= 40; j += 3) {
    const double d = 16.0 * std::ldexp(1.0, -j);
    shrinking.add(AnnulusSpec(16.0 - d, 16.0 + d), 0);
  }
  const auto env = ad_envelope(g.space, shrinking, 0.1, MeasureOptions::relative(), jobs);
  ok &= check(r, !fit.has_ad() && !env.bounded_above,
              "(i) eta_hat " + fmt(fit.eta_hat) + " -> " + (fit.has_ad() ? "AD" : "NONE") +
                  "; eta=0.1 ratio grows to " + fmt(env.max_ratio) + " (slope " + fmt(env.slope) + ")");
  double lo = INFINITY, hi = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const double v = cap_snake(2.0, k, 1e-3 * std::ldexp(1.0, k)).value * std::ldexp(1.0, k);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  ok &= check(r, hi / lo <= 1.1, "(ii) cap 2^k in [" + fmt(lo) + ", " + fmt(hi) + "], spread " + fmt(hi / lo));
  struct Case {
    double p, a, b;
  };
  const std::vector<Case> cases{{2.0, 7.9, 8.1}, {2.0, 15.0, 17.0}, {1.5, 3.9, 4.2}, {3.0, 31.5, 32.5}};
  auto runs = parallel_map<OracleComparison>(
      cases.size(),
      [&](std::size_t i) {
        const AnnulusSpec ann(cases[i].a, cases[i].b);
        return compare_with_formula(cap_snake_annulus(g.space, cases[i].p, ann).value,
                                    snake_oracle(cases[i].p, ann, 16.0));
      },
      jobs);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    ok &= check(r, runs[i].rel_error <= 0.02,
                "(iii) p=" + fmt(cases[i].p) + " (" + fmt(cases[i].a) + "," + fmt(cases[i].b) + "): path " +
                    fmt(runs[i].formula) + " network " + fmt(runs[i].discrete.capacity) + " rel " +
                    fmt(runs[i].rel_error));
  }
  r.pass = ok;
  return r;
}

// 6. bow-tie: measure exponent, and the grid capacity at p = n + alpha
inline CriterionResult bowtie_suite(int jobs) {
  CriterionResult r{6, "bow-tie: measure exponent n+alpha; grid capacity at p=n+alpha drops >= 25% per halving"};
  bool ok = true;
  for (double alpha : {-0.5, 0.5}) {
    const GalleryEntry g = make_bowtie(alpha);
    std::vector<double> x, y;
    for (int j = 2; j <= 12; ++j) {
      const double d = std::ldexp(1.0, -j);
      x.push_back(std::log(d));
      y.push_back(std::log(mu_annulus(g.space, 1.0 - d, 1.0)));
    }
    const double raw = fit_line(x, y).slope;
    const AdFitReport fit = estimate_ad_exponent(g.space, g.probes.ad_family, MeasureOptions::relative(), jobs);
    const double capped = std::min(1.0, 2.0 + alpha);
    ok &= check(r, std::abs(raw - (2.0 + alpha)) <= 0.1 && std::abs(fit.eta_hat - capped) <= 0.1,
                "alpha=" + fmt(alpha) + ": raw exponent at R=1 " + fmt(raw) + " vs " + fmt(2.0 + alpha) +
                    ", capped analysis " + fmt(fit.eta_hat) + " vs " + fmt(capped));
  }
  const double alpha = 0.5, p = 2.5;
  const AnnulusSpec ann(0.75, 1.0);
  const RefinementReport ref = refinement_study(
      [&](double h) { return bowtie_discrete_capacity(alpha, p, ann, h); },
      {1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0}, p, jobs);
  bool each = true;
  std::string seq;
  for (std::size_t k = 0; k < ref.h.size(); ++k) seq += " h=1/" + fmt(1.0 / ref.h[k]) + ":" + fmt(ref.cap[k]);
  note(r, "     p=2.5, delta=0.25 capacities:" + seq);
  for (std::size_t k = 0; k < ref.reduction.size(); ++k) {
    each &= check(r, ref.reduction[k] >= 0.25,
                  "refinement " + std::to_string(k + 1) + " reduces capacity by " + fmt(100.0 * ref.reduction[k]) + "%");
  }
  note(r, "     monotone " + std::string(ref.monotone ? "yes" : "no") + "; cap^(1/(1-p)) vs log(1/h): slope " +
              fmt(ref.rate_slope) + ", relative residual " + fmt(ref.rate_rel_residual) +
              (ref.tends_to_zero ? " (logarithmic decay to 0)" : ""));
  r.pass = ok && each;
  return r;
}

// 7. eta <= 1 over the gallery
inline CriterionResult eta_guard(int jobs) {
  CriterionResult r{7, "eta_hat <= 1.05 over the full gallery"};
  bool ok = true;
  for (const auto& g : full_gallery()) {
    if (g.space.traits().point_mass_at_center) continue;
    const AdFitReport fit = estimate_ad_exponent(g.space, g.probes.ad_family, MeasureOptions::relative(), jobs);
    ok &= check(r, fit.eta_hat <= kEtaCap, g.key + ": eta_hat " + fmt(fit.eta_hat));
  }
  r.pass = ok;
  return r;
}

// 8. 1-AD characterization: condition (b) vs the eta = 1 envelope, and (d)
inline CriterionResult one_ad_characterization(int jobs) {
  CriterionResult r{8, "1-AD characterization: (b) matches the eta=1 envelope; (d) fails exactly without reverse doubling"};
  const std::vector<std::pair<GalleryEntry, bool>> spaces{
      {make_rn(2), true},
      {make_buckley(0.5), true},
      {make_halfline(HalfLineKind::MinOneOverX), false},
      {make_halfline(HalfLineKind::ExpDecay), false},
      {make_snake(), true},
  };
  bool ok = true;
  for (const auto& [g, d_expected] : spaces) {
    const OneAdReport o =
        check_one_ad(g.space, g.probes.one_ad_lo, g.probes.one_ad_hi, 256, {}, MeasureOptions::relative(), jobs);
    const auto env = ad_envelope(g.space, g.probes.ad_family, 1.0, MeasureOptions::relative(), jobs);
    ok &= check(r, o.condition_b == env.bounded_above && o.condition_d == d_expected,
                g.key + ": (b) " + (o.condition_b ? "holds" : "fails") + ", envelope " +
                    (env.bounded_above ? "bounded" : "unbounded") + " (max " + fmt(env.max_ratio) + "), (d) " +
                    (o.condition_d ? "holds" : "fails"));
  }
  r.pass = ok;
  return r;
}

// 9. p = 1: inf-cut formula vs max-flow on the radial network
inline CriterionResult p1_consistency(int jobs) {
  CriterionResult r{9, "p=1: infimum cut vs min-cut oracle within 1%"};
  struct Case {
    SpaceSpec space;
    double a, b;
  };
  const SpaceSpec u = unweighted(2), bk = make_buckley(0.5).space;
  const std::vector<Case> cases{{u, 1.0, 2.0}, {u, 0.9, 1.0}, {u, 0.25, 3.0}, {bk, 0.5, 1.0}, {bk, 0.8, 1.5}};
  auto runs = parallel_map<OracleComparison>(
      cases.size(),
      [&](std::size_t i) {
        const AnnulusSpec ann(cases[i].a, cases[i].b);
        return compare_with_formula(cap_radial_p1(cases[i].space, ann).value,
                                    radial_oracle(cases[i].space, 1.0, ann, 2000));
      },
      jobs);
  bool ok = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    ok &= check(r, runs[i].rel_error <= 0.01,
                cases[i].space.name() + " (" + fmt(cases[i].a) + "," + fmt(cases[i].b) + "): cut " +
                    fmt(runs[i].formula) + " min-cut " + fmt(runs[i].discrete.capacity) + " rel " +
                    fmt(runs[i].rel_error));
  }
  r.pass = ok;
  return r;
}

// 10. blowup: 1/delta on the unweighted half-line; none on the bow-tie at p = n + alpha
inline CriterionResult blowup(int jobs) {
  CriterionResult r{10, "blowup: half-line cap = 1/delta; bow-tie at p=n+alpha reports NO-BLOWUP"};
  TraitSet t;
  t.pi_exponents = {{1.0, true}};
  t.global_pi = {{1.0, true}};
  const SpaceSpec h("halfline-unweighted", HalfLine{}, WeightSpec(), t);
  std::vector<double> ds;
  for (int j = 1; j <= 12; ++j) ds.push_back(std::ldexp(1.0, -j));
  const BlowupReport b = blowup_probe(h, 2.0, 1.0, ds, {}, Gating::Enforce, 1.0, ProbeDirection::Inner, jobs);
  double worst = 0.0;
  for (const auto& row : b.rows) worst = std::max(worst, rel(row.cap, 1.0 / row.delta));
  bool ok = check(r, b.blowup && worst <= 1e-8,
                  std::string("half-line: ") + b.verdict() + ", growth " + fmt(b.growth) +
                      ", max rel deviation from 1/delta " + fmt(worst));
  for (double alpha : {0.5, -0.5}) {
    const GalleryEntry g = make_bowtie(alpha);
    const double p = 2.0 + alpha;
    const BlowupReport bt = blowup_probe_refined(
        g.space, p, 1.0, {0.25, 0.125},
        [&](const AnnulusSpec& a, double hh) { return bowtie_discrete_capacity(alpha, p, a, hh); }, bowtie_meshes,
        Gating::Diagnose, std::nullopt, jobs);
    const bool zero = std::all_of(bt.rows.begin(), bt.rows.end(), [](const BlowupRow& row) { return row.cap == 0.0; });
    std::string ev;
    for (std::size_t i = 0; i < bt.rows.size(); ++i) {
      const auto& s = bt.refinements[i];
      ev += " delta=" + fmt(bt.rows[i].delta) + ": " + fmt(s.cap.front()) + " -> " + fmt(s.cap.back()) +
            (s.tends_to_zero ? " (limit 0)" : " (no limit 0)") + ";";
    }
    ok &= check(r, !bt.blowup && zero, "bow-tie alpha=" + fmt(alpha) + ", p=" + fmt(p) + ": " + bt.verdict() + ";" + ev);
  }
  r.pass = ok;
  return r;
}

}  // namespace acceptance

using AcceptanceCriterion = std::function<CriterionResult(int)>;

inline std::vector<AcceptanceCriterion> acceptance_criteria() {
  return {acceptance::oracle_equivalence, acceptance::thin_exponent,   acceptance::buckley_sharpness,
          acceptance::measure_identities, acceptance::snake_suite,     acceptance::bowtie_suite,
          acceptance::eta_guard,          acceptance::one_ad_characterization, acceptance::p1_consistency,
          acceptance::blowup};
}

/// Runs the criteria in order; `only` selects ids (empty = all). Errors turn
/// a criterion into FAIL with the message recorded.
inline std::vector<CriterionResult> run_acceptance(int jobs = default_jobs(), const std::vector<int>& only = {}) {
  std::vector<CriterionResult> out;
  const auto all = acceptance_criteria();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[i](jobs);
    } catch (const std::exception& e) {
      r.id = id;
      r.title = "criterion " + std::to_string(id);
      r.pass = false;
      r.info.push_back(std::string("error: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace anncap
