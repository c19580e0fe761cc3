#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anncap/capacity.hpp"
#include "anncap/decay.hpp"
#include "anncap/fit.hpp"
#include "anncap/parallel.hpp"

namespace anncap {

enum class BoundId {
  UpperSimple,
  UpperEta,
  LowerPiAd,
  LowerPBase,
  TwoSidedNice,
  TwoSidedAnnular,
  LowerCorkscrewQ,
  LowerP1NoDoubling,
  MeasureLowerQ,
};

inline constexpr BoundId kAllBounds[] = {
    BoundId::UpperSimple,     BoundId::UpperEta,        BoundId::LowerPiAd,
    BoundId::LowerPBase,      BoundId::TwoSidedNice,    BoundId::TwoSidedAnnular,
    BoundId::LowerCorkscrewQ, BoundId::LowerP1NoDoubling, BoundId::MeasureLowerQ,
};

inline const char* to_string(BoundId id) {
  switch (id) {
    case BoundId::UpperSimple: return "UpperSimple";
    case BoundId::UpperEta: return "UpperEta";
    case BoundId::LowerPiAd: return "LowerPiAd";
    case BoundId::LowerPBase: return "LowerPBase";
    case BoundId::TwoSidedNice: return "TwoSidedNice";
    case BoundId::TwoSidedAnnular: return "TwoSidedAnnular";
    case BoundId::LowerCorkscrewQ: return "LowerCorkscrewQ";
    case BoundId::LowerP1NoDoubling: return "LowerP1NoDoubling";
    case BoundId::MeasureLowerQ: return "MeasureLowerQ";
  }
  return "?";
}

inline BoundId bound_from_string(const std::string& s) {
  for (BoundId id : kAllBounds) {
    if (s == to_string(id)) return id;
  }
  throw InputError("unknown bound id `" + s + "`");
}

enum class BoundKind { Upper, Lower, TwoSided };

inline BoundKind kind_of(BoundId id) {
  switch (id) {
    case BoundId::UpperSimple:
    case BoundId::UpperEta: return BoundKind::Upper;
    case BoundId::TwoSidedNice:
    case BoundId::TwoSidedAnnular: return BoundKind::TwoSided;
    default: return BoundKind::Lower;
  }
}

/// MeasureLowerQ bounds mu(B_R \ B_r); every other id bounds the capacity.
inline bool bounds_measure(BoundId id) { return id == BoundId::MeasureLowerQ; }

struct BoundSpec {
  BoundId id = BoundId::UpperSimple;
  double p = 2.0;
  std::optional<double> eta;  // defaults to the declared ad_eta
  std::optional<double> q;
  // LowerCorkscrewQ only: q comes from self-improvement of the global p-PI
  // rather than from a declared pointwise q-PI; needs p > 1.
  bool self_improved_q = false;
};

namespace detail {

inline double resolve_eta(const BoundSpec& spec, const SpaceSpec& space) {
  if (spec.eta) return *spec.eta;
  if (spec.id == BoundId::TwoSidedNice) return 1.0;
  if (space.traits().ad_eta) return *space.traits().ad_eta;
  throw ApplicabilityError(to_string(spec.id), "eta-AD at x0 (no eta given or declared)");
}

inline double resolve_q(const BoundSpec& spec) {
  if (!spec.q) throw DomainError(std::string(to_string(spec.id)) + " needs q");
  if (!(*spec.q >= 1.0)) throw DomainError(std::string(to_string(spec.id)) + " needs q >= 1");
  return *spec.q;
}

inline bool needs_q(BoundId id) {
  return id == BoundId::LowerPiAd || id == BoundId::LowerCorkscrewQ || id == BoundId::MeasureLowerQ;
}

inline bool needs_eta(BoundId id) { return id == BoundId::UpperEta || id == BoundId::LowerPiAd; }

}  // namespace detail

/// Hypotheses about the space alone; empty when all hold.
inline std::vector<std::string> failed_space_hypotheses(const BoundSpec& spec, const SpaceSpec& space) {
  check_p(spec.p);
  const TraitSet& t = space.traits();
  const double p = spec.p;
  std::vector<std::string> out;
  auto need = [&](bool ok, const char* what) {
    if (!ok) out.emplace_back(what);
  };
  auto ad_at_least = [&](double eta) { return t.ad_eta && *t.ad_eta >= eta - 1e-12; };
  const bool doubling = t.doubling || t.global_doubling;
  double eta = 1.0;
  if (detail::needs_eta(spec.id)) {
    if (spec.eta) {
      eta = *spec.eta;
      if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
    } else if (t.ad_eta) {
      eta = *t.ad_eta;
    }
  }
  const double q = detail::needs_q(spec.id) && !(spec.id == BoundId::LowerCorkscrewQ && spec.self_improved_q)
                       ? detail::resolve_q(spec)
                       : 1.0;
  switch (spec.id) {
    case BoundId::UpperSimple: break;
    case BoundId::UpperEta:
      need(ad_at_least(eta) && (spec.eta || t.ad_eta), "eta-AD at x0");
      break;
    case BoundId::LowerPiAd:
      need(q < p, "1 <= q < p");
      need(t.supports_pi(q), "q-PI at x0");
      need(ad_at_least(eta) && (spec.eta || t.ad_eta), "eta-AD at x0");
      need(t.reverse_doubling.has_value(), "reverse-doubling at x0");
      break;
    case BoundId::LowerPBase:
      need(t.supports_pi(p), "p-PI at x0");
      need(doubling, "doubling at x0");
      need(t.reverse_doubling.has_value(), "reverse-doubling at x0");
      break;
    case BoundId::TwoSidedNice:
      need(t.supports_pi(1.0), "1-PI at x0");
      need(ad_at_least(1.0), "1-AD at x0");
      need(t.reverse_doubling.has_value(), "reverse-doubling at x0");
      break;
    case BoundId::TwoSidedAnnular:
    case BoundId::LowerCorkscrewQ:
      need(t.global_doubling, "global doubling");
      need(t.supports_global_pi(p), "global p-PI");
      need(t.corkscrew_a.has_value(), "corkscrew_a");
      if (spec.id == BoundId::LowerCorkscrewQ) {
        if (spec.self_improved_q) {
          need(p > 1.0, "p > 1");
        } else {
          need(q < p, "1 <= q < p");
          need(t.supports_pi(q), "q-PI at x0");
        }
      }
      break;
    case BoundId::LowerP1NoDoubling:
      need(p == 1.0, "p = 1");
      need(t.supports_pi(1.0), "1-PI at x0");
      need(t.reverse_doubling.has_value(), "reverse-doubling at x0");
      break;
    case BoundId::MeasureLowerQ:
      need(t.supports_pi(q), "q-PI at x0");
      need(doubling, "doubling at x0");
      need(t.reverse_doubling.has_value(), "reverse-doubling at x0");
      break;
  }
  return out;
}

/// Hypotheses tying the annulus to the space (thinness, size vs diameter).
inline std::vector<std::string> failed_annulus_hypotheses(const BoundSpec& spec, const SpaceSpec& space,
                                                          const AnnulusSpec& ann) {
  std::vector<std::string> out;
  if (spec.id == BoundId::UpperSimple || spec.id == BoundId::UpperEta) return out;
  if (!ann.is_thin()) out.emplace_back("thin annulus (R/2 <= r)");
  const TraitSet& t = space.traits();
  const bool uses_tau = spec.id == BoundId::LowerPiAd || spec.id == BoundId::LowerPBase ||
                        spec.id == BoundId::TwoSidedNice || spec.id == BoundId::LowerP1NoDoubling ||
                        spec.id == BoundId::MeasureLowerQ;
  if (uses_tau && t.reverse_doubling && std::isfinite(t.diameter)) {
    const double cap = t.diameter / (2.0 * t.reverse_doubling->tau);
    const bool ok = spec.id == BoundId::MeasureLowerQ ? ann.R < cap : ann.R <= cap;
    if (!ok) out.emplace_back("R <= diam/(2 tau)");
  }
  return out;
}

inline std::vector<std::string> failed_hypotheses(const BoundSpec& spec, const SpaceSpec& space,
                                                  const AnnulusSpec& ann) {
  auto out = failed_space_hypotheses(spec, space);
  for (auto& s : failed_annulus_hypotheses(spec, space, ann)) out.push_back(std::move(s));
  return out;
}

/// The bound expression with constant 1, hypotheses not checked.
inline double evaluate_bound_unchecked(const BoundSpec& spec, const SpaceSpec& space, const AnnulusSpec& ann,
                                       const MeasureOptions& opt = MeasureOptions::relative()) {
  check_p(spec.p);
  const double p = spec.p;
  const double t = ann.thickness();
  auto ball_term = [&] { return mu_ball(space, ann.R, opt) / std::pow(ann.R, p); };
  switch (spec.id) {
    case BoundId::UpperSimple:
    case BoundId::TwoSidedAnnular: return mu_annulus(space, ann, opt) / std::pow(ann.delta(), p);
    case BoundId::UpperEta: return std::pow(t, detail::resolve_eta(spec, space) - p) * ball_term();
    case BoundId::LowerPiAd: {
      const double eta = detail::resolve_eta(spec, space), q = detail::resolve_q(spec);
      return std::pow(t, eta * (q - p) / q) * ball_term();
    }
    case BoundId::LowerPBase: return ball_term();
    case BoundId::TwoSidedNice: return std::pow(t, 1.0 - p) * ball_term();
    case BoundId::LowerCorkscrewQ: return std::pow(t, detail::resolve_q(spec) - p) * ball_term();
    case BoundId::LowerP1NoDoubling: return mu_ball(space, ann.r, opt) / ann.r;
    case BoundId::MeasureLowerQ: return std::pow(t, detail::resolve_q(spec)) * mu_ball(space, ann.R, opt);
  }
  return 0.0;
}

/// Throws ApplicabilityError naming the first failed hypothesis.
inline double evaluate_bound(const BoundSpec& spec, const SpaceSpec& space, const AnnulusSpec& ann,
                             const MeasureOptions& opt = MeasureOptions::relative()) {
  const auto failed = failed_hypotheses(spec, space, ann);
  if (!failed.empty()) throw ApplicabilityError(to_string(spec.id), failed.front());
  return evaluate_bound_unchecked(spec, space, ann, opt);
}

// ---------------------------------------------------------------------------
// Envelope sweeps
// ---------------------------------------------------------------------------

using QuantitySource = std::function<double(const AnnulusSpec&)>;

inline QuantitySource capacity_source(const SpaceSpec& space, double p,
                                      const MeasureOptions& opt = MeasureOptions::relative()) {
  return [space, p, opt](const AnnulusSpec& a) { return compute_capacity(space, p, a, opt).value; };
}

inline QuantitySource measure_source(const SpaceSpec& space,
                                     const MeasureOptions& opt = MeasureOptions::relative()) {
  return [space, opt](const AnnulusSpec& a) { return mu_annulus(space, a, opt); };
}

/// Enforce: a failed space hypothesis throws, annuli failing annulus
/// hypotheses are dropped. Diagnose: evaluate everything, record failures.
enum class Gating { Enforce, Diagnose };

inline constexpr std::size_t kMinSweep = 8;
inline constexpr double kUpperSimpleSlack = 1e-8;

struct SweepRow {
  double r = 0.0;
  double R = 0.0;
  double cap = 0.0;  // the bounded quantity (capacity, or measure for MeasureLowerQ)
  double bound = 0.0;
  double ratio = 0.0;
};

struct SweepReport {
  std::string bound;
  std::string quantity;  // "capacity" | "measure"
  double p = 0.0;
  std::vector<SweepRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double slope = 0.0;  // log ratio vs trend_variable
  std::string trend_variable;
  double quantity_slope = NAN;  // log cap vs log(1-r/R), NaN without spread
  bool hypotheses_ok = true;
  std::vector<std::string> failed_hypotheses;
  std::size_t dropped = 0;
  bool pass = false;

  const char* verdict() const { return pass ? "PASS" : "FAIL"; }
};

namespace detail {

inline void add_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace detail

inline SweepReport verify_envelope(const SpaceSpec& space, const BoundSpec& spec, const AnnulusFamily& family,
                                   QuantitySource source = {}, Gating gating = Gating::Enforce,
                                   int jobs = default_jobs(),
                                   const MeasureOptions& opt = MeasureOptions::relative()) {
  SweepReport rep;
  rep.bound = to_string(spec.id);
  rep.quantity = bounds_measure(spec.id) ? "measure" : "capacity";
  rep.p = spec.p;
  if (!source) source = bounds_measure(spec.id) ? measure_source(space, opt) : capacity_source(space, spec.p, opt);

  for (const auto& h : failed_space_hypotheses(spec, space)) detail::add_unique(rep.failed_hypotheses, h);
  if (gating == Gating::Enforce && !rep.failed_hypotheses.empty()) {
    throw ApplicabilityError(rep.bound, rep.failed_hypotheses.front());
  }
  std::vector<AnnulusSpec> kept;
  for (const auto& a : family.annuli) {
    const auto fa = failed_annulus_hypotheses(spec, space, a);
    if (fa.empty() || gating == Gating::Diagnose) {
      kept.push_back(a);
      for (const auto& h : fa) detail::add_unique(rep.failed_hypotheses, h);
    } else {
      ++rep.dropped;
    }
  }
  if (kept.empty()) throw InputError("verify_envelope: no applicable annulus in the family");
  if (kept.size() < kMinSweep) throw InputError("verify_envelope: need >= 8 applicable annuli");
  rep.hypotheses_ok = rep.failed_hypotheses.empty();

  rep.rows = parallel_map<SweepRow>(
      kept.size(),
      [&](std::size_t i) {
        const AnnulusSpec& a = kept[i];
        SweepRow row{a.r, a.R, source(a), evaluate_bound_unchecked(spec, space, a, opt), 0.0};
        row.ratio = row.cap / row.bound;
        return row;
      },
      jobs);

  std::vector<double> ratios, lt, lR, qs;
  for (const auto& row : rep.rows) {
    ratios.push_back(row.ratio);
    lt.push_back(std::log1p(-row.r / row.R));
    lR.push_back(std::log(row.R));
    qs.push_back(row.cap);
  }
  const BoundednessVerdict v = assess_boundedness(ratios, lt, lR);
  rep.min_ratio = v.min_ratio;
  rep.max_ratio = v.max_ratio;
  rep.slope = v.slope;
  rep.trend_variable = v.trend_variable;
  if (std::all_of(qs.begin(), qs.end(), [](double x) { return x > 0.0 && std::isfinite(x); })) {
    try {
      std::vector<double> lq;
      for (double x : qs) lq.push_back(std::log(x));
      rep.quantity_slope = fit_line(lt, lq).slope;
    } catch (const InputError&) {
    }
  }
  rep.pass = std::isfinite(rep.min_ratio) && rep.min_ratio >= 1.0 / kRatioWindow &&
             rep.max_ratio <= kRatioWindow && std::abs(rep.slope) <= kTrendTolerance;
  if (spec.id == BoundId::UpperSimple) rep.pass = rep.pass && rep.max_ratio <= 1.0 + kUpperSimpleSlack;
  return rep;
}

struct EnvelopePair {
  SweepReport lower;
  SweepReport upper;
  bool pass = false;
};

/// Lower and upper bound checked on the same family.
inline EnvelopePair verify_envelope(const SpaceSpec& space, const BoundSpec& lower, const BoundSpec& upper,
                                    const AnnulusFamily& family, QuantitySource source = {},
                                    Gating gating = Gating::Enforce, int jobs = default_jobs()) {
  if (kind_of(lower.id) == BoundKind::Upper || kind_of(upper.id) == BoundKind::Lower) {
    throw DomainError("verify_envelope: expected a (lower, upper) pair");
  }
  EnvelopePair pair;
  pair.lower = verify_envelope(space, lower, family, source, gating, jobs);
  pair.upper = verify_envelope(space, upper, family, source, gating, jobs);
  pair.pass = pair.lower.pass && pair.upper.pass;
  return pair;
}

// ---------------------------------------------------------------------------
// Blowup
// ---------------------------------------------------------------------------

/// Mesh refinement of one discrete capacity. Under p > 1 the limit is taken as
/// zero when the sequence decreases strictly and cap^(1/(1-p)) grows linearly
/// in log(1/h) (logarithmic decay to zero).
struct RefinementReport {
  std::vector<double> h;
  std::vector<double> cap;
  std::vector<double> reduction;  // 1 - cap[k+1]/cap[k]
  bool monotone = false;
  double rate_slope = 0.0;        // d cap^(1/(1-p)) / d log(1/h)
  double rate_rel_residual = 0.0;  // max residual / spread of the fitted values
  bool tends_to_zero = false;
};

inline constexpr double kRateResidual = 0.05;

inline RefinementReport refinement_study(const std::function<double(double)>& cap_at_h, std::vector<double> hs,
                                         double p, int jobs = default_jobs()) {
  if (!(p > 1.0)) throw DomainError("refinement_study needs p > 1");
  if (hs.size() < 3) throw InputError("refinement_study needs >= 3 mesh sizes");
  std::sort(hs.begin(), hs.end(), std::greater<>());
  RefinementReport rep;
  rep.h = hs;
  rep.cap = parallel_map<double>(hs.size(), [&](std::size_t i) { return cap_at_h(hs[i]); }, jobs);
  rep.monotone = true;
  for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
    rep.reduction.push_back(1.0 - rep.cap[k + 1] / rep.cap[k]);
    if (!(rep.cap[k + 1] < rep.cap[k])) rep.monotone = false;
  }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    x.push_back(-std::log(hs[k]));
    y.push_back(rep.cap[k] > 0.0 ? std::pow(rep.cap[k], 1.0 / (1.0 - p)) : INFINITY);
  }
  if (std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
    const LineFit f = fit_line(x, y);
    rep.rate_slope = f.slope;
    const double spread = *std::max_element(y.begin(), y.end()) - *std::min_element(y.begin(), y.end());
    rep.rate_rel_residual = spread > 0.0 ? f.max_residual / spread : INFINITY;
    rep.tends_to_zero = rep.monotone && rep.rate_slope > 0.0 && rep.rate_rel_residual <= kRateResidual;
  } else {
    rep.tends_to_zero = true;  // exact zeros on the mesh
  }
  return rep;
}

inline constexpr double kBlowupGrowth = 1e3;

enum class ProbeDirection { Inner, Outer };  // (R - delta, R) or (R, R + delta)

struct BlowupRow {
  double delta = 0.0;
  double cap = 0.0;
};

struct BlowupReport {
  double p = 0.0;
  double R = 0.0;
  ProbeDirection direction = ProbeDirection::Inner;
  std::vector<BlowupRow> rows;
  std::vector<RefinementReport> refinements;  // discrete sources only
  bool strictly_increasing = false;
  double growth = 0.0;           // final / initial capacity
  double delta_exponent = NAN;   // log cap vs log delta
  double measure_exponent = NAN;  // log cap vs log mu(annulus)
  double expected_measure_exponent = NAN;  // 1 - p/q, an upper limit for measure_exponent
  bool hypotheses_ok = true;
  std::vector<std::string> failed_hypotheses;
  bool blowup = false;

  const char* verdict() const { return blowup ? "BLOWUP" : "NO-BLOWUP"; }
};

namespace detail {

inline AnnulusSpec probe_annulus(double R, double delta, ProbeDirection dir) {
  return dir == ProbeDirection::Inner ? AnnulusSpec(R - delta, R) : AnnulusSpec(R, R + delta);
}

inline std::vector<std::string> blowup_hypotheses(const SpaceSpec& space, double p, double R,
                                                  std::optional<double> q) {
  std::vector<std::string> out;
  const TraitSet& t = space.traits();
  if (q ? !(*q >= 1.0 && *q < p && t.supports_pi(*q)) : !t.supports_pi_below(p)) {
    out.emplace_back("q-PI at x0 with 1 <= q < p");
  }
  if (!(2.0 * R < t.diameter)) out.emplace_back("mu(X \\ B_R) > 0 (R < diam/2)");
  return out;
}

inline void finish_blowup(BlowupReport& rep, const SpaceSpec& space, std::optional<double> q,
                          const MeasureOptions& opt) {
  const auto& rows = rep.rows;
  rep.strictly_increasing = rows.size() >= 2;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    if (!(rows[k + 1].cap > rows[k].cap)) rep.strictly_increasing = false;
  }
  rep.growth = rows.front().cap > 0.0 ? rows.back().cap / rows.front().cap : (rows.back().cap > 0.0 ? INFINITY : 0.0);
  rep.blowup = rep.strictly_increasing && rep.growth >= kBlowupGrowth;
  const bool positive = std::all_of(rows.begin(), rows.end(), [](const BlowupRow& r) {
    return r.cap > 0.0 && std::isfinite(r.cap);
  });
  if (positive) {
    std::vector<double> ld, lc, lm;
    for (const auto& r : rows) {
      ld.push_back(std::log(r.delta));
      lc.push_back(std::log(r.cap));
      lm.push_back(std::log(mu_annulus(space, probe_annulus(rep.R, r.delta, rep.direction), opt)));
    }
    rep.delta_exponent = fit_line(ld, lc).slope;
    try {
      rep.measure_exponent = fit_line(lm, lc).slope;
    } catch (const InputError&) {
    }
  }
  if (q) rep.expected_measure_exponent = 1.0 - rep.p / *q;
}

}  // namespace detail

/// Capacities of (R - delta, R) (or the outer annulus) along decreasing delta.
/// BLOWUP = strictly increasing and final/initial >= 1e3.
inline BlowupReport blowup_probe(const SpaceSpec& space, double p, double R, std::vector<double> deltas,
                                 QuantitySource source = {}, Gating gating = Gating::Enforce,
                                 std::optional<double> q = std::nullopt,
                                 ProbeDirection dir = ProbeDirection::Inner, int jobs = default_jobs(),
                                 const MeasureOptions& opt = MeasureOptions::relative()) {
  check_p(p);
  if (deltas.size() < 2) throw InputError("blowup_probe needs >= 2 deltas");
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  BlowupReport rep;
  rep.p = p;
  rep.R = R;
  rep.direction = dir;
  rep.failed_hypotheses = detail::blowup_hypotheses(space, p, R, q);
  rep.hypotheses_ok = rep.failed_hypotheses.empty();
  if (gating == Gating::Enforce && !rep.hypotheses_ok) {
    throw ApplicabilityError("Blowup", rep.failed_hypotheses.front());
  }
  if (!source) source = capacity_source(space, p, opt);
  rep.rows = parallel_map<BlowupRow>(
      deltas.size(),
      [&](std::size_t i) {
        return BlowupRow{deltas[i], source(detail::probe_annulus(R, deltas[i], dir))};
      },
      jobs);
  detail::finish_blowup(rep, space, q, opt);
  return rep;
}

/// Discrete variant: cap_at(ann, h) is refined over hs_for(delta) and the
/// limit (zero, or the finest value) enters the probe.
inline BlowupReport blowup_probe_refined(
    const SpaceSpec& space, double p, double R, std::vector<double> deltas,
    const std::function<double(const AnnulusSpec&, double)>& cap_at,
    const std::function<std::vector<double>(double)>& hs_for, Gating gating = Gating::Enforce,
    std::optional<double> q = std::nullopt, int jobs = default_jobs(),
    const MeasureOptions& opt = MeasureOptions::relative()) {
  check_p(p);
  if (deltas.size() < 2) throw InputError("blowup_probe needs >= 2 deltas");
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  BlowupReport rep;
  rep.p = p;
  rep.R = R;
  rep.failed_hypotheses = detail::blowup_hypotheses(space, p, R, q);
  rep.hypotheses_ok = rep.failed_hypotheses.empty();
  if (gating == Gating::Enforce && !rep.hypotheses_ok) {
    throw ApplicabilityError("Blowup", rep.failed_hypotheses.front());
  }
  for (double d : deltas) {
    const AnnulusSpec ann = detail::probe_annulus(R, d, ProbeDirection::Inner);
    auto study = refinement_study([&](double h) { return cap_at(ann, h); }, hs_for(d), p, jobs);
    rep.rows.push_back({d, study.tends_to_zero ? 0.0 : study.cap.back()});
    rep.refinements.push_back(std::move(study));
  }
  detail::finish_blowup(rep, space, q, opt);
  return rep;
}

}  // namespace anncap
