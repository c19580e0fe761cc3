#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "anncap/fit.hpp"
#include "anncap/measure.hpp"
#include "anncap/parallel.hpp"

namespace anncap {

// ---------------------------------------------------------------------------
// Annulus families
// ---------------------------------------------------------------------------

/// Annuli tagged with a group id; a group shares one outer radius (or one
/// straddled radius) and is fitted on its own.
struct AnnulusFamily {
  std::vector<AnnulusSpec> annuli;
  std::vector<int> group;

  std::size_t size() const noexcept { return annuli.size(); }
  void add(AnnulusSpec a, int g) {
    annuli.push_back(a);
    group.push_back(g);
  }
  int group_count() const {
    return group.empty() ? 0 : *std::max_element(group.begin(), group.end()) + 1;
  }
};

/// r = R(1 - 2^-j), j = j_lo..j_hi.
inline AnnulusFamily thin_family(double R, int j_lo, int j_hi, int group = 0) {
  AnnulusFamily fam;
  for (int j = j_lo; j <= j_hi; ++j) fam.add(AnnulusSpec(R * (1.0 - std::ldexp(1.0, -j)), R), group);
  return fam;
}

inline AnnulusFamily multi_r_family(const std::vector<double>& Rs, int j_lo, int j_hi) {
  AnnulusFamily fam;
  for (std::size_t g = 0; g < Rs.size(); ++g) {
    auto part = thin_family(Rs[g], j_lo, j_hi, static_cast<int>(g));
    for (std::size_t i = 0; i < part.size(); ++i) fam.add(part.annuli[i], part.group[i]);
  }
  return fam;
}

/// r = c - delta, R = c + delta for delta = c 2^-j, j = j_lo..j_hi.
inline AnnulusFamily straddle_family(double c, int j_lo, int j_hi, int group = 0) {
  AnnulusFamily fam;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double d = c * std::ldexp(1.0, -j);
    fam.add(AnnulusSpec(c - d, c + d), group);
  }
  return fam;
}

// ---------------------------------------------------------------------------
// Annular decay
// ---------------------------------------------------------------------------

/// mu(B_R \ B_r) / ((1 - r/R)^eta mu(B_R)).
inline double ad_ratio(const SpaceSpec& space, const AnnulusSpec& ann, double eta,
                       const MeasureOptions& opt = MeasureOptions::relative()) {
  if (!(eta > 0.0)) throw DomainError("ad_ratio needs eta > 0");
  const double m_ann = mu_annulus(space, ann, opt);
  const double m_ball = mu_ball(space, ann.R, opt);
  return m_ann / (std::pow(ann.thickness(), eta) * m_ball);
}

struct AdFitReport {
  double eta_hat = 0.0;
  double constant_hat = 0.0;
  double residual = 0.0;
  int sample_count = 0;
  double r_min = 0.0;
  double R_max = 0.0;
  std::vector<double> group_slopes;

  // Below this fitted exponent the family shows no decay at all.
  static constexpr double kNoDecay = 0.05;
  bool has_ad() const noexcept { return eta_hat > kNoDecay; }
};

/// Fits log(mu(ann)/mu(B_R)) against log(1 - r/R) per group. eta_hat is the
/// smallest group slope: the AD inequality must hold for every group at once.
inline AdFitReport estimate_ad_exponent(const SpaceSpec& space, const AnnulusFamily& fam,
                                        const MeasureOptions& opt = MeasureOptions::relative(),
                                        int jobs = default_jobs()) {
  if (fam.size() < 8) throw InputError("estimate_ad_exponent needs >= 8 annuli");
  for (const auto& a : fam.annuli) {
    if (!a.is_thin()) throw InputError("estimate_ad_exponent needs thin annuli (R/2 <= r)");
  }
  struct Sample {
    double x, y;
  };
  auto samples = parallel_map<Sample>(
      fam.size(),
      [&](std::size_t i) {
        const auto& a = fam.annuli[i];
        const double m_ann = mu_annulus(space, a, opt);
        const double m_ball = mu_ball(space, a.R, opt);
        if (!(m_ann > 0.0) || !(m_ball > 0.0)) {
          throw DomainError("estimate_ad_exponent: annulus of zero measure");
        }
        return Sample{std::log(a.thickness()), std::log(m_ann / m_ball)};
      },
      jobs);

  std::map<int, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    groups[fam.group[i]].first.push_back(samples[i].x);
    groups[fam.group[i]].second.push_back(samples[i].y);
  }
  AdFitReport rep;
  rep.sample_count = static_cast<int>(fam.size());
  rep.r_min = INFINITY;
  for (const auto& a : fam.annuli) {
    rep.r_min = std::min(rep.r_min, a.r);
    rep.R_max = std::max(rep.R_max, a.R);
  }
  bool any = false;
  for (auto& [g, xy] : groups) {
    if (xy.first.size() < 2 || variance_of(xy.first) <= 0.0) continue;
    const LineFit f = fit_line(xy.first, xy.second);
    rep.group_slopes.push_back(f.slope);
    rep.residual = std::max(rep.residual, f.max_residual);
    if (!any || f.slope < rep.eta_hat) {
      rep.eta_hat = f.slope;
      rep.constant_hat = std::exp(f.intercept);
      any = true;
    }
  }
  if (!any) throw InputError("estimate_ad_exponent: degenerate fit (no spread in 1 - r/R)");
  return rep;
}

/// ad_ratio over a family, judged by the boundedness rule.
inline BoundednessVerdict ad_envelope(const SpaceSpec& space, const AnnulusFamily& fam,
                                      double eta,
                                      const MeasureOptions& opt = MeasureOptions::relative(),
                                      int jobs = default_jobs()) {
  auto ratios = parallel_map<double>(
      fam.size(), [&](std::size_t i) { return ad_ratio(space, fam.annuli[i], eta, opt); }, jobs);
  std::vector<double> lx, lR;
  for (const auto& a : fam.annuli) {
    lx.push_back(std::log(a.thickness()));
    lR.push_back(std::log(a.R));
  }
  return assess_boundedness(ratios, lx, lR);
}

// ---------------------------------------------------------------------------
// 1-AD characterization through f(rho) = mu(B_rho)
// ---------------------------------------------------------------------------

struct OneAdReport {
  double sup_ratio = 0.0;  // sup rho f'/f; +inf when f' is unbounded or f jumps
  double inf_ratio = 0.0;
  bool jump_detected = false;
  double lipschitz_bound = 0.0;
  double max_growth_exponent = 0.0;  // of refined difference quotients
  double octave_min_slope = 0.0;      // trend of per-octave minima, upper octaves
  double octave_min_slope_low = 0.0;  // same, lower octaves
  bool condition_b = false;
  bool condition_d = false;
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  int grid_size = 0;
};

struct OneAdOptions {
  int top_cells = 3;          // always re-test this many steepest cells
  double jump_factor = 32.0;  // and any cell above this multiple of the median
  int refinements = 6;        // subdivide suspect cells up to 2^refinements
  double jump_exponent = 0.9;
  double unbounded_exponent = 0.1;
  double collapse_floor = 1e-3;  // inf/sup below this counts as collapse
};

namespace detail {

// Max difference quotient over 2^k equal sub-cells of [a, b], k = 0..levels.
inline std::vector<double> refined_quotients(const SpaceSpec& space, double a, double b,
                                             int levels, const MeasureOptions& opt) {
  std::vector<double> out;
  for (int k = 0; k <= levels; ++k) {
    const int m = 1 << k;
    const double h = (b - a) / m;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double lo = a + h * i;
      const double hi = i + 1 == m ? b : a + h * (i + 1);
      best = std::max(best, mu_annulus(space, lo, hi, opt) / (hi - lo));
    }
    out.push_back(best);
  }
  return out;
}

// Growth exponent of the quotient under halving, from the finest half of levels.
inline double growth_exponent(const std::vector<double>& q) {
  std::vector<double> xs, ys;
  const std::size_t start = q.size() / 2;
  for (std::size_t k = start; k < q.size(); ++k) {
    if (!(q[k] > 0.0)) continue;
    xs.push_back(static_cast<double>(k) * std::log(2.0));
    ys.push_back(std::log(q[k]));
  }
  if (xs.size() < 2) return 0.0;
  return fit_line(xs, ys).slope;
}

}  // namespace detail

/// Samples f on a geometric grid over [rho_lo, rho_hi] and reports the
/// normalized derivative rho f'/f. Suspect cells are refined: a quotient that
/// grows like 1/h is a jump, one that grows like a smaller power is an
/// unbounded derivative, one that settles is Lipschitz.
inline OneAdReport check_one_ad(const SpaceSpec& space, double rho_lo, double rho_hi,
                                int grid_size = 256, const OneAdOptions& o = {},
                                const MeasureOptions& opt = MeasureOptions::relative(),
                                int jobs = default_jobs()) {
  if (!(rho_lo > 0.0) || !(rho_hi > rho_lo)) throw DomainError("check_one_ad needs 0 < lo < hi");
  if (grid_size < 64) throw InputError("check_one_ad needs grid_size >= 64");
  const int N = grid_size;
  std::vector<double> rho(N + 1);
  for (int i = 0; i <= N; ++i) {
    rho[i] = rho_lo * std::pow(rho_hi / rho_lo, static_cast<double>(i) / N);
  }
  rho[N] = rho_hi;

  struct Cell {
    double f_lo, dm;
  };
  auto cells = parallel_map<Cell>(
      N,
      [&](std::size_t i) {
        return Cell{mu_ball(space, rho[i], opt), mu_annulus(space, rho[i], rho[i + 1], opt)};
      },
      jobs);

  OneAdReport rep;
  rep.rho_lo = rho_lo;
  rep.rho_hi = rho_hi;
  rep.grid_size = N;
  std::vector<double> quotient(N), s(N), mid(N);
  for (int i = 0; i < N; ++i) {
    const double h = rho[i + 1] - rho[i];
    quotient[i] = cells[i].dm / h;
    mid[i] = std::sqrt(rho[i] * rho[i + 1]);
    const double f_mid = cells[i].f_lo + 0.5 * cells[i].dm;
    s[i] = f_mid > 0.0 ? mid[i] * quotient[i] / f_mid : INFINITY;
  }
  rep.lipschitz_bound = *std::max_element(quotient.begin(), quotient.end());
  rep.sup_ratio = *std::max_element(s.begin(), s.end());
  rep.inf_ratio = *std::min_element(s.begin(), s.end());

  // cells to re-test
  std::vector<int> order(N);
  for (int i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s[a] > s[b]; });
  const double med = median_of(s);
  std::vector<int> suspect;
  for (int k = 0; k < N; ++k) {
    const int i = order[k];
    if (k < o.top_cells || s[i] > o.jump_factor * med) suspect.push_back(i);
  }
  auto exps = parallel_map<double>(
      suspect.size(),
      [&](std::size_t k) {
        const int i = suspect[k];
        const auto q = detail::refined_quotients(space, rho[i], rho[i + 1], o.refinements, opt);
        return detail::growth_exponent(q);
      },
      jobs);
  for (double e : exps) rep.max_growth_exponent = std::max(rep.max_growth_exponent, e);
  if (rep.max_growth_exponent >= o.jump_exponent) {
    rep.jump_detected = true;
    rep.sup_ratio = INFINITY;
  } else if (rep.max_growth_exponent >= o.unbounded_exponent) {
    rep.sup_ratio = INFINITY;
  }
  rep.condition_b = !rep.jump_detected && std::isfinite(rep.sup_ratio);

  // Condition (d), lower half: per-octave minima neither trend down nor collapse.
  std::vector<double> oct_x, oct_y;
  const int octaves = std::max(1, static_cast<int>(std::floor(std::log2(rho_hi / rho_lo))));
  for (int k = 0; k < octaves; ++k) {
    const double lo = rho_lo * std::ldexp(1.0, k);
    const double hi = k + 1 == octaves ? rho_hi : lo * 2.0;
    double m = INFINITY;
    for (int i = 0; i < N; ++i) {
      if (mid[i] >= lo && mid[i] < hi) m = std::min(m, s[i]);
    }
    if (std::isfinite(m) && m > 0.0) {
      oct_x.push_back(std::log(std::sqrt(lo * hi)));
      oct_y.push_back(std::log(m));
    }
  }
  // Both ends of the range: minima must not fall off toward small rho (lower
  // half of the octaves) nor toward large rho (upper half).
  const std::size_t no = oct_x.size();
  if (no >= 4) {
    const std::size_t h = no / 2;
    const std::span<const double> xs(oct_x), ys(oct_y);
    rep.octave_min_slope_low = fit_line(xs.subspan(0, h), ys.subspan(0, h)).slope;
    rep.octave_min_slope = fit_line(xs.subspan(no - h), ys.subspan(no - h)).slope;
  } else if (no >= 2) {
    rep.octave_min_slope = rep.octave_min_slope_low = fit_line(oct_x, oct_y).slope;
  }
  const double finite_sup = *std::max_element(s.begin(), s.end());
  const bool collapsed = !(rep.inf_ratio > o.collapse_floor * finite_sup);
  rep.condition_d = rep.octave_min_slope >= -kTrendTolerance &&
                    rep.octave_min_slope_low <= kTrendTolerance && !collapsed;
  return rep;
}

// ---------------------------------------------------------------------------
// Doubling and reverse doubling
// ---------------------------------------------------------------------------

struct DoublingReport {
  double min_ratio = 0.0;  // min over the family of mu(B_{tau r}) / mu(B_r)
  double max_ratio = 0.0;
  double tail_slope = 0.0;  // trend near the extreme end of the family
  bool holds = false;
  double worst_gamma = 0.0;  // = min_ratio, the best constant the data allow
};

namespace detail {

inline std::vector<double> dilation_ratios(const SpaceSpec& space, double tau,
                                           const std::vector<double>& radii,
                                           const MeasureOptions& opt, int jobs) {
  return parallel_map<double>(
      radii.size(),
      [&](std::size_t i) {
        const double r = radii[i];
        return 1.0 + mu_annulus(space, r, tau * r, opt) / mu_ball(space, r, opt);
      },
      jobs);
}

// Slope of log(g) vs log r over the quarter of the family at the extreme end
// (at least three radii).
inline double tail_trend(const std::vector<double>& radii, const std::vector<double>& g,
                         bool extreme_at_small) {
  const std::size_t n = radii.size();
  const std::size_t half = std::max<std::size_t>(3, n / 4);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < half && k < n; ++k) {
    const std::size_t i = extreme_at_small ? k : n - 1 - k;
    if (!(g[i] > 0.0)) continue;
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(g[i]));
  }
  if (lx.size() < 2) return 0.0;
  return fit_line(lx, ly).slope;
}

}  // namespace detail

/// Reverse doubling: mu(B_{tau r}) >= gamma mu(B_r) with gamma > 1 uniformly
/// for r <= diam/(2 tau). Holds if ratio - 1 stays away from 0 and shows no
/// decay toward the end of the family where it is smallest; on a bounded
/// space the large end is not asymptotic and only the floor applies there.
inline DoublingReport check_reverse_doubling(const SpaceSpec& space, double tau,
                                             std::vector<double> radii,
                                             const MeasureOptions& opt = MeasureOptions::relative(),
                                             int jobs = default_jobs()) {
  if (!(tau > 1.0)) throw DomainError("check_reverse_doubling needs tau > 1");
  const double r_cap = space.traits().diameter / (2.0 * tau);
  radii.erase(std::remove_if(radii.begin(), radii.end(), [&](double r) { return r > r_cap; }), radii.end());
  if (radii.size() < 2) throw InputError("check_reverse_doubling needs >= 2 radii below diam/(2 tau)");
  std::sort(radii.begin(), radii.end());
  const auto ratio = detail::dilation_ratios(space, tau, radii, opt, jobs);
  DoublingReport rep;
  rep.min_ratio = *std::min_element(ratio.begin(), ratio.end());
  rep.max_ratio = *std::max_element(ratio.begin(), ratio.end());
  rep.worst_gamma = rep.min_ratio;
  std::vector<double> excess;
  for (double q : ratio) excess.push_back(q - 1.0);
  const auto argmin = std::min_element(ratio.begin(), ratio.end()) - ratio.begin();
  const bool small_end = static_cast<std::size_t>(argmin) < radii.size() / 2;
  rep.tail_slope = detail::tail_trend(radii, excess, small_end);
  // decay of ratio - 1 toward the extreme end means ratio -> 1
  double decay = small_end ? rep.tail_slope : -rep.tail_slope;
  if (!small_end && std::isfinite(space.traits().diameter)) decay = 0.0;
  rep.holds = rep.min_ratio > 1.0 + 1e-2 && decay <= kTrendTolerance;
  return rep;
}

/// Doubling at the center: mu(B_{tau r}) <= C mu(B_r), default tau = 2.
inline DoublingReport check_doubling(const SpaceSpec& space, std::vector<double> radii,
                                     double tau = 2.0,
                                     const MeasureOptions& opt = MeasureOptions::relative(),
                                     int jobs = default_jobs()) {
  if (!(tau > 1.0)) throw DomainError("check_doubling needs tau > 1");
  if (radii.size() < 2) throw InputError("check_doubling needs >= 2 radii");
  std::sort(radii.begin(), radii.end());
  const auto ratio = detail::dilation_ratios(space, tau, radii, opt, jobs);
  DoublingReport rep;
  rep.min_ratio = *std::min_element(ratio.begin(), ratio.end());
  rep.max_ratio = *std::max_element(ratio.begin(), ratio.end());
  rep.worst_gamma = rep.min_ratio;
  const auto argmax = std::max_element(ratio.begin(), ratio.end()) - ratio.begin();
  const bool small_end = static_cast<std::size_t>(argmax) < radii.size() / 2;
  rep.tail_slope = detail::tail_trend(radii, ratio, small_end);
  const double growth = small_end ? -rep.tail_slope : rep.tail_slope;
  rep.holds = rep.max_ratio <= kRatioWindow && growth <= kTrendTolerance;
  return rep;
}

/// Radii r_lo * factor^k up to r_hi.
inline std::vector<double> geometric_radii(double r_lo, double r_hi, double factor = 2.0) {
  std::vector<double> out;
  for (double r = r_lo; r <= r_hi * (1.0 + 1e-12); r *= factor) out.push_back(r);
  return out;
}

}  // namespace anncap
