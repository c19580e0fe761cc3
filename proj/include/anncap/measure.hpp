#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "anncap/errors.hpp"
#include "anncap/quadrature.hpp"

namespace anncap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

struct ConstantWeight {
  double c = 1.0;
};

/// w(rho) = rho^alpha.
struct PowerWeight {
  double alpha = 0.0;
};

/// w(rho) = max{1, |rho - 1|^(eta - 1)}.
struct BuckleyWeight {
  double eta = 0.5;
};

/// w(rho) = sum_j a_j max{1, |q_j rho - 1|^(eta - 1)}, finite truncation.
struct SummedBuckleyWeight {
  double eta = 0.5;
  std::vector<std::pair<double, double>> terms;  // (q_j, a_j)
};

enum class HalfLineKind { MinOneOverX, ExpDecay, ExpInvOverXSq };

struct HalfLineCatalogWeight {
  HalfLineKind kind = HalfLineKind::MinOneOverX;
};

/// Piecewise-linear interpolation of (grid, values); constant beyond the ends.
struct TabulatedWeight {
  std::vector<double> grid;
  std::vector<double> values;
};

/// A kink or integrable power singularity of a weight. `exponent` is the
/// local power (w ~ |rho - at|^exponent); 0 for plain kinks.
struct WeightBreakpoint {
  double at;
  double exponent;
};

class WeightSpec {
 public:
  using Variant = std::variant<ConstantWeight, PowerWeight, BuckleyWeight, SummedBuckleyWeight,
                               HalfLineCatalogWeight, TabulatedWeight>;

  WeightSpec() : v_(ConstantWeight{1.0}) {}

  static WeightSpec constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("Constant weight must be positive");
    return WeightSpec(ConstantWeight{c});
  }
  static WeightSpec power(double alpha) {
    if (!std::isfinite(alpha)) throw DomainError("PowerAlpha exponent must be finite");
    return WeightSpec(PowerWeight{alpha});
  }
  static WeightSpec buckley(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("BuckleyEta requires 0 < eta < 1");
    return WeightSpec(BuckleyWeight{eta});
  }
  static WeightSpec summed_buckley(double eta, std::vector<std::pair<double, double>> terms) {
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("SummedBuckley requires 0 < eta < 1");
    if (terms.empty()) throw DomainError("SummedBuckley needs at least one term");
    for (auto [q, a] : terms) {
      if (!(q > 0.0) || !(a > 0.0)) throw DomainError("SummedBuckley terms need q_j, a_j > 0");
    }
    return WeightSpec(SummedBuckleyWeight{eta, std::move(terms)});
  }
  static WeightSpec half_line(HalfLineKind kind) { return WeightSpec(HalfLineCatalogWeight{kind}); }
  static WeightSpec tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() < 2 || grid.size() != values.size()) {
      throw InputError("Tabulated weight needs >= 2 points and matching columns");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(values[i] > 0.0)) throw InputError("Tabulated weight values must be positive");
      if (i > 0 && !(grid[i] > grid[i - 1])) {
        throw InputError("Tabulated weight grid must be strictly increasing");
      }
    }
    return WeightSpec(TabulatedWeight{std::move(grid), std::move(values)});
  }

  const Variant& variant() const noexcept { return v_; }
  bool is_constant() const noexcept { return std::holds_alternative<ConstantWeight>(v_); }
  bool is_unit() const noexcept {
    return is_constant() && std::get<ConstantWeight>(v_).c == 1.0;
  }

  double operator()(double rho) const { return eval_offset(rho, 0.0); }

  /// w(anchor + t), evaluated so that the distance to a singular anchor is
  /// taken from t directly instead of from the rounded sum.
  double eval_offset(double anchor, double t) const {
    return std::visit([&](const auto& w) { return eval_impl(w, anchor, t); }, v_);
  }

  std::vector<WeightBreakpoint> breakpoints() const {
    return std::visit([](const auto& w) { return breakpoints_impl(w); }, v_);
  }

  std::string describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& w) {
          using T = std::decay_t<decltype(w)>;
          if constexpr (std::is_same_v<T, ConstantWeight>) {
            os << "constant(" << w.c << ")";
          } else if constexpr (std::is_same_v<T, PowerWeight>) {
            os << "power(alpha=" << w.alpha << ")";
          } else if constexpr (std::is_same_v<T, BuckleyWeight>) {
            os << "buckley(eta=" << w.eta << ")";
          } else if constexpr (std::is_same_v<T, SummedBuckleyWeight>) {
            os << "summed_buckley(eta=" << w.eta << ", terms=" << w.terms.size() << ")";
          } else if constexpr (std::is_same_v<T, HalfLineCatalogWeight>) {
            switch (w.kind) {
              case HalfLineKind::MinOneOverX: os << "min_one_over_x"; break;
              case HalfLineKind::ExpDecay: os << "exp_decay"; break;
              case HalfLineKind::ExpInvOverXSq: os << "exp_inv_over_x_sq"; break;
            }
          } else {
            os << "tabulated(" << w.grid.size() << " points)";
          }
        },
        v_);
    return os.str();
  }

 private:
  explicit WeightSpec(Variant v) : v_(std::move(v)) {}

  static double buckley_term(double eta, double dist) {
    return std::max(1.0, std::pow(std::abs(dist), eta - 1.0));
  }

  static double eval_impl(const ConstantWeight& w, double, double) { return w.c; }
  static double eval_impl(const PowerWeight& w, double anchor, double t) {
    return std::pow(anchor + t, w.alpha);
  }
  static double eval_impl(const BuckleyWeight& w, double anchor, double t) {
    return buckley_term(w.eta, (anchor - 1.0) + t);
  }
  static double eval_impl(const SummedBuckleyWeight& w, double anchor, double t) {
    double s = 0.0;
    for (auto [q, a] : w.terms) s += a * buckley_term(w.eta, std::fma(q, anchor, -1.0) + q * t);
    return s;
  }
  static double eval_impl(const HalfLineCatalogWeight& w, double anchor, double t) {
    const double x = anchor + t;
    switch (w.kind) {
      case HalfLineKind::MinOneOverX:
        return x <= 1.0 ? 1.0 : 1.0 / x;
      case HalfLineKind::ExpDecay:
        return std::exp(-x);
      case HalfLineKind::ExpInvOverXSq:
        if (x <= 0.0) return 0.0;
        if (x <= 0.5) return std::exp(-1.0 / x - 2.0 * std::log(x));
        return 4.0 * std::exp(-2.0);
    }
    return 0.0;
  }
  static double eval_impl(const TabulatedWeight& w, double anchor, double t) {
    const double x = anchor + t;
    if (x <= w.grid.front()) return w.values.front();
    if (x >= w.grid.back()) return w.values.back();
    const auto it = std::upper_bound(w.grid.begin(), w.grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - w.grid.begin());
    const double s = (x - w.grid[i - 1]) / (w.grid[i] - w.grid[i - 1]);
    return w.values[i - 1] + s * (w.values[i] - w.values[i - 1]);
  }

  static std::vector<WeightBreakpoint> breakpoints_impl(const ConstantWeight&) { return {}; }
  static std::vector<WeightBreakpoint> breakpoints_impl(const PowerWeight& w) {
    return {{0.0, w.alpha}};
  }
  static std::vector<WeightBreakpoint> breakpoints_impl(const BuckleyWeight& w) {
    return {{1.0, w.eta - 1.0}, {2.0, 0.0}};
  }
  static std::vector<WeightBreakpoint> breakpoints_impl(const SummedBuckleyWeight& w) {
    std::vector<WeightBreakpoint> out;
    for (auto [q, a] : w.terms) {
      out.push_back({1.0 / q, w.eta - 1.0});
      out.push_back({2.0 / q, 0.0});
    }
    return out;
  }
  static std::vector<WeightBreakpoint> breakpoints_impl(const HalfLineCatalogWeight& w) {
    switch (w.kind) {
      case HalfLineKind::MinOneOverX: return {{1.0, 0.0}};
      case HalfLineKind::ExpDecay: return {};
      case HalfLineKind::ExpInvOverXSq: return {{0.5, 0.0}};
    }
    return {};
  }
  static std::vector<WeightBreakpoint> breakpoints_impl(const TabulatedWeight& w) {
    std::vector<WeightBreakpoint> out;
    for (double g : w.grid) out.push_back({g, 0.0});
    return out;
  }

  Variant v_;
};

/// Reads a tabulated weight from CSV with header `rho,w`.
inline WeightSpec load_tabulated_weight(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("weight CSV: empty input");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "rho,w") throw InputError("weight CSV: header must be `rho,w`");
  std::vector<double> grid, values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b)) {
      throw InputError("weight CSV: malformed line " + std::to_string(lineno));
    }
    try {
      grid.push_back(std::stod(a));
      values.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw InputError("weight CSV: non-numeric value on line " + std::to_string(lineno));
    }
  }
  return WeightSpec::tabulated(std::move(grid), std::move(values));
}

inline WeightSpec load_tabulated_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open weight CSV: " + path);
  return load_tabulated_weight(in);
}

// ---------------------------------------------------------------------------
// Geometry, traits, spaces
// ---------------------------------------------------------------------------

struct RadialRn {
  int n = 2;
};
struct HalfLine {};
struct Snake {
  int k_max = 10;
};
struct BowTie {
  int n = 2;
  double alpha = 0.0;
};

using Geometry = std::variant<RadialRn, HalfLine, Snake, BowTie>;

enum class CenterTag { Origin, BowTieTip };

/// Exponents q for which a q-Poincare inequality is declared: {q >= q_min}
/// or {q > q_min}. Ranges are upward closed, matching Hoelder monotonicity.
struct PiRange {
  double q_min = 1.0;
  bool inclusive = true;

  bool contains(double q) const { return inclusive ? q >= q_min : q > q_min; }
};

struct ReverseDoubling {
  double tau = 2.0;
  double gamma = 1.5;
};

/// Analytic properties declared for a space (transcribed, never computed).
struct TraitSet {
  std::vector<PiRange> pi_exponents;  // pointwise at the center
  std::vector<PiRange> global_pi;     // at every point, uniform constants
  double lambda = 1.0;
  bool doubling = false;         // at the center point
  bool global_doubling = false;  // with uniform constants at every point
  std::optional<ReverseDoubling> reverse_doubling;
  std::optional<double> corkscrew_a;
  bool point_mass_at_center = false;
  std::optional<double> ad_eta;  // declared annular-decay exponent at the center
  double diameter = kInf;

  bool supports_pi(double q) const {
    if (q < 1.0) return false;
    auto has = [&](const PiRange& r) { return r.contains(q); };
    return std::any_of(pi_exponents.begin(), pi_exponents.end(), has) ||
           std::any_of(global_pi.begin(), global_pi.end(), has);
  }

  bool supports_global_pi(double q) const {
    if (q < 1.0) return false;
    return std::any_of(global_pi.begin(), global_pi.end(), [&](const PiRange& r) { return r.contains(q); });
  }

  /// Some q in [1, p) has a declared q-PI.
  bool supports_pi_below(double p) const {
    auto below = [&](const PiRange& r) {
      const double lo = std::max(1.0, r.q_min);
      if (lo > r.q_min || r.inclusive) return lo < p;
      return r.q_min < p;  // open at q_min >= 1: some q in (q_min, p)
    };
    return std::any_of(pi_exponents.begin(), pi_exponents.end(), below) ||
           std::any_of(global_pi.begin(), global_pi.end(), below);
  }

  void validate() const {
    if (!(lambda >= 1.0)) throw DomainError("TraitSet: lambda must be >= 1");
    for (const auto* set : {&pi_exponents, &global_pi}) {
      for (const auto& r : *set) {
        if (!(r.q_min >= 1.0) && r.inclusive) throw DomainError("TraitSet: PI exponents must be >= 1");
      }
    }
    if (corkscrew_a && !(*corkscrew_a > 0.0 && *corkscrew_a <= 1.0)) {
      throw DomainError("TraitSet: corkscrew constant must lie in (0, 1]");
    }
    if (reverse_doubling && !(reverse_doubling->tau > 1.0 && reverse_doubling->gamma > 1.0)) {
      throw DomainError("TraitSet: reverse doubling needs tau > 1 and gamma > 1");
    }
    if (!(diameter > 0.0)) throw DomainError("TraitSet: diameter must be positive");
  }
};

class SpaceSpec {
 public:
  SpaceSpec(std::string name, Geometry geometry, WeightSpec weight, TraitSet traits)
      : name_(std::move(name)), geometry_(geometry), weight_(std::move(weight)),
        traits_(std::move(traits)) {
    std::visit([&](const auto& g) { validate(g); }, geometry_);
    traits_.validate();
  }

  const std::string& name() const noexcept { return name_; }
  const Geometry& geometry() const noexcept { return geometry_; }
  const WeightSpec& weight() const noexcept { return weight_; }
  const TraitSet& traits() const noexcept { return traits_; }
  CenterTag center() const noexcept { return center_; }

  bool is_radial() const noexcept { return std::holds_alternative<RadialRn>(geometry_); }
  bool is_half_line() const noexcept { return std::holds_alternative<HalfLine>(geometry_); }
  bool is_snake() const noexcept { return std::holds_alternative<Snake>(geometry_); }
  bool is_bowtie() const noexcept { return std::holds_alternative<BowTie>(geometry_); }

  /// Ambient dimension used by the radial reduction (1 for the half-line).
  int dimension() const {
    if (auto* g = std::get_if<RadialRn>(&geometry_)) return g->n;
    if (auto* b = std::get_if<BowTie>(&geometry_)) return b->n;
    return 1;
  }

 private:
  void validate(const RadialRn& g) {
    if (g.n < 1) throw DomainError("RadialRn needs n >= 1");
    if (auto* p = std::get_if<PowerWeight>(&weight_.variant()); p && !(p->alpha > -g.n)) {
      throw DomainError("PowerAlpha weight needs alpha > -n (non-integrable at the center)");
    }
    if (std::holds_alternative<HalfLineCatalogWeight>(weight_.variant())) {
      throw DomainError("half-line catalog weights belong to the HalfLine geometry");
    }
    center_ = CenterTag::Origin;
  }
  void validate(const HalfLine&) {
    if (auto* p = std::get_if<PowerWeight>(&weight_.variant()); p && !(p->alpha > -1.0)) {
      throw DomainError("PowerAlpha weight on the half-line needs alpha > -1");
    }
    center_ = CenterTag::Origin;
  }
  void validate(const Snake& s) {
    if (s.k_max < 1 || s.k_max > 40) throw DomainError("Snake needs 1 <= k_max <= 40");
    weight_ = WeightSpec();  // arclength measure; any supplied weight is ignored
    center_ = CenterTag::Origin;
  }
  void validate(const BowTie& b) {
    if (b.n < 2) throw DomainError("BowTie needs n >= 2");
    if (!(b.alpha > -b.n)) throw DomainError("BowTie needs alpha > -n");
    weight_ = WeightSpec::power(b.alpha);
    center_ = CenterTag::BowTieTip;
  }

  std::string name_;
  Geometry geometry_;
  WeightSpec weight_;
  TraitSet traits_;
  CenterTag center_ = CenterTag::Origin;
};

/// The annulus B_R \ B_r about the space's center.
struct AnnulusSpec {
  double r;
  double R;

  AnnulusSpec(double r_in, double R_in) : r(r_in), R(R_in) {
    if (!(r > 0.0) || !(R > r) || !std::isfinite(R)) {
      throw DomainError("AnnulusSpec needs 0 < r < R");
    }
  }

  double delta() const noexcept { return R - r; }
  double thickness() const noexcept { return 1.0 - r / R; }  // 1 - r/R
  bool is_thin() const noexcept { return R <= 2.0 * r; }
};

// ---------------------------------------------------------------------------
// Ball and annulus measures
// ---------------------------------------------------------------------------

struct MeasureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;

  static MeasureOptions relative(double rel = 1e-10) { return {0.0, rel}; }
};

/// Area of the unit (m)-sphere in R^(m+1): 2 pi^((m+1)/2) / Gamma((m+1)/2).
inline double sphere_area(int m) {
  const double k = 0.5 * (m + 1);
  return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

/// Surface-area constant of the radial reduction: |S^(n-1)|.
inline double surface_constant(int n) { return sphere_area(n - 1); }

namespace detail {

inline std::vector<double> weight_cuts(const WeightSpec& w) {
  std::vector<double> cuts;
  for (const auto& bp : w.breakpoints()) cuts.push_back(bp.at);
  return cuts;
}

/// Weight evaluated through the offset to the nearer panel end.
inline double weight_at(const WeightSpec& w, const QuadNode& node) {
  return node.from_left <= node.from_right ? w.eval_offset(node.a, node.from_left)
                                           : w.eval_offset(node.b, -node.from_right);
}

inline QuadResult radial_measure(const WeightSpec& w, int n, double r, double R,
                                 const MeasureOptions& opt, bool with_sphere) {
  const auto cuts = weight_cuts(w);
  const auto* power = std::get_if<PowerWeight>(&w.variant());
  auto integrand = [&](const QuadNode& node) {
    // one power, so that rho^alpha cannot overflow before the Jacobian hits it
    if (power) return std::pow(node.x, power->alpha + (n - 1));
    double v = weight_at(w, node);
    if (n > 1) v *= std::pow(node.x, n - 1);
    return v;
  };
  QuadResult q = integrate(integrand, r, R, cuts, {opt.abs_tol, opt.rel_tol});
  if (with_sphere) {
    const double s = surface_constant(n);
    q.value *= s;
    q.error *= s;
  }
  return q;
}

// Measure of the snake's pieces at distance in [lo, hi) from the origin.
inline double snake_measure(int k_max, double lo, double hi) {
  auto overlap = [&](double a, double b) {
    return std::max(0.0, std::min(b, hi) - std::max(a, lo));
  };
  double m = overlap(0.0, 1.0);
  for (int k = 0; k <= k_max; ++k) {
    const double rad = std::ldexp(1.0, k);
    if (rad >= lo && rad < hi) m += std::numbers::pi * rad;
    if (k >= 1) m += overlap(std::ldexp(1.0, k - 1), rad);
  }
  return m;
}

// Smallest/largest roots of a x^2 + b x + c = 0 (stable form); nan if none.
inline std::pair<double, double> quadratic_roots(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {NAN, NAN};
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double x1 = q / a;
  double x2 = q != 0.0 ? c / q : -b / (2.0 * a);
  if (x1 > x2) std::swap(x1, x2);
  return {x1, x2};
}

// mu of {x in bow-tie : r <= |x - x0| < R} with x0 = (-1, 0, ..., 0).
// Axial symmetry about the x_1 axis reduces the n-D integral to the
// half-plane (xi, rho): xi = x_1 + 1, rho = |(x_2, ..., x_n)|.
inline QuadResult bowtie_measure(int n, double alpha, double r, double R,
                                 const MeasureOptions& opt) {
  const double sphere = sphere_area(n - 2);
  const double xi_hi = std::min(3.0, R);
  std::vector<double> cuts{1.0, r};
  for (double rad : {r, R}) {
    // (xi - 1)^2 / 4 = rad^2 - xi^2  <=>  5 xi^2 - 2 xi + 1 - 4 rad^2 = 0
    auto [x1, x2] = quadratic_roots(5.0, -2.0, 1.0 - 4.0 * rad * rad);
    for (double x : {x1, x2}) {
      if (std::isfinite(x)) cuts.push_back(x);
    }
  }
  const QuadOptions inner_opt{0.0, 1e-12, 40, 7};
  auto outer = [&](const QuadNode& node) -> double {
    // x_1 = xi - 1, formed through the offset to the nearer panel end.
    const double x1 = node.from_left <= node.from_right ? (node.a - 1.0) + node.from_left
                                                        : (node.b - 1.0) - node.from_right;
    const double cone = 0.5 * std::abs(x1);
    const double out2 = ((R - 1.0) - x1) * (R + 1.0 + x1);
    if (out2 <= 0.0) return 0.0;
    const double hi = std::min(cone, std::sqrt(out2));
    const double in2 = ((r - 1.0) - x1) * (r + 1.0 + x1);
    const double lo = in2 > 0.0 ? std::sqrt(in2) : 0.0;
    if (!(hi > lo)) return 0.0;
    // rho = |x_1| s keeps the integrand O(1) however close to the apex.
    const double ax = std::abs(x1);
    auto inner = [&](double t) {
      double v = std::pow(std::hypot(1.0, t), alpha);
      if (n > 2) v *= std::pow(t, n - 2);
      return v;
    };
    const double scale = std::pow(ax, alpha + n - 1);
    return sphere * scale * integrate_plain(inner, lo / ax, hi / ax, {}, inner_opt).value;
  };
  return integrate(outer, 0.0, xi_hi, cuts, {opt.abs_tol, opt.rel_tol});
}

}  // namespace detail

inline void check_snake_radius(const Snake& s, double R) {
  if (R > std::ldexp(1.0, s.k_max)) {
    throw DomainError("snake balls beyond radius 2^k_max are not represented");
  }
}

/// mu(B_R \ B_r) with its quadrature error bound, for 0 <= r <= R.
inline QuadResult measure_annulus(const SpaceSpec& space, double r, double R,
                                  const MeasureOptions& opt = {}) {
  if (!(r >= 0.0) || !(R >= r) || !std::isfinite(R)) {
    throw DomainError("measure_annulus needs 0 <= r <= R < inf");
  }
  if (r == R) return {};
  return std::visit(
      [&](const auto& g) -> QuadResult {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RadialRn>) {
          return detail::radial_measure(space.weight(), g.n, r, R, opt, true);
        } else if constexpr (std::is_same_v<T, HalfLine>) {
          return detail::radial_measure(space.weight(), 1, r, R, opt, false);
        } else if constexpr (std::is_same_v<T, Snake>) {
          check_snake_radius(g, R);
          return {detail::snake_measure(g.k_max, r, R), 0.0};
        } else {
          return detail::bowtie_measure(g.n, g.alpha, r, R, opt);
        }
      },
      space.geometry());
}

/// mu(B_R) with its quadrature error bound.
inline QuadResult measure_ball(const SpaceSpec& space, double R, const MeasureOptions& opt = {}) {
  if (!(R > 0.0)) throw DomainError("mu_ball needs R > 0");
  return measure_annulus(space, 0.0, R, opt);
}

inline double mu_ball(const SpaceSpec& space, double R, const MeasureOptions& opt = {}) {
  return measure_ball(space, R, opt).value;
}

inline double mu_annulus(const SpaceSpec& space, const AnnulusSpec& ann,
                         const MeasureOptions& opt = {}) {
  return measure_annulus(space, ann.r, ann.R, opt).value;
}

/// Degenerate r = R gives 0.
inline double mu_annulus(const SpaceSpec& space, double r, double R,
                         const MeasureOptions& opt = {}) {
  return measure_annulus(space, r, R, opt).value;
}

}  // namespace anncap
