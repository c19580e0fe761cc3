#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "anncap/measure.hpp"

namespace anncap {

struct NetVertex {
  double radius;  // distance to the condenser center
  double x = 0.0;
  double y = 0.0;
};

struct NetEdge {
  int i;
  int j;
  double length;
  double mass;
};

class DiscreteNetwork {
 public:
  int add_vertex(double radius, double x = 0.0, double y = 0.0) {
    vertices_.push_back({radius, x, y});
    return static_cast<int>(vertices_.size()) - 1;
  }

  void add_edge(int i, int j, double length, double mass) {
    const int n = static_cast<int>(vertices_.size());
    if (i < 0 || j < 0 || i >= n || j >= n) throw InputError("edge endpoint out of range");
    if (i == j) throw InputError("self-loop edges are not allowed");
    if (!(length > 0.0) || !(mass > 0.0) || !std::isfinite(length) || !std::isfinite(mass)) {
      throw InputError("edge length and mass must be positive and finite");
    }
    edges_.push_back({i, j, length, mass});
  }

  const std::vector<NetVertex>& vertices() const noexcept { return vertices_; }
  const std::vector<NetEdge>& edges() const noexcept { return edges_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

 private:
  std::vector<NetVertex> vertices_;
  std::vector<NetEdge> edges_;
};

struct BoundaryCondition {
  std::vector<int> inner;  // u = 1
  std::vector<int> outer;  // u = 0

  void validate(std::size_t n) const {
    if (inner.empty() || outer.empty()) throw InfeasibleError("boundary sets must be nonempty");
    std::vector<char> tag(n, 0);
    for (int v : inner) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) throw InputError("boundary vertex out of range");
      tag[v] = 1;
    }
    for (int v : outer) {
      if (v < 0 || static_cast<std::size_t>(v) >= n) throw InputError("boundary vertex out of range");
      if (tag[v] == 1) throw InputError("inner and outer boundary sets overlap");
    }
  }
};

/// inner = {radius <= r}, outer = {radius >= R}; rejects resolutions that put
/// no vertex strictly between the plates.
inline BoundaryCondition boundary_by_radius(const DiscreteNetwork& net, double r, double R) {
  if (!(r < R)) throw DomainError("boundary_by_radius needs r < R");
  BoundaryCondition bc;
  bool between = false;
  const auto& vs = net.vertices();
  for (std::size_t v = 0; v < vs.size(); ++v) {
    const double rad = vs[v].radius;
    if (rad <= r) {
      bc.inner.push_back(static_cast<int>(v));
    } else if (rad >= R) {
      bc.outer.push_back(static_cast<int>(v));
    } else {
      between = true;
    }
  }
  if (!between) throw InputError("network too coarse to separate r from R");
  return bc;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

enum class Grading { Uniform, GeometricTowardOuter };

/// Ratio of the widest to the narrowest cell under GeometricTowardOuter.
inline constexpr double kGradingRatio = 1e4;

/// Path of N cells over [r_lo, r_hi]; vertex 0 sits at r_lo, vertex N at r_hi.
inline DiscreteNetwork build_radial_network(const SpaceSpec& space, double r_lo, double r_hi, int N,
                                            Grading grading = Grading::Uniform,
                                            const MeasureOptions& opt = MeasureOptions::relative()) {
  if (!space.is_radial() && !space.is_half_line()) {
    throw DomainError("build_radial_network needs a RadialRn or HalfLine space");
  }
  if (N < 16) throw InputError("build_radial_network needs N >= 16");
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw DomainError("build_radial_network needs 0 < r_lo < r_hi");
  std::vector<double> nodes(N + 1);
  if (grading == Grading::Uniform) {
    for (int i = 0; i <= N; ++i) nodes[i] = r_lo + (r_hi - r_lo) * i / N;
  } else {
    const double q = std::pow(1.0 / kGradingRatio, 1.0 / (N - 1));
    std::vector<double> w(N);
    double total = 0.0;
    for (int i = 0; i < N; ++i) total += (w[i] = std::pow(q, i));
    nodes[0] = r_lo;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
      acc += w[i];
      nodes[i + 1] = r_lo + (r_hi - r_lo) * (acc / total);
    }
  }
  nodes[N] = r_hi;
  DiscreteNetwork net;
  for (double x : nodes) net.add_vertex(x, x, 0.0);
  for (int i = 0; i < N; ++i) {
    const double m = measure_annulus(space, nodes[i], nodes[i + 1], opt).value;
    net.add_edge(i, i + 1, nodes[i + 1] - nodes[i], m);
  }
  return net;
}

/// Chain along the snake's arclength: [0,1], then half-circle of radius 2^k
/// followed by the segment [2^k, 2^(k+1)], up to the half-circle of radius
/// 2^k_max. Each vertex records its Euclidean distance to the origin; radii
/// listed in `resolve` get a vertex placed exactly on them.
inline DiscreteNetwork build_snake_network(int k_max, double cells_per_unit,
                                           std::vector<double> resolve = {}) {
  if (k_max < 1 || k_max > 20) throw DomainError("build_snake_network needs 1 <= k_max <= 20");
  if (!(cells_per_unit > 0.0)) throw InputError("cells_per_unit must be positive");
  DiscreteNetwork net;
  int last = net.add_vertex(0.0);
  auto radial_piece = [&](double a, double b) {
    std::vector<double> cut{a, b};
    for (double r : resolve) {
      if (r > a && r < b) cut.push_back(r);
    }
    std::sort(cut.begin(), cut.end());
    for (std::size_t s = 0; s + 1 < cut.size(); ++s) {
      const double len = cut[s + 1] - cut[s];
      const int m = std::max(1, static_cast<int>(std::ceil(len * cells_per_unit)));
      for (int i = 1; i <= m; ++i) {
        const double rad = i == m ? cut[s + 1] : cut[s] + len * i / m;
        const int v = net.add_vertex(rad, rad, 0.0);
        net.add_edge(last, v, len / m, len / m);
        last = v;
      }
    }
  };
  auto circle_piece = [&](double rad) {
    const double len = std::numbers::pi * rad;
    const int m = std::max(1, static_cast<int>(std::ceil(len * cells_per_unit)));
    for (int i = 1; i <= m; ++i) {
      const int v = net.add_vertex(rad);
      net.add_edge(last, v, len / m, len / m);
      last = v;
    }
  };
  radial_piece(0.0, 1.0);
  for (int k = 0; k <= k_max; ++k) {
    circle_piece(std::ldexp(1.0, k));
    if (k < k_max) radial_piece(std::ldexp(1.0, k), std::ldexp(1.0, k + 1));
  }
  return net;
}

/// Square grid of mesh h on the planar bow-tie, 4-neighbour edges with both
/// ends in the cone; edge mass |midpoint|^alpha h^2, length h. Vertex radius
/// is the distance to x0 = (-1, 0). Vertices farther than max_radius + 2h
/// from x0 are dropped.
inline DiscreteNetwork build_bowtie_grid(double alpha, double h, double max_radius = kInf) {
  if (!(h > 0.0) || h > 1.0 / 16.0) throw InputError("build_bowtie_grid needs 0 < h <= 1/16");
  if (!(alpha > -2.0)) throw DomainError("build_bowtie_grid needs alpha > -2");
  const long steps = std::lround(3.0 / h);
  if (std::abs(steps * h - 3.0) > 1e-9) throw InputError("build_bowtie_grid needs 3/h integral");
  const long jmax = steps / 2 + 1;
  if ((steps + 1) * (2 * jmax + 1) > 60'000'000L) throw InputError("bow-tie grid too large");
  const double limit = max_radius + 2.0 * h;
  auto in_cone = [&](long i, long j) {
    const double x1 = -1.0 + i * h;
    const double x2 = j * h;
    return 4.0 * x2 * x2 <= x1 * x1 * (1.0 + 1e-12);
  };
  DiscreteNetwork net;
  const long width = 2 * jmax + 1;
  std::vector<int> id(static_cast<std::size_t>((steps + 1) * width), -1);
  auto at = [&](long i, long j) -> int& { return id[static_cast<std::size_t>(i * width + (j + jmax))]; };
  for (long i = 0; i <= steps; ++i) {
    for (long j = -jmax; j <= jmax; ++j) {
      if (!in_cone(i, j)) continue;
      const double x1 = -1.0 + i * h, x2 = j * h;
      const double rad = std::hypot(i * h, x2);
      if (rad > limit) continue;
      at(i, j) = net.add_vertex(rad, x1, x2);
    }
  }
  const double area = h * h;
  for (long i = 0; i <= steps; ++i) {
    for (long j = -jmax; j <= jmax; ++j) {
      const int v = at(i, j);
      if (v < 0) continue;
      const double x1 = -1.0 + i * h, x2 = j * h;
      if (i < steps && at(i + 1, j) >= 0) {
        net.add_edge(v, at(i + 1, j), h, std::pow(std::hypot(x1 + 0.5 * h, x2), alpha) * area);
      }
      if (j < jmax && at(i, j + 1) >= 0) {
        net.add_edge(v, at(i, j + 1), h, std::pow(std::hypot(x1, x2 + 0.5 * h), alpha) * area);
      }
    }
  }
  return net;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void write_network_csv(const DiscreteNetwork& net, std::ostream& out) {
  out.precision(17);
  out << "i,j,length,mass\n";
  for (const auto& e : net.edges()) out << e.i << ',' << e.j << ',' << e.length << ',' << e.mass << '\n';
}

/// Vertex count is one past the largest index; radii are unknown (NaN).
inline DiscreteNetwork read_network_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("network CSV: empty input");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "i,j,length,mass") throw InputError("network CSV: header must be `i,j,length,mass`");
  std::vector<NetEdge> edges;
  int max_id = -1, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    NetEdge e{};
    if (!(ls >> e.i >> e.j >> e.length >> e.mass)) {
      throw InputError("network CSV: malformed line " + std::to_string(lineno));
    }
    max_id = std::max({max_id, e.i, e.j});
    edges.push_back(e);
  }
  DiscreteNetwork net;
  for (int v = 0; v <= max_id; ++v) net.add_vertex(std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : edges) net.add_edge(e.i, e.j, e.length, e.mass);
  return net;
}

inline void write_potential_csv(const std::vector<double>& u, std::ostream& out) {
  out.precision(17);
  out << "id,u\n";
  for (std::size_t i = 0; i < u.size(); ++i) out << i << ',' << u[i] << '\n';
}

}  // namespace anncap
