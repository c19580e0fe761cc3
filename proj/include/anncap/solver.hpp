#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "anncap/maxflow.hpp"
#include "anncap/network.hpp"

namespace anncap {

inline constexpr int kStallWindow = 100;

struct SolveOptions {
  double tol = 1e-9;
  int max_iter = 100000;
  double hessian_eps = 1e-12;  // regularizes flat edges inside the Hessian only
};

struct SolveReport {
  double energy = 0.0;
  std::vector<double> potential;
  int iterations = 0;
  double kkt_residual = 0.0;
  std::vector<double> energy_history;  // energy after each accepted step
};

/// sum_e mass_e (|u_i - u_j| / length_e)^p
inline double energy_of(const DiscreteNetwork& net, const std::vector<double>& u, double p) {
  if (u.size() != net.vertex_count()) throw InputError("energy_of: potential size mismatch");
  double s = 0.0;
  for (const auto& e : net.edges()) {
    const double d = std::abs(u[e.i] - u[e.j]) / e.length;
    s += e.mass * (p == 1.0 ? d : std::pow(d, p));
  }
  return s;
}

namespace detail {

// Vertices connected to `from` through any path.
inline std::vector<char> reach(const DiscreteNetwork& net, const std::vector<int>& from) {
  const std::size_t n = net.vertex_count();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : net.edges()) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  for (int v : from) {
    if (!seen[v]) {
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

// A live vertex off every simple inner-to-outer path sits in a pendant piece
// hanging from one articulation vertex, and the minimizer is constant there.
// Returns that articulation vertex, or -1 for vertices on some such path.
// Inner and outer sets are contracted to single nodes joined by a virtual
// edge; the transit vertices form the block of that edge.
inline std::vector<int> pendant_anchor(const DiscreteNetwork& net, const BoundaryCondition& bc,
                                       const std::vector<char>& live) {
  const int n = static_cast<int>(net.vertex_count());
  std::vector<int> node(n, -1);
  const int S = 0, T = 1;
  int count = 2;
  for (int v : bc.inner) node[v] = S;
  for (int v : bc.outer) node[v] = T;
  for (int v = 0; v < n; ++v) {
    if (node[v] < 0 && live[v]) node[v] = count++;
  }
  std::vector<std::pair<int, int>> ends;
  std::vector<std::vector<std::pair<int, int>>> adj(count);
  auto link = [&](int a, int b) {
    const int id = static_cast<int>(ends.size());
    ends.emplace_back(a, b);
    adj[a].emplace_back(b, id);
    adj[b].emplace_back(a, id);
  };
  link(S, T);  // virtual edge, id 0
  for (const auto& e : net.edges()) {
    const int a = node[e.i], b = node[e.j];
    if (a >= 0 && b >= 0 && a != b) link(a, b);
  }

  std::vector<int> disc(count, -1), low(count, 0), parent_edge(count, -1);
  std::vector<std::size_t> next(count, 0);
  std::vector<int> stack{S}, edges;
  std::vector<char> transit(count, 0);
  int timer = 0;
  disc[S] = low[S] = timer++;
  while (!stack.empty()) {
    const int v = stack.back();
    if (next[v] < adj[v].size()) {
      const auto [w, id] = adj[v][next[v]++];
      if (id == parent_edge[v]) continue;
      if (disc[w] < 0) {
        edges.push_back(id);
        parent_edge[w] = id;
        disc[w] = low[w] = timer++;
        stack.push_back(w);
      } else if (disc[w] < disc[v]) {
        edges.push_back(id);
        low[v] = std::min(low[v], disc[w]);
      }
      continue;
    }
    stack.pop_back();
    if (stack.empty()) break;
    const int u = stack.back();
    low[u] = std::min(low[u], low[v]);
    if (low[v] < disc[u]) continue;
    // edges above parent_edge[v] form one block
    std::vector<int> block;
    bool has_virtual = false;
    while (true) {
      const int id = edges.back();
      edges.pop_back();
      block.push_back(id);
      has_virtual = has_virtual || id == 0;
      if (id == parent_edge[v]) break;
    }
    if (has_virtual) {
      for (int id : block) transit[ends[id].first] = transit[ends[id].second] = 1;
    }
  }

  // spread anchors outward from the transit block
  std::vector<std::vector<int>> nbr(n);
  for (const auto& e : net.edges()) {
    nbr[e.i].push_back(e.j);
    nbr[e.j].push_back(e.i);
  }
  std::vector<int> anchor(n, -1);
  std::vector<char> seen(n, 0);
  std::vector<int> queue;
  for (int v = 0; v < n; ++v) {
    if (node[v] >= 0 && transit[node[v]]) {
      seen[v] = 1;
      queue.push_back(v);
    }
  }
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const int v = queue[h];
    for (int w : nbr[v]) {
      if (seen[w] || !live[w]) continue;
      seen[w] = 1;
      anchor[w] = anchor[v] >= 0 ? anchor[v] : v;
      queue.push_back(w);
    }
  }
  return anchor;
}

struct Problem {
  std::vector<int> free_index;  // vertex -> free slot, -1 if fixed, idle or pendant
  std::vector<int> free_vertex;
  std::vector<double> u;        // full potential
  std::vector<int> anchor;      // see pendant_anchor

  bool active(const NetEdge& e) const { return anchor[e.i] < 0 && anchor[e.j] < 0; }

  void fill_pendants(std::vector<double>& x) const {
    for (std::size_t v = 0; v < x.size(); ++v) {
      if (anchor[v] >= 0) x[v] = x[anchor[v]];
    }
  }
};

inline Problem setup(const DiscreteNetwork& net, const BoundaryCondition& bc) {
  const std::size_t n = net.vertex_count();
  bc.validate(n);
  const auto from_inner = reach(net, bc.inner);
  if (!std::any_of(bc.outer.begin(), bc.outer.end(), [&](int v) { return from_inner[v]; })) {
    throw InfeasibleError("inner and outer boundary sets are disconnected");
  }
  Problem pr;
  pr.u.assign(n, 0.0);
  std::vector<char> fixed(n, 0);
  for (int v : bc.inner) {
    pr.u[v] = 1.0;
    fixed[v] = 1;
  }
  for (int v : bc.outer) fixed[v] = 1;
  // free vertices cut off from every boundary vertex carry no energy
  std::vector<int> all_fixed(bc.inner);
  all_fixed.insert(all_fixed.end(), bc.outer.begin(), bc.outer.end());
  const auto live = reach(net, all_fixed);
  pr.anchor = pendant_anchor(net, bc, live);
  pr.free_index.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (!fixed[v] && live[v] && pr.anchor[v] < 0) {
      pr.free_index[v] = static_cast<int>(pr.free_vertex.size());
      pr.free_vertex.push_back(static_cast<int>(v));
    }
  }
  return pr;
}

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Assembles sum_e k_e (e_i - e_j)(e_i - e_j)^T restricted to free slots, and
// the right-hand side of the fixed-value coupling.
template <typename K>
void assemble(const DiscreteNetwork& net, const Problem& pr, K&& k_of_edge, SpMat& A, Vec* rhs) {
  std::vector<Eigen::Triplet<double>> trip;
  const int m = static_cast<int>(pr.free_vertex.size());
  if (rhs) rhs->setZero(m);
  std::size_t idx = 0;
  for (const auto& e : net.edges()) {
    const double k = k_of_edge(idx++, e);
    const int a = pr.free_index[e.i], b = pr.free_index[e.j];
    if (a >= 0) trip.emplace_back(a, a, k);
    if (b >= 0) trip.emplace_back(b, b, k);
    if (a >= 0 && b >= 0) {
      trip.emplace_back(a, b, -k);
      trip.emplace_back(b, a, -k);
    } else if (rhs) {
      if (a >= 0) (*rhs)[a] += k * pr.u[e.j];
      if (b >= 0) (*rhs)[b] += k * pr.u[e.i];
    }
  }
  A.resize(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
}

inline void harmonic(const DiscreteNetwork& net, Problem& pr, const std::vector<double>& cond) {
  if (pr.free_vertex.empty()) return;
  SpMat A;
  Vec rhs;
  assemble(net, pr, [&](std::size_t i, const NetEdge&) { return cond[i]; }, A, &rhs);
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("linear solve failed", INFINITY);
  const Vec x = ldlt.solve(rhs);
  for (std::size_t s = 0; s < pr.free_vertex.size(); ++s) pr.u[pr.free_vertex[s]] = x[s];
}

inline void clamp_unit(std::vector<double>& u) {
  for (double& x : u) x = std::clamp(x, 0.0, 1.0);
}

inline SolveReport solve_p1(const DiscreteNetwork& net, const BoundaryCondition& bc) {
  const int n = static_cast<int>(net.vertex_count());
  const int s = n, t = n + 1;
  MaxFlow mf(n + 2);
  for (const auto& e : net.edges()) mf.add_undirected(e.i, e.j, e.mass / e.length);
  const double inf = std::numeric_limits<double>::infinity();
  for (int v : bc.inner) mf.add_directed(s, v, inf);
  for (int v : bc.outer) mf.add_directed(v, t, inf);
  const double flow = mf.run(s, t);
  const auto side = mf.source_side(s);
  SolveReport rep;
  rep.potential.assign(n, 0.0);
  for (int v = 0; v < n; ++v) rep.potential[v] = side[v] ? 1.0 : 0.0;
  for (int v : bc.inner) rep.potential[v] = 1.0;
  for (int v : bc.outer) rep.potential[v] = 0.0;
  rep.energy = energy_of(net, rep.potential, 1.0);
  rep.iterations = 1;
  rep.kkt_residual = flow > 0.0 ? std::abs(rep.energy - flow) / flow : 0.0;  // duality gap
  rep.energy_history.push_back(rep.energy);
  return rep;
}

}  // namespace detail

/// Minimizes the discrete p-energy with u = 1 on bc.inner and u = 0 on
/// bc.outer. p = 2: one linear solve. p > 1: damped Newton from the harmonic
/// potential. p = 1: max-flow / min-cut.
inline SolveReport solve_p_energy(const DiscreteNetwork& net, const BoundaryCondition& bc, double p,
                                  const SolveOptions& opt = {}) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("solve_p_energy needs p >= 1");
  if (!(opt.tol > 0.0)) throw DomainError("solve_p_energy needs tol > 0");
  detail::Problem pr = detail::setup(net, bc);
  if (p == 1.0) return detail::solve_p1(net, bc);

  const auto& edges = net.edges();
  const std::size_t ne = edges.size();
  std::vector<double> cond(ne);  // mass / length^p
  for (std::size_t i = 0; i < ne; ++i) {
    cond[i] = pr.active(edges[i]) ? edges[i].mass / std::pow(edges[i].length, p) : 0.0;
  }

  SolveReport rep;
  detail::harmonic(net, pr, cond);
  pr.fill_pendants(pr.u);
  if (p == 2.0 || pr.free_vertex.empty()) {
    detail::clamp_unit(pr.u);
    rep.potential = pr.u;
    rep.energy = energy_of(net, rep.potential, p);
    rep.iterations = 1;
    rep.energy_history.push_back(rep.energy);
  }

  // edges between two fixed vertices add a constant, kept apart so that it
  // cannot swamp the varying part
  std::vector<char> varies(ne);
  double fixed_part = 0.0;
  for (std::size_t i = 0; i < ne; ++i) {
    varies[i] = pr.free_index[edges[i].i] >= 0 || pr.free_index[edges[i].j] >= 0;
    if (!varies[i]) fixed_part += cond[i] * std::pow(std::abs(pr.u[edges[i].i] - pr.u[edges[i].j]), p);
  }
  auto energy = [&](const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < ne; ++i) {
      if (varies[i]) s += cond[i] * std::pow(std::abs(u[edges[i].i] - u[edges[i].j]), p);
    }
    return s;
  };
  const int m = static_cast<int>(pr.free_vertex.size());
  detail::Vec grad(m);
  std::vector<double> flux(m);
  // gradient over free slots, plus per-vertex sums of |edge flux|
  auto gradient = [&](const std::vector<double>& u) {
    grad.setZero();
    std::fill(flux.begin(), flux.end(), 0.0);
    for (std::size_t i = 0; i < ne; ++i) {
      const double d = u[edges[i].i] - u[edges[i].j];
      const double ad = std::abs(d);
      const double g = p * cond[i] * std::pow(ad, p - 1.0) * (d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0);
      const int a = pr.free_index[edges[i].i], b = pr.free_index[edges[i].j];
      if (a >= 0) {
        grad[a] += g;
        flux[a] += std::abs(g);
      }
      if (b >= 0) {
        grad[b] -= g;
        flux[b] += std::abs(g);
      }
    }
  };
  auto kkt = [&]() {
    const double scale = m > 0 ? *std::max_element(flux.begin(), flux.end()) : 0.0;
    return scale > 0.0 ? grad.cwiseAbs().maxCoeff() / scale : 0.0;
  };

  if (p == 2.0 || m == 0) {
    if (m > 0) {
      gradient(rep.potential);
      rep.kkt_residual = kkt();
    }
    return rep;
  }

  std::vector<double> u = pr.u;
  detail::clamp_unit(u);
  double F = energy(u);
  rep.energy_history.push_back(F + fixed_part);
  const double eps = opt.hessian_eps;
  detail::SpMat H;
  Eigen::SimplicialLDLT<detail::SpMat> ldlt;
  bool pattern_ready = false;
  std::vector<double> trial(u.size());
  int it = 0;
  double rel_drop = INFINITY;
  // progress marks: a stretch with neither the residual halving nor the
  // energy moving past roundoff means the floating-point floor is reached
  double res_mark = INFINITY, F_mark = F;
  int since_progress = 0;
  for (; it < opt.max_iter; ++it) {
    gradient(u);
    const double res = kkt();
    if (res < opt.tol && rel_drop < opt.tol) break;
    if (res < 1e-3 * opt.tol) break;
    if (res < 0.5 * res_mark || F < F_mark * (1.0 - 1e-13)) {
      res_mark = std::min(res, res_mark);
      F_mark = F;
      since_progress = 0;
    } else if (++since_progress > kStallWindow) {
      break;
    }
    detail::assemble(
        net, pr,
        [&](std::size_t i, const NetEdge& e) {
          const double d = std::abs(u[e.i] - u[e.j]);
          const double phi = p < 2.0 ? std::pow(d * d + eps * eps, 0.5 * (p - 2.0))
                                     : std::pow(d, p - 2.0) + eps;
          return p * (p - 1.0) * cond[i] * phi;
        },
        H, nullptr);
    if (!pattern_ready) {
      ldlt.analyzePattern(H);
      pattern_ready = true;
    }
    ldlt.factorize(H);
    detail::Vec dir;
    bool newton = ldlt.info() == Eigen::Success;
    if (newton) {
      dir = -ldlt.solve(grad);
      newton = dir.allFinite() && dir.dot(grad) < 0.0;
    }
    if (!newton) {
      // Jacobi-scaled gradient step
      dir = -grad.cwiseQuotient(H.diagonal().cwiseMax(1e-300));
    }
    const double slope = dir.dot(grad);
    if (!(slope < 0.0)) break;
    // The energy is convex along the ray, so its directional derivative is
    // monotone: bracket the minimizer by sign and bisect. A nonpositive
    // derivative certifies descent over the whole step, and the sign stays
    // reliable long after energy differences drown in roundoff.
    auto derivative = [&](double t) {
      trial = u;
      for (int s = 0; s < m; ++s) trial[pr.free_vertex[s]] += t * dir[s];
      gradient(trial);
      return grad.dot(dir);
    };
    double lo = 0.0, hi = INFINITY, t = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      const double d = derivative(t);
      if (d <= 0.0) {
        lo = t;
        if (d >= 0.1 * slope) break;
      } else {
        hi = t;
      }
      t = std::isinf(hi) ? 2.0 * t : 0.5 * (lo + hi);
    }
    if (lo == 0.0) break;  // no representable decrease left
    if (t != lo) derivative(lo);
    if (trial == u) break;
    const double Fn = energy(trial);
    rel_drop = (F - Fn) / std::max(F, 1e-300);
    u.swap(trial);
    F = Fn;
    rep.energy_history.push_back(F + fixed_part);
  }
  rep.iterations = it;
  if (it >= opt.max_iter) {
    detail::clamp_unit(u);
    throw ConvergenceError("solve_p_energy: iteration cap reached", energy_of(net, u, p));
  }
  pr.fill_pendants(u);
  detail::clamp_unit(u);
  rep.potential = u;
  rep.energy = energy_of(net, u, p);
  gradient(u);
  rep.kkt_residual = kkt();
  return rep;
}

/// (sum_e c_e^(1/(1-p)))^(1-p) with c_e = mass/length^p: exact energy of a
/// series path between the plates.
inline double path_energy(const std::vector<NetEdge>& chain, double p) {
  if (p == 1.0) {
    double best = INFINITY;
    for (const auto& e : chain) best = std::min(best, e.mass / e.length);
    return best;
  }
  double s = 0.0;
  for (const auto& e : chain) s += std::pow(e.mass / std::pow(e.length, p), 1.0 / (1.0 - p));
  return std::pow(s, 1.0 - p);
}

}  // namespace anncap
