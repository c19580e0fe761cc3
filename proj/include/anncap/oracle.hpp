#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "anncap/capacity.hpp"
#include "anncap/network.hpp"
#include "anncap/solver.hpp"

namespace anncap {

struct OracleRun {
  double capacity = 0.0;
  double seconds = 0.0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  int iterations = 0;
  double kkt_residual = 0.0;
};

inline OracleRun run_oracle(const DiscreteNetwork& net, const BoundaryCondition& bc, double p,
                            const SolveOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport rep = solve_p_energy(net, bc, p, opt);
  const auto t1 = std::chrono::steady_clock::now();
  OracleRun run;
  run.capacity = rep.energy;
  run.seconds = std::chrono::duration<double>(t1 - t0).count();
  run.vertices = net.vertex_count();
  run.edges = net.edge_count();
  run.iterations = rep.iterations;
  run.kkt_residual = rep.kkt_residual;
  return run;
}

/// N-cell path across the annulus of a radial space.
inline OracleRun radial_oracle(const SpaceSpec& space, double p, const AnnulusSpec& ann, int N = 2000,
                               Grading grading = Grading::Uniform, const SolveOptions& opt = {}) {
  const DiscreteNetwork net = build_radial_network(space, ann.r, ann.R, N, grading);
  return run_oracle(net, boundary_by_radius(net, ann.r, ann.R), p, opt);
}

inline OracleRun snake_oracle(double p, const AnnulusSpec& ann, double cells_per_unit = 64.0, int k_max = 10,
                              const SolveOptions& opt = {}) {
  const DiscreteNetwork net = build_snake_network(k_max, cells_per_unit, {ann.r, ann.R});
  return run_oracle(net, boundary_by_radius(net, ann.r, ann.R), p, opt);
}

/// Planar bow-tie grid about the tip; everything at distance >= R is grounded.
inline OracleRun bowtie_oracle(double alpha, double p, const AnnulusSpec& ann, double h,
                               const SolveOptions& opt = {}) {
  const DiscreteNetwork net = build_bowtie_grid(alpha, h, ann.R);
  return run_oracle(net, boundary_by_radius(net, ann.r, ann.R), p, opt);
}

struct OracleComparison {
  double formula = 0.0;
  OracleRun discrete;
  double rel_error = 0.0;
};

inline OracleComparison compare_with_formula(double formula, const OracleRun& run) {
  OracleComparison c;
  c.formula = formula;
  c.discrete = run;
  c.rel_error = std::abs(run.capacity - formula) / std::max(std::abs(formula), 1e-300);
  return c;
}

}  // namespace anncap
