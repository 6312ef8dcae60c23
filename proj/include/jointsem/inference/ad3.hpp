#pragma once

#include <optional>
#include <span>
#include <vector>

#include "jointsem/inference/factor_graph.hpp"

namespace jointsem {

struct Ad3Options {
  int max_iterations = 1000;
  /// Stop when primal and dual residuals both fall below this.
  double tolerance = 1e-6;
  /// Initial penalty; doubled or halved to balance the residuals when adaptive.
  double eta = 0.05;
  bool adapt_eta = true;
  /// A rounded assignment within this of the dual bound is certified optimal.
  double gap_tolerance = 1e-6;
  /// Branch on fractional variables until certified or out of budget.
  bool branch_and_bound = true;
  int max_branch_depth = 40;
  int max_branch_nodes = 200;
};

enum class SolveStatus {
  /// Certified optimal: objective within gap_tolerance of a dual bound.
  Exact,
  /// Best feasible assignment found after rounding and repair; not certified.
  Rounded,
};

struct SolveResult {
  std::vector<char> assignment;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Rounded;
  /// AD3 iterations summed over all branch-and-bound nodes.
  int iterations = 0;
  int nodes = 1;
  /// Best dual bound of the root relaxation.
  double dual = 0.0;
  /// Root relaxation marginals.
  std::vector<double> posteriors;
  /// Best-so-far dual value after each root iteration.
  std::vector<double> dual_trace;
};

/// MAP inference by alternating directions dual decomposition on the LP
/// relaxation, with local quadratic subproblems solved in closed form
/// (Xor, AtMostOne, Implication, Pair) or by an active-set method over a MAP
/// oracle (SemiMarkov). Fractional or uncertified solutions are refined by
/// branch and bound; when the budget runs out the best rounded and repaired
/// assignment is returned with status Rounded. Connected components are solved
/// independently; the result is Exact only if every component is. Throws
/// std::runtime_error if no feasible assignment is found.
SolveResult ad3_solve(const FactorGraph& graph, const Ad3Options& options = {});

/// Threshold at 0.5 (clamps win), then repair: argmax frame, semi-Markov
/// rerun over arguments of the chosen frame, argmax label per active arc,
/// determinism and top repair, heads implied by arcs. Returns nullopt when the
/// result is still infeasible.
std::optional<std::vector<char>> round_and_repair(const FactorGraph& graph,
                                                  std::span<const double> marginals);

// Local subproblems, exposed for testing.

/// Euclidean projection onto the probability simplex, in place.
void project_onto_simplex(std::span<double> values);

struct PairMarginals {
  double first;
  double second;
  double both;
};
/// argmin ½(q1−a1)² + ½(q2−a2)² − c·q12 over the marginal polytope of two
/// binary variables.
PairMarginals solve_pair_qp(double a1, double a2, double c);

}  // namespace jointsem
