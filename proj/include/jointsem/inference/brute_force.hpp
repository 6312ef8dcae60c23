#pragma once

#include <vector>

#include "jointsem/inference/factor_graph.hpp"

namespace jointsem {

struct BruteForceResult {
  std::vector<char> assignment;
  double objective = 0.0;
};

/// Exact MAP by exhaustive depth-first search over free variables, pruning
/// partial assignments that already violate a factor or cannot beat the
/// incumbent. Ties prefer fewer active variables, then the lexicographically
/// smallest active index set.
///
/// Throws std::invalid_argument with more than max_free free variables and
/// std::runtime_error when no feasible assignment exists.
BruteForceResult brute_force_map(const FactorGraph& graph, int max_free = 24);

}  // namespace jointsem
