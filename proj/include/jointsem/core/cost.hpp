#pragma once

#include <span>
#include <vector>

namespace jointsem {

/// Per-part costs of the weighted Hamming distance. Defaults favour recall.
struct CostConfig {
  double false_positive_cost = 0.4;
  double false_negative_cost = 0.6;
};

/// fp·|predicted \ gold| + fn·|gold \ predicted| over part index sets.
/// Inputs need not be sorted; duplicates are ignored.
double weighted_hamming(std::span<const int> predicted, std::span<const int> gold,
                        const CostConfig& cost = {});

}  // namespace jointsem
