#include "jointsem/core/cost.hpp"

#include <algorithm>
#include <iterator>

namespace jointsem {

double weighted_hamming(std::span<const int> predicted, std::span<const int> gold,
                        const CostConfig& cost) {
  std::vector<int> p(predicted.begin(), predicted.end());
  std::vector<int> g(gold.begin(), gold.end());
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());

  std::vector<int> extra, missing;
  std::set_difference(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(extra));
  std::set_difference(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(missing));
  return cost.false_positive_cost * static_cast<double>(extra.size()) +
         cost.false_negative_cost * static_cast<double>(missing.size());
}

}  // namespace jointsem
