#include "jointsem/inference/brute_force.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace jointsem {

namespace {

class Search {
 public:
  explicit Search(const FactorGraph& g) : g_(g), n_(g.num_variables()) {
    // A factor is checked once its last variable (in search order) is set.
    closing_.resize(n_);
    for (const Factor& f : g.factors) {
      if (f.kind == FactorKind::Pair) continue;
      int last = *std::max_element(f.variables.begin(), f.variables.end());
      closing_[last].push_back(&f);
    }
    // Optimistic remainder: positive unary and Pair scores still undecided.
    std::vector<double> gain(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      if (g.clamp[i] == 1) gain[i] = g.unary[i];
      else if (g.clamp[i] < 0) gain[i] = std::max(0.0, g.unary[i]);
    }
    for (const Factor& f : g.factors) {
      if (f.kind != FactorKind::Pair || f.score <= 0.0) continue;
      gain[std::max(f.variables[0], f.variables[1])] += f.score;
    }
    suffix_.assign(n_ + 1, 0.0);
    for (int i = n_ - 1; i >= 0; --i) suffix_[i] = suffix_[i + 1] + gain[i];
    pairs_at_.resize(n_);
    for (const Factor& f : g.factors) {
      if (f.kind == FactorKind::Pair) pairs_at_[std::max(f.variables[0], f.variables[1])].push_back(&f);
    }
    x_.assign(n_, 0);
  }

  BruteForceResult run() {
    visit(0, g_.constant, 0);
    if (!found_) throw std::runtime_error("brute_force_map: no feasible assignment");
    return {best_x_, best_};
  }

 private:
  void visit(int i, double value, int active) {
    if (found_ && value + suffix_[i] < best_ - 1e-12) return;
    if (i == n_) {
      offer(value, active);
      return;
    }
    const int lo = g_.clamp[i] == 1 ? 1 : 0;
    const int hi = g_.clamp[i] == 0 ? 0 : 1;
    for (int v = hi; v >= lo; --v) {
      x_[i] = static_cast<char>(v);
      bool ok = true;
      for (const Factor* f : closing_[i]) {
        if (!g_.satisfies(*f, x_)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      double next = value;
      if (v) {
        next += g_.unary[i];
        for (const Factor* f : pairs_at_[i]) {
          if (x_[f->variables[0]] && x_[f->variables[1]]) next += f->score;
        }
      }
      visit(i + 1, next, active + v);
    }
    x_[i] = 0;
  }

  void offer(double value, int active) {
    bool better = !found_ || value > best_ + 1e-12;
    if (!better && value >= best_ - 1e-12) {
      if (active != best_active_) {
        better = active < best_active_;
      } else {
        // Smaller first differing index wins.
        for (int i = 0; i < n_; ++i) {
          if (x_[i] != best_x_[i]) {
            better = x_[i] > best_x_[i];
            break;
          }
        }
      }
    }
    if (!better) return;
    found_ = true;
    best_ = value;
    best_active_ = active;
    best_x_ = x_;
  }

  const FactorGraph& g_;
  const int n_;
  std::vector<std::vector<const Factor*>> closing_;
  std::vector<std::vector<const Factor*>> pairs_at_;
  std::vector<double> suffix_;
  std::vector<char> x_;
  bool found_ = false;
  double best_ = 0.0;
  int best_active_ = 0;
  std::vector<char> best_x_;
};

}  // namespace

BruteForceResult brute_force_map(const FactorGraph& graph, int max_free) {
  int free = static_cast<int>(std::count(graph.clamp.begin(), graph.clamp.end(), -1));
  if (free > max_free) {
    throw std::invalid_argument("brute_force_map: " + std::to_string(free) +
                                " free variables exceeds the limit of " + std::to_string(max_free));
  }
  return Search(graph).run();
}

}  // namespace jointsem
