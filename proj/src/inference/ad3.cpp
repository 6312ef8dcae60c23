#include "jointsem/inference/ad3.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "jointsem/inference/semi_markov.hpp"

namespace jointsem {

void project_onto_simplex(std::span<double> v) {
  const std::size_t d = v.size();
  if (d == 0) return;
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    cumulative += sorted[k];
    double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}

namespace {

PairMarginals pair_nonnegative(double a1, double a2, double c) {
  double q1, q2;
  if (a1 - a2 > c) {
    q1 = a1;
    q2 = a2 + c;
  } else if (a2 - a1 > c) {
    q1 = a1 + c;
    q2 = a2;
  } else {
    q1 = q2 = 0.5 * (a1 + a2 + c);
  }
  q1 = std::clamp(q1, 0.0, 1.0);
  q2 = std::clamp(q2, 0.0, 1.0);
  return {q1, q2, std::min(q1, q2)};
}

}  // namespace

PairMarginals solve_pair_qp(double a1, double a2, double c) {
  if (c >= 0.0) return pair_nonnegative(a1, a2, c);
  // Substitute q2' = 1 − q2: the joint of (x1, ¬x2) is q1 − q12, which turns
  // a negative interaction into a positive one.
  PairMarginals flipped = pair_nonnegative(a1 + c, 1.0 - a2, -c);
  return {flipped.first, 1.0 - flipped.second, flipped.first - flipped.both};
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// MAP of one factor given per-link scores. Fills `config` with 0/1 per link
// and returns the value (including the Pair score when both are on).
double factor_map(const Factor& f, std::span<const double> w, std::vector<char>& config) {
  const std::size_t d = f.variables.size();
  config.assign(d, 0);
  switch (f.kind) {
    case FactorKind::Xor:
    case FactorKind::AtMostOne: {
      double base = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        if (f.is_negated(k)) {
          base += w[k];
          config[k] = 1;
        }
      }
      std::size_t best = d;
      double best_gain = f.kind == FactorKind::AtMostOne ? 0.0 : kNegInf;
      for (std::size_t k = 0; k < d; ++k) {
        double gain = f.is_negated(k) ? -w[k] : w[k];
        if (gain > best_gain) {
          best_gain = gain;
          best = k;
        }
      }
      if (best == d) return base;
      config[best] = f.is_negated(best) ? 0 : 1;
      return base + best_gain;
    }
    case FactorKind::Implication: {
      double both = w[0] + w[1];
      double value = 0.0;
      if (w[1] > value) value = w[1], config = {0, 1};
      if (both > value) value = both, config = {1, 1};
      return value;
    }
    case FactorKind::Pair: {
      double value = 0.0;
      if (w[0] > value) value = w[0], config = {1, 0};
      if (w[1] > value) value = w[1], config = {0, 1};
      double both = w[0] + w[1] + f.score;
      if (both > value) value = both, config = {1, 1};
      return value;
    }
    case FactorKind::SemiMarkov: {
      std::vector<Segment> segments(d);
      for (std::size_t k = 0; k < d; ++k) segments[k] = {f.spans[k].first, f.spans[k].second, w[k]};
      auto best = semi_markov_map(segments, f.length);
      for (int k : best.selected) config[k] = 1;
      return best.value;
    }
  }
  return 0.0;
}

// Configurations of a SemiMarkov factor kept between AD3 iterations.
struct ActiveSet {
  std::vector<std::vector<int>> configs;
  std::vector<double> weights;
};

int overlap(const std::vector<int>& a, const std::vector<int>& b) {
  int count = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count, ++i, ++j;
    }
  }
  return count;
}

// min ½‖Σ_s α_s m_s − a‖² over the simplex, by a primal active-set method
// whose pricing step calls the factor's MAP oracle.
void solve_generic_qp(const Factor& f, std::span<const double> a, ActiveSet& set,
                      std::span<double> q) {
  const std::size_t d = f.variables.size();
  std::vector<char> config;
  auto to_indices = [](const std::vector<char>& c) {
    std::vector<int> idx;
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
      if (c[k]) idx.push_back(k);
    }
    return idx;
  };
  if (set.configs.empty()) {
    factor_map(f, a, config);
    set.configs.push_back(to_indices(config));
    set.weights.assign(1, 1.0);
  }

  auto mix = [&](std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t s = 0; s < set.configs.size(); ++s) {
      for (int k : set.configs[s]) out[k] += set.weights[s];
    }
  };

  constexpr int kMaxSteps = 30;
  std::vector<double> residual(d);
  for (int step = 0; step < kMaxSteps; ++step) {
    // Equality-constrained optimum over the active set, with the simplex
    // constraint eliminated through α_0 = 1 − Σ_{j>0} α_j: the normal matrix of
    // the differences m_j − m_0 is positive definite iff the configurations are
    // affinely independent.
    const int m = static_cast<int>(set.configs.size());
    const auto& base = set.configs[0];
    const int base_size = static_cast<int>(base.size());
    double base_a = 0.0;
    for (int k : base) base_a += a[k];
    std::vector<int> with_base(m);
    std::vector<double> dot_a(m);
    for (int s = 0; s < m; ++s) {
      with_base[s] = overlap(set.configs[s], base);
      dot_a[s] = 0.0;
      for (int k : set.configs[s]) dot_a[s] += a[k];
    }
    Eigen::VectorXd target(m);
    target(0) = 1.0;
    if (m > 1) {
      Eigen::MatrixXd normal(m - 1, m - 1);
      Eigen::VectorXd rhs(m - 1);
      for (int i = 1; i < m; ++i) {
        rhs(i - 1) = dot_a[i] - base_a - with_base[i] + base_size;
        for (int j = i; j < m; ++j) {
          double g = overlap(set.configs[i], set.configs[j]) - with_base[i] - with_base[j] + base_size;
          normal(i - 1, j - 1) = normal(j - 1, i - 1) = g;
        }
      }
      Eigen::LLT<Eigen::MatrixXd> llt(normal);
      if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() < 1e-6) {
        // The last inserted configuration is affinely dependent on the others.
        if (set.weights.back() == 0.0) {
          set.configs.pop_back();
          set.weights.pop_back();
        }
        break;
      }
      Eigen::VectorXd beta = llt.solve(rhs);
      target.tail(m - 1) = beta;
      target(0) = 1.0 - beta.sum();
    }
    Eigen::VectorXd solution(m + 1);
    solution.tail(m) = target;

    double change = 0.0;
    for (int s = 0; s < m; ++s) change = std::max(change, std::abs(solution(s + 1) - set.weights[s]));

    if (change < 1e-12) {
      mix(residual);
      for (std::size_t k = 0; k < d; ++k) residual[k] = a[k] - residual[k];
      // Multiplier of the simplex constraint: m_sᵀ r is equal over the active set.
      double tau = 0.0;
      for (int k : base) tau += residual[k];
      double value = factor_map(f, residual, config);
      if (value <= tau + 1e-12) break;
      auto candidate = to_indices(config);
      if (std::find(set.configs.begin(), set.configs.end(), candidate) != set.configs.end()) break;
      set.configs.push_back(std::move(candidate));
      set.weights.push_back(0.0);
      continue;
    }

    // Move towards the equality-constrained optimum until a weight hits zero.
    double t = 1.0;
    int blocking = -1;
    for (int s = 0; s < m; ++s) {
      double target = solution(s + 1);
      if (target < 0.0 && target < set.weights[s]) {
        double ts = set.weights[s] / (set.weights[s] - target);
        if (ts < t) {
          t = ts;
          blocking = s;
        }
      }
    }
    for (int s = 0; s < m; ++s) set.weights[s] += t * (solution(s + 1) - set.weights[s]);
    if (blocking >= 0) {
      set.configs.erase(set.configs.begin() + blocking);
      set.weights.erase(set.weights.begin() + blocking);
    }
  }
  for (double& w : set.weights) w = std::max(w, 0.0);
  mix(q);
}

void solve_local_qp(const Factor& f, std::span<const double> a, double eta, ActiveSet& set,
                    std::span<double> q, double& q_both) {
  const std::size_t d = f.variables.size();
  switch (f.kind) {
    case FactorKind::Xor:
    case FactorKind::AtMostOne: {
      for (std::size_t k = 0; k < d; ++k) q[k] = f.is_negated(k) ? 1.0 - a[k] : a[k];
      bool done = false;
      if (f.kind == FactorKind::AtMostOne) {
        double total = 0.0;
        for (std::size_t k = 0; k < d; ++k) total += std::clamp(q[k], 0.0, 1.0);
        if (total <= 1.0) {
          for (std::size_t k = 0; k < d; ++k) q[k] = std::clamp(q[k], 0.0, 1.0);
          done = true;
        }
      }
      if (!done) project_onto_simplex(q);
      for (std::size_t k = 0; k < d; ++k) {
        if (f.is_negated(k)) q[k] = 1.0 - q[k];
      }
      break;
    }
    case FactorKind::Implication: {
      double x = a[0], y = a[1];
      if (x > y) x = y = 0.5 * (x + y);
      q[0] = std::clamp(x, 0.0, 1.0);
      q[1] = std::clamp(y, 0.0, 1.0);
      break;
    }
    case FactorKind::Pair: {
      auto m = solve_pair_qp(a[0], a[1], f.score / eta);
      q[0] = m.first;
      q[1] = m.second;
      q_both = m.both;
      break;
    }
    case FactorKind::SemiMarkov:
      solve_generic_qp(f, a, set, q);
      break;
  }
}

struct RelaxationResult {
  std::vector<double> u;
  double dual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> trace;
};

// AD3 state; copyable so branch-and-bound children can warm start.
class Relaxation {
 public:
  Relaxation(const FactorGraph& g, const Ad3Options& opt) : g_(&g), opt_(opt), eta_(opt.eta) {
    const int n = g.num_variables();
    degree_.assign(n, 0);
    offset_.resize(g.factors.size() + 1, 0);
    for (std::size_t f = 0; f < g.factors.size(); ++f) {
      offset_[f + 1] = offset_[f] + static_cast<int>(g.factors[f].variables.size());
      for (int v : g.factors[f].variables) ++degree_[v];
    }
    lambda_.assign(offset_.back(), 0.0);
    q_.assign(offset_.back(), 0.5);
    active_.resize(g.factors.size());
    clamp_ = g.clamp;
    u_.assign(n, 0.5);
    for (int i = 0; i < n; ++i) {
      if (clamp_[i] >= 0) u_[i] = clamp_[i];
    }
  }

  void set_clamp(int var, int value) {
    clamp_[var] = static_cast<signed char>(value);
    u_[var] = value;
  }
  const std::vector<signed char>& clamps() const { return clamp_; }

  RelaxationResult run(bool trace) {
    const FactorGraph& g = *g_;
    const int n = g.num_variables();
    const int links = offset_.back();
    RelaxationResult result;
    std::vector<double> a, q_local;
    std::vector<double> u_new(n);
    std::vector<char> rounded(n), config;

    for (int it = 0; it < opt_.max_iterations; ++it) {
      result.iterations = it + 1;
      for (std::size_t f = 0; f < g.factors.size(); ++f) {
        const Factor& factor = g.factors[f];
        const int off = offset_[f];
        const std::size_t d = factor.variables.size();
        a.resize(d);
        for (std::size_t k = 0; k < d; ++k) {
          int v = factor.variables[k];
          a[k] = u_[v] + (g.unary[v] / degree_[v] + lambda_[off + k]) / eta_;
        }
        double both = 0.0;
        solve_local_qp(factor, a, eta_, active_[f], std::span<double>(q_.data() + off, d), both);
      }

      std::fill(u_new.begin(), u_new.end(), 0.0);
      for (std::size_t f = 0; f < g.factors.size(); ++f) {
        const auto& vars = g.factors[f].variables;
        for (std::size_t k = 0; k < vars.size(); ++k) u_new[vars[k]] += q_[offset_[f] + k];
      }
      double dual_res = 0.0;
      for (int i = 0; i < n; ++i) {
        if (clamp_[i] >= 0) {
          u_new[i] = clamp_[i];
        } else if (degree_[i] == 0) {
          u_new[i] = g.unary[i] > 0.0 ? 1.0 : 0.0;
        } else {
          u_new[i] /= degree_[i];
        }
        double diff = u_new[i] - u_[i];
        dual_res += degree_[i] * diff * diff;
      }
      double primal_res = 0.0;
      for (std::size_t f = 0; f < g.factors.size(); ++f) {
        const auto& vars = g.factors[f].variables;
        for (std::size_t k = 0; k < vars.size(); ++k) {
          double diff = q_[offset_[f] + k] - u_new[vars[k]];
          primal_res += diff * diff;
          lambda_[offset_[f] + k] -= eta_ * diff;
        }
      }
      u_.swap(u_new);
      if (links > 0) {
        primal_res = std::sqrt(primal_res / links);
        dual_res = eta_ * std::sqrt(dual_res / links);
      }

      const bool converged = primal_res < opt_.tolerance && dual_res < opt_.tolerance;
      const bool check = it % 10 == 9;
      if (trace || check || converged || it + 1 == opt_.max_iterations) {
        result.dual = std::min(result.dual, dual_value(config));
      }
      if (trace) result.trace.push_back(result.dual);
      if (converged) break;
      if (check) {
        for (int i = 0; i < n; ++i) rounded[i] = u_[i] >= 0.5;
        if (g.feasible(rounded) && g.objective(rounded) >= result.dual - opt_.gap_tolerance) break;
        if (opt_.adapt_eta) {
          if (primal_res > 10.0 * dual_res) {
            eta_ *= 2.0;
          } else if (dual_res > 10.0 * primal_res) {
            eta_ /= 2.0;
          }
        }
      }
    }
    result.u = u_;
    return result;
  }

 private:
  // Lagrangian dual g(λ): an upper bound on the relaxation (and on every
  // feasible assignment respecting the clamps) for any λ.
  double dual_value(std::vector<char>& config) const {
    const FactorGraph& g = *g_;
    double value = g.constant;
    std::vector<double> w;
    std::vector<double> multiplier_sum(g.num_variables(), 0.0);
    for (std::size_t f = 0; f < g.factors.size(); ++f) {
      const Factor& factor = g.factors[f];
      w.resize(factor.variables.size());
      for (std::size_t k = 0; k < factor.variables.size(); ++k) {
        int v = factor.variables[k];
        w[k] = g.unary[v] / degree_[v] + lambda_[offset_[f] + k];
        multiplier_sum[v] += lambda_[offset_[f] + k];
      }
      value += factor_map(factor, w, config);
    }
    for (int i = 0; i < g.num_variables(); ++i) {
      double coefficient = degree_[i] == 0 ? g.unary[i] : -multiplier_sum[i];
      if (clamp_[i] >= 0) {
        value += coefficient * clamp_[i];
      } else {
        value += std::max(0.0, coefficient);
      }
    }
    return value;
  }

  const FactorGraph* g_;
  Ad3Options opt_;
  double eta_;
  std::vector<int> degree_;
  std::vector<int> offset_;
  std::vector<double> lambda_;
  std::vector<double> q_;
  std::vector<ActiveSet> active_;
  std::vector<signed char> clamp_;
  std::vector<double> u_;
};

class BranchAndBound {
 public:
  BranchAndBound(const FactorGraph& g, const Ad3Options& opt, SolveResult& result)
      : g_(g), opt_(opt), result_(result) {}

  void offer(std::span<const double> u, const std::vector<signed char>& clamps) {
    std::vector<char> threshold(g_.num_variables());
    for (int i = 0; i < g_.num_variables(); ++i) {
      threshold[i] = clamps[i] >= 0 ? clamps[i] : u[i] >= 0.5;
    }
    consider(threshold, clamps);
    FactorGraph clamped_view = g_;
    clamped_view.clamp = clamps;
    if (auto repaired = round_and_repair(clamped_view, u)) consider(*repaired, clamps);
  }

  void consider(const std::vector<char>& x, const std::vector<signed char>& clamps) {
    for (int i = 0; i < g_.num_variables(); ++i) {
      if (clamps[i] >= 0 && x[i] != clamps[i]) return;
    }
    if (!g_.feasible(x)) return;
    double value = g_.objective(x);
    if (!has_incumbent_ || value > incumbent_ + 1e-12 ||
        (value >= incumbent_ - 1e-12 && preferred(x, result_.assignment))) {
      has_incumbent_ = true;
      incumbent_ = value;
      result_.assignment = x;
      result_.objective = value;
    }
  }

  bool has_incumbent() const { return has_incumbent_; }
  double incumbent() const { return incumbent_; }

  // Returns true when the subtree is resolved (pruned or certified).
  bool explore(Relaxation& node, const RelaxationResult& relaxed, int depth) {
    if (has_incumbent_ && incumbent_ >= relaxed.dual - opt_.gap_tolerance) return true;
    const auto& clamps = node.clamps();
    int var = -1;
    double best = 2.0;
    for (int i = 0; i < g_.num_variables(); ++i) {
      if (clamps[i] >= 0) continue;
      double distance = std::abs(relaxed.u[i] - 0.5);
      if (distance < best) {
        best = distance;
        var = i;
      }
    }
    if (var < 0) return true;  // fully clamped; offer() already evaluated it
    if (depth >= opt_.max_branch_depth) return false;

    bool resolved = true;
    const int first = relaxed.u[var] >= 0.5 ? 1 : 0;
    for (int value : {first, 1 - first}) {
      if (result_.nodes >= opt_.max_branch_nodes) return false;
      Relaxation child = node;
      child.set_clamp(var, value);
      ++result_.nodes;
      bool leaf = std::none_of(child.clamps().begin(), child.clamps().end(),
                               [](signed char c) { return c < 0; });
      if (leaf) {
        std::vector<char> x(child.clamps().begin(), child.clamps().end());
        consider(x, child.clamps());
        continue;
      }
      RelaxationResult child_result = child.run(false);
      result_.iterations += child_result.iterations;
      offer(child_result.u, child.clamps());
      resolved = explore(child, child_result, depth + 1) && resolved;
    }
    return resolved;
  }

 private:
  // Tie-break: fewer active variables, then lexicographically smaller set.
  static bool preferred(const std::vector<char>& x, const std::vector<char>& y) {
    if (y.empty()) return true;
    auto ones = [](const std::vector<char>& v) { return std::count(v.begin(), v.end(), 1); };
    auto cx = ones(x), cy = ones(y);
    if (cx != cy) return cx < cy;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != y[i]) return x[i] > y[i];
    }
    return false;
  }

  const FactorGraph& g_;
  const Ad3Options& opt_;
  SolveResult& result_;
  bool has_incumbent_ = false;
  double incumbent_ = 0.0;
};

SolveResult solve_connected(const FactorGraph& graph, const Ad3Options& options) {
  SolveResult result;
  Relaxation root(graph, options);
  RelaxationResult relaxed = root.run(true);
  result.iterations = relaxed.iterations;
  result.dual = relaxed.dual;
  result.dual_trace = relaxed.trace;
  result.posteriors = relaxed.u;

  BranchAndBound search(graph, options, result);
  search.offer(relaxed.u, root.clamps());
  bool certified = search.has_incumbent() && search.incumbent() >= relaxed.dual - options.gap_tolerance;
  if (!certified && options.branch_and_bound) certified = search.explore(root, relaxed, 0);
  if (!search.has_incumbent()) throw std::runtime_error("ad3_solve: no feasible assignment found");
  result.status = certified ? SolveStatus::Exact : SolveStatus::Rounded;
  return result;
}

// Factor indices per connected component, and variables that no factor touches.
struct Components {
  std::vector<std::vector<int>> factors;
  std::vector<int> isolated;
};

Components connected_components(const FactorGraph& g) {
  const int n = g.num_variables();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<char> touched(n, 0);
  for (const Factor& f : g.factors) {
    for (int v : f.variables) {
      touched[v] = 1;
      parent[find(v)] = find(f.variables[0]);
    }
  }
  Components out;
  std::vector<int> slot(n, -1);
  for (std::size_t f = 0; f < g.factors.size(); ++f) {
    int root = find(g.factors[f].variables[0]);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.factors.size());
      out.factors.emplace_back();
    }
    out.factors[slot[root]].push_back(static_cast<int>(f));
  }
  for (int v = 0; v < n; ++v) {
    if (!touched[v]) out.isolated.push_back(v);
  }
  return out;
}

// The subgraph over the given factors, with variables renumbered in
// ascending order; `global` receives the original index of each variable.
FactorGraph subgraph(const FactorGraph& g, const std::vector<int>& factors, std::vector<int>& global) {
  global.clear();
  for (int f : factors) global.insert(global.end(), g.factors[f].variables.begin(), g.factors[f].variables.end());
  std::sort(global.begin(), global.end());
  global.erase(std::unique(global.begin(), global.end()), global.end());
  std::vector<int> local(g.num_variables(), -1);
  FactorGraph sub;
  for (int v : global) {
    local[v] = sub.add_variable(g.unary[v], g.role[v], g.part[v]);
    sub.clamp.back() = g.clamp[v];
  }
  for (int f : factors) {
    Factor copy = g.factors[f];
    for (int& v : copy.variables) v = local[v];
    sub.factors.push_back(std::move(copy));
  }
  return sub;
}

}  // namespace

// Components share no factor, so their MAP problems are independent and each
// runs its own relaxation to its own convergence.
SolveResult ad3_solve(const FactorGraph& graph, const Ad3Options& options) {
  Components parts = connected_components(graph);
  if (parts.factors.size() == 1 && parts.isolated.empty()) return solve_connected(graph, options);

  const int n = graph.num_variables();
  SolveResult result;
  result.assignment.assign(n, 0);
  result.posteriors.assign(n, 0.0);
  result.status = SolveStatus::Exact;
  result.nodes = 0;
  // Isolated variables are set exactly, so their part of the bound is tight.
  double fixed = graph.constant;
  for (int v : parts.isolated) {
    const char on = graph.clamp[v] >= 0 ? graph.clamp[v] : graph.unary[v] > 0.0;
    result.assignment[v] = on;
    result.posteriors[v] = on;
    if (on) fixed += graph.unary[v];
  }
  result.objective = fixed;
  result.dual = fixed;
  std::vector<std::vector<double>> traces;
  std::vector<int> global;
  for (const auto& factors : parts.factors) {
    SolveResult part = solve_connected(subgraph(graph, factors, global), options);
    for (std::size_t k = 0; k < global.size(); ++k) {
      result.assignment[global[k]] = part.assignment[k];
      result.posteriors[global[k]] = part.posteriors[k];
    }
    result.objective += part.objective;
    result.dual += part.dual;
    result.iterations += part.iterations;
    result.nodes += part.nodes;
    if (part.status != SolveStatus::Exact) result.status = SolveStatus::Rounded;
    traces.push_back(std::move(part.dual_trace));
  }
  // Summed best-so-far traces; a finished component holds its last value.
  std::size_t longest = 0;
  for (const auto& t : traces) longest = std::max(longest, t.size());
  result.dual_trace.assign(longest, fixed);
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < longest; ++i) result.dual_trace[i] += t.empty() ? 0.0 : t[std::min(i, t.size() - 1)];
  }
  return result;
}

std::optional<std::vector<char>> round_and_repair(const FactorGraph& g,
                                                  std::span<const double> u) {
  const int n = g.num_variables();
  std::vector<char> x(n);
  for (int i = 0; i < n; ++i) x[i] = g.clamp[i] >= 0 ? g.clamp[i] : u[i] >= 0.5;
  auto free = [&](int v) { return g.clamp[v] < 0; };
  // Higher marginal first, then higher unary score.
  auto better = [&](int a, int b) {
    if (u[a] != u[b]) return u[a] > u[b];
    return g.unary[a] > g.unary[b];
  };
  auto pick_one = [&](const std::vector<int>& vars) {
    int chosen = -1;
    for (int v : vars) {
      if (g.clamp[v] == 1) return v;
    }
    for (int v : vars) {
      if (g.clamp[v] == 0) continue;
      if (chosen < 0 || better(v, chosen)) chosen = v;
    }
    return chosen;
  };

  // Frames: exactly one predicate per target.
  for (const Factor& f : g.factors) {
    if (f.kind != FactorKind::Xor || g.role[f.variables[0]] != VariableRole::Predicate) continue;
    int chosen = pick_one(f.variables);
    for (int v : f.variables) {
      if (free(v)) x[v] = v == chosen;
    }
  }
  // Predicate of each argument, from the implication factors.
  std::vector<int> premise_of(n, -1);
  for (const Factor& f : g.factors) {
    if (f.kind == FactorKind::Implication) premise_of[f.variables[0]] = f.variables[1];
  }
  // Top arcs and labels need the arcs settled; arguments need the arcs too for
  // the cross-task bonus, so arcs are thresholded first (already in x).
  std::vector<std::vector<std::pair<int, double>>> pair_partners(n);
  for (const Factor& f : g.factors) {
    if (f.kind != FactorKind::Pair) continue;
    pair_partners[f.variables[0]].push_back({f.variables[1], f.score});
    pair_partners[f.variables[1]].push_back({f.variables[0], f.score});
  }
  for (const Factor& f : g.factors) {
    if (f.kind != FactorKind::SemiMarkov) continue;
    std::vector<Segment> segments;
    std::vector<int> owners;
    for (std::size_t k = 0; k < f.variables.size(); ++k) {
      int v = f.variables[k];
      int pred = premise_of[v];
      if (g.clamp[v] == 0 || (pred >= 0 && !x[pred])) continue;
      double score = g.unary[v];
      for (auto [partner, s] : pair_partners[v]) {
        if (x[partner]) score += s;
      }
      if (g.clamp[v] == 1) score = 1e9;
      segments.push_back({f.spans[k].first, f.spans[k].second, score});
      owners.push_back(v);
    }
    for (int v : f.variables) {
      if (free(v)) x[v] = 0;
    }
    for (int k : semi_markov_map(segments, f.length).selected) x[owners[k]] = 1;
  }
  for (int v = 0; v < n; ++v) {
    if (g.role[v] == VariableRole::Argument && premise_of[v] >= 0 && !x[premise_of[v]] && free(v)) {
      x[v] = 0;
    }
  }

  // Labels: exactly one label per active arc, none otherwise.
  std::vector<const Factor*> label_factors;
  for (const Factor& f : g.factors) {
    if (f.kind == FactorKind::Xor && f.is_negated(0)) label_factors.push_back(&f);
  }
  auto settle_labels = [&](const Factor& f) {
    int arc = f.variables[0];
    std::vector<int> labels(f.variables.begin() + 1, f.variables.end());
    bool forced_label = std::any_of(labels.begin(), labels.end(), [&](int v) { return g.clamp[v] == 1; });
    if (forced_label && free(arc)) x[arc] = 1;
    int chosen = x[arc] ? pick_one(labels) : -1;
    if (chosen < 0 && free(arc)) x[arc] = 0;
    for (int v : labels) {
      if (free(v)) x[v] = v == chosen;
    }
  };
  for (const Factor* f : label_factors) settle_labels(*f);

  // Determinism: keep the best labeled arc per (head, label) group.
  std::vector<int> arc_of_label(n, -1);
  for (const Factor* f : label_factors) {
    for (std::size_t k = 1; k < f->variables.size(); ++k) arc_of_label[f->variables[k]] = f->variables[0];
  }
  for (const Factor& f : g.factors) {
    if (f.kind != FactorKind::AtMostOne) continue;
    std::vector<int> on;
    for (int v : f.variables) {
      if (x[v]) on.push_back(v);
    }
    if (on.size() <= 1) continue;
    int keep = pick_one(on);
    for (int v : on) {
      if (v == keep || !free(v)) continue;
      x[v] = 0;
      int arc = arc_of_label[v];
      if (arc >= 0 && free(arc)) {
        x[arc] = 0;
        for (const Factor* lf : label_factors) {
          if (lf->variables[0] == arc) settle_labels(*lf);
        }
      }
    }
  }

  // Remaining XORs (top arcs and generic ones): argmax.
  for (const Factor& f : g.factors) {
    if (f.kind != FactorKind::Xor || f.is_negated(0)) continue;
    if (g.role[f.variables[0]] == VariableRole::Predicate) continue;
    if (g.satisfies(f, x)) continue;
    int chosen = pick_one(f.variables);
    for (int v : f.variables) {
      if (free(v)) x[v] = v == chosen;
    }
  }

  // Heads follow their outgoing arcs; idle heads keep a positive score.
  std::vector<char> implied(n, 0);
  for (const Factor& f : g.factors) {
    if (f.kind == FactorKind::Implication && g.role[f.variables[1]] == VariableRole::Head &&
        x[f.variables[0]]) {
      implied[f.variables[1]] = 1;
    }
  }
  for (int v = 0; v < n; ++v) {
    if (g.role[v] == VariableRole::Head && free(v)) x[v] = implied[v] || g.unary[v] > 0.0;
  }

  if (!g.feasible(x)) return std::nullopt;
  return x;
}

}  // namespace jointsem
