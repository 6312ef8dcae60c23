#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace jointsem {

enum class FactorKind {
  /// Exactly one literal true (a literal is a variable, or its negation when flagged).
  Xor,
  /// At most one literal true.
  AtMostOne,
  /// variables[0] ⇒ variables[1].
  Implication,
  /// Adds `score` when both variables are on; no constraint.
  Pair,
  /// Selected variables must have pairwise non-overlapping spans.
  SemiMarkov,
};

const char* factor_name(FactorKind kind);

struct Factor {
  FactorKind kind = FactorKind::Xor;
  std::vector<int> variables;
  /// Xor / AtMostOne only; empty means no negations.
  std::vector<char> negated;
  /// Pair only.
  double score = 0.0;
  /// SemiMarkov only: (start, end) of each variable, and the sentence length.
  std::vector<std::pair<int, int>> spans;
  int length = 0;

  bool is_negated(std::size_t k) const { return !negated.empty() && negated[k]; }
};

/// What a variable stands for; used by rounding repair.
enum class VariableRole { Generic, Predicate, Argument, Head, Arc, TopArc, LabeledArc };

/// Binary variables with unary scores plus factors. An assignment is a 0/1
/// vector over variables; its objective is the constant plus active unary
/// scores plus Pair scores whose variables are both on.
struct FactorGraph {
  std::vector<double> unary;
  std::vector<VariableRole> role;
  /// Candidate-space part index of each variable, or -1.
  std::vector<int> part;
  /// -1 free; 0 or 1 clamped.
  std::vector<signed char> clamp;
  std::vector<Factor> factors;
  double constant = 0.0;

  int num_variables() const { return static_cast<int>(unary.size()); }

  int add_variable(double score, VariableRole role = VariableRole::Generic, int part = -1);
  void add_xor(std::vector<int> variables, std::vector<char> negated = {});
  void add_at_most_one(std::vector<int> variables, std::vector<char> negated = {});
  void add_implication(int premise, int conclusion);
  void add_pair(int a, int b, double score);
  void add_semi_markov(std::vector<int> variables, std::vector<std::pair<int, int>> spans,
                       int length);

  int count(FactorKind kind) const;

  bool satisfies(const Factor& factor, std::span<const char> assignment) const;
  /// All factors and clamps hold.
  bool feasible(std::span<const char> assignment) const;
  double objective(std::span<const char> assignment) const;

  /// One line per variable and per factor, for inspection.
  std::string dump() const;
};

}  // namespace jointsem
