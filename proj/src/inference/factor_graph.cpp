#include "jointsem/inference/factor_graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace jointsem {

const char* factor_name(FactorKind kind) {
  switch (kind) {
    case FactorKind::Xor: return "XOR";
    case FactorKind::AtMostOne: return "ATMOSTONE";
    case FactorKind::Implication: return "IMPLY";
    case FactorKind::Pair: return "PAIR";
    case FactorKind::SemiMarkov: return "SEMIMARKOV";
  }
  return "?";
}

namespace {

const char* role_name(VariableRole role) {
  switch (role) {
    case VariableRole::Generic: return "generic";
    case VariableRole::Predicate: return "predicate";
    case VariableRole::Argument: return "argument";
    case VariableRole::Head: return "head";
    case VariableRole::Arc: return "arc";
    case VariableRole::TopArc: return "top";
    case VariableRole::LabeledArc: return "labeled";
  }
  return "?";
}

}  // namespace

int FactorGraph::add_variable(double score, VariableRole r, int p) {
  unary.push_back(score);
  role.push_back(r);
  part.push_back(p);
  clamp.push_back(-1);
  return num_variables() - 1;
}

void FactorGraph::add_xor(std::vector<int> variables, std::vector<char> negated) {
  if (variables.empty()) throw std::invalid_argument("XOR factor needs at least one variable");
  if (!negated.empty() && negated.size() != variables.size()) {
    throw std::invalid_argument("XOR negation flags do not match its arity");
  }
  Factor& f = factors.emplace_back();
  f.kind = FactorKind::Xor;
  f.variables = std::move(variables);
  f.negated = std::move(negated);
}

void FactorGraph::add_at_most_one(std::vector<int> variables, std::vector<char> negated) {
  if (variables.empty()) throw std::invalid_argument("AtMostOne factor needs at least one variable");
  if (!negated.empty() && negated.size() != variables.size()) {
    throw std::invalid_argument("AtMostOne negation flags do not match its arity");
  }
  Factor& f = factors.emplace_back();
  f.kind = FactorKind::AtMostOne;
  f.variables = std::move(variables);
  f.negated = std::move(negated);
}

void FactorGraph::add_implication(int premise, int conclusion) {
  Factor& f = factors.emplace_back();
  f.kind = FactorKind::Implication;
  f.variables = {premise, conclusion};
}

void FactorGraph::add_pair(int a, int b, double score) {
  Factor& f = factors.emplace_back();
  f.kind = FactorKind::Pair;
  f.variables = {a, b};
  f.score = score;
}

void FactorGraph::add_semi_markov(std::vector<int> variables, std::vector<std::pair<int, int>> spans,
                                  int length) {
  if (variables.empty()) throw std::invalid_argument("SemiMarkov factor needs at least one variable");
  if (spans.size() != variables.size()) {
    throw std::invalid_argument("SemiMarkov factor needs one span per variable");
  }
  Factor& f = factors.emplace_back();
  f.kind = FactorKind::SemiMarkov;
  f.variables = std::move(variables);
  f.spans = std::move(spans);
  f.length = length;
}

int FactorGraph::count(FactorKind kind) const {
  return static_cast<int>(std::count_if(factors.begin(), factors.end(),
                                        [&](const Factor& f) { return f.kind == kind; }));
}

bool FactorGraph::satisfies(const Factor& f, std::span<const char> x) const {
  switch (f.kind) {
    case FactorKind::Xor:
    case FactorKind::AtMostOne: {
      int on = 0;
      for (std::size_t k = 0; k < f.variables.size(); ++k) {
        on += (x[f.variables[k]] != 0) != f.is_negated(k);
      }
      return f.kind == FactorKind::Xor ? on == 1 : on <= 1;
    }
    case FactorKind::Implication:
      return !x[f.variables[0]] || x[f.variables[1]];
    case FactorKind::Pair:
      return true;
    case FactorKind::SemiMarkov: {
      std::vector<std::pair<int, int>> chosen;
      for (std::size_t k = 0; k < f.variables.size(); ++k) {
        if (x[f.variables[k]]) chosen.push_back(f.spans[k]);
      }
      std::sort(chosen.begin(), chosen.end());
      for (std::size_t k = 1; k < chosen.size(); ++k) {
        if (chosen[k].first <= chosen[k - 1].second) return false;
      }
      return true;
    }
  }
  return false;
}

bool FactorGraph::feasible(std::span<const char> x) const {
  for (int i = 0; i < num_variables(); ++i) {
    if (clamp[i] >= 0 && (x[i] != 0) != (clamp[i] != 0)) return false;
  }
  for (const Factor& f : factors) {
    if (!satisfies(f, x)) return false;
  }
  return true;
}

double FactorGraph::objective(std::span<const char> x) const {
  double value = constant;
  for (int i = 0; i < num_variables(); ++i) {
    if (x[i]) value += unary[i];
  }
  for (const Factor& f : factors) {
    if (f.kind == FactorKind::Pair && x[f.variables[0]] && x[f.variables[1]]) value += f.score;
  }
  return value;
}

std::string FactorGraph::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << "constant " << constant << "\n";
  for (int i = 0; i < num_variables(); ++i) {
    os << "var " << i << " " << role_name(role[i]) << " part=" << part[i] << " score=" << unary[i];
    if (clamp[i] >= 0) os << " clamp=" << int(clamp[i]);
    os << "\n";
  }
  for (const Factor& f : factors) {
    os << "factor " << factor_name(f.kind);
    for (std::size_t k = 0; k < f.variables.size(); ++k) {
      os << " " << (f.is_negated(k) ? "!" : "") << f.variables[k];
      if (f.kind == FactorKind::SemiMarkov) os << "[" << f.spans[k].first << "," << f.spans[k].second << "]";
    }
    if (f.kind == FactorKind::Pair) os << " score=" << f.score;
    os << "\n";
  }
  return os.str();
}

}  // namespace jointsem
