#pragma once

#include <random>
#include <string>
#include <vector>

#include "jointsem/autodiff/graph.hpp"

namespace jointsem {

/// tanh(W2·tanh(Σ_k W1_k·x_k + b1) + b2). The first layer is split per input
/// block so per-token projections can be computed once and reused.
struct SplitMlp {
  std::vector<int> first;
  int bias1 = -1;
  int second = -1;
  int bias2 = -1;
  int hidden = 0;
  int output = 0;
};

template <typename S>
SplitMlp add_split_mlp(autodiff::ParameterStore<S>& store, const std::string& prefix,
                       const std::vector<int>& input_widths, int hidden, int output,
                       std::mt19937_64& rng) {
  using autodiff::ParameterKind;
  SplitMlp mlp;
  mlp.hidden = hidden;
  mlp.output = output;
  for (std::size_t k = 0; k < input_widths.size(); ++k) {
    mlp.first.push_back(store.ensure(prefix + "/W1_" + std::to_string(k), hidden,
                                         input_widths[k], ParameterKind::Weight, rng));
  }
  mlp.bias1 = store.ensure(prefix + "/b1", hidden, 1, ParameterKind::Bias, rng);
  mlp.second = store.ensure(prefix + "/W2", output, hidden, ParameterKind::Weight, rng);
  mlp.bias2 = store.ensure(prefix + "/b2", output, 1, ParameterKind::Bias, rng);
  return mlp;
}

/// W1_k·x for input block k.
template <typename S>
autodiff::Expr<S> mlp_project(autodiff::Graph<S>& graph, const SplitMlp& mlp, int block,
                              autodiff::Expr<S> x) {
  return graph.affine(graph.parameter(mlp.first.at(block)), x);
}

/// Output from one projection per block (see mlp_project).
template <typename S>
autodiff::Expr<S> mlp_finish(autodiff::Graph<S>& graph, const SplitMlp& mlp,
                             std::vector<autodiff::Expr<S>> projections) {
  projections.push_back(graph.parameter(mlp.bias1));
  auto hidden = tanh(graph.sum(projections));
  return tanh(graph.affine(graph.parameter(mlp.second), hidden, graph.parameter(mlp.bias2)));
}

template <typename S>
autodiff::Expr<S> mlp_apply(autodiff::Graph<S>& graph, const SplitMlp& mlp,
                            const std::vector<autodiff::Expr<S>>& inputs) {
  std::vector<autodiff::Expr<S>> projections;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    projections.push_back(mlp_project(graph, mlp, static_cast<int>(k), inputs[k]));
  }
  return mlp_finish(graph, mlp, std::move(projections));
}

}  // namespace jointsem
