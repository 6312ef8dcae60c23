#pragma once

#include <string>
#include <utility>

#include "jointsem/autodiff/graph.hpp"

namespace jointsem::autodiff {

/// One LSTM cell: gates = W·[x; h] + b, stacked as (input, forget, output, candidate).
struct LstmCell {
  int weights = -1;
  int bias = -1;
  int input_dim = 0;
  int hidden = 0;
};

template <typename Scalar>
LstmCell add_lstm_cell(ParameterStore<Scalar>& store, const std::string& prefix, int input_dim,
                       int hidden, std::mt19937_64& rng) {
  LstmCell cell;
  cell.input_dim = input_dim;
  cell.hidden = hidden;
  cell.weights = store.ensure(prefix + "/W", 4 * hidden, input_dim + hidden, ParameterKind::Weight, rng);
  cell.bias = store.ensure(prefix + "/b", 4 * hidden, 1, ParameterKind::Bias, rng);
  return cell;
}

template <typename Scalar>
struct LstmState {
  Expr<Scalar> h;
  Expr<Scalar> c;
};

template <typename Scalar>
LstmState<Scalar> lstm_initial_state(Graph<Scalar>& graph, const LstmCell& cell) {
  auto zero = graph.input(Matrix<Scalar>::Zero(cell.hidden, 1));
  return {zero, zero};
}

/// c' = f⊙c + i⊙g,  h' = o⊙tanh(c').
template <typename Scalar>
LstmState<Scalar> lstm_step(Graph<Scalar>& graph, const LstmCell& cell, Expr<Scalar> x,
                            const LstmState<Scalar>& prev) {
  const int H = cell.hidden;
  auto gates = graph.affine(graph.parameter(cell.weights), graph.concat({x, prev.h}),
                            graph.parameter(cell.bias));
  auto i = sigmoid(graph.slice(gates, 0, H));
  auto f = sigmoid(graph.slice(gates, H, H));
  auto o = sigmoid(graph.slice(gates, 2 * H, H));
  auto g = tanh(graph.slice(gates, 3 * H, H));
  auto c = cwise_product(f, prev.c) + cwise_product(i, g);
  auto h = cwise_product(o, tanh(c));
  return {h, c};
}

}  // namespace jointsem::autodiff
