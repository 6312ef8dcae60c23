#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "jointsem/autodiff/graph.hpp"

namespace jointsem::autodiff {

struct GradCheckEntry {
  std::string parameter;
  double max_relative_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> parameters;
  double worst = 0.0;
  bool passed = true;
};

/// |a − b| / max(|a|, |b|, floor). The floor keeps exact zeros from
/// producing spurious failures on roundoff noise.
inline double relative_error(double analytic, double numeric, double floor = 1e-7) {
  double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace detail {

template <typename Scalar>
GradCheckReport finite_difference(ParameterStore<Scalar>& store, const std::vector<int>& params,
                                  const std::function<double()>& evaluate,
                                  const std::vector<Matrix<Scalar>>& analytic, double tolerance,
                                  double epsilon) {
  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = store[params[k]];
    GradCheckEntry entry{p.name, 0.0};
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      Scalar original = p.value.data()[i];
      p.value.data()[i] = original + static_cast<Scalar>(epsilon);
      double plus = evaluate();
      p.value.data()[i] = original - static_cast<Scalar>(epsilon);
      double minus = evaluate();
      p.value.data()[i] = original;
      double numeric = (plus - minus) / (2.0 * epsilon);
      double err = relative_error(static_cast<double>(analytic[k].data()[i]), numeric);
      entry.max_relative_error = std::max(entry.max_relative_error, err);
    }
    report.worst = std::max(report.worst, entry.max_relative_error);
    report.parameters.push_back(entry);
  }
  report.passed = report.worst < tolerance;
  return report;
}

}  // namespace detail

/// Central-difference check of every parameter reachable from `output` by
/// replaying the tape. Meant for 64-bit graphs without external nodes.
template <typename Scalar>
GradCheckReport grad_check(Graph<Scalar>& graph, Expr<Scalar> output, std::vector<int> params,
                           double tolerance, double epsilon = 1e-4) {
  auto& store = *graph.store();
  store.zero_grad();
  graph.backward(output);
  std::vector<Matrix<Scalar>> analytic;
  for (int id : params) analytic.push_back(store[id].grad);
  store.zero_grad();
  auto evaluate = [&] {
    graph.forward();
    return static_cast<double>(graph.scalar(output));
  };
  auto report = detail::finite_difference(store, params, evaluate, analytic, tolerance, epsilon);
  graph.forward();
  return report;
}

/// Same check, but the scalar is rebuilt from scratch at every evaluation.
/// `build` receives a fresh graph and returns the output node; this covers
/// losses whose structure (e.g. an argmax) is recomputed per evaluation.
template <typename Scalar>
GradCheckReport grad_check(ParameterStore<Scalar>& store,
                           const std::function<Expr<Scalar>(Graph<Scalar>&)>& build,
                           std::vector<int> params, double tolerance, double epsilon = 1e-4) {
  store.zero_grad();
  {
    Graph<Scalar> graph(&store);
    graph.backward(build(graph));
  }
  std::vector<Matrix<Scalar>> analytic;
  for (int id : params) analytic.push_back(store[id].grad);
  store.zero_grad();
  auto evaluate = [&] {
    Graph<Scalar> graph(&store);
    return static_cast<double>(build(graph).scalar());
  };
  return detail::finite_difference(store, params, evaluate, analytic, tolerance, epsilon);
}

/// All parameter ids in the store.
template <typename Scalar>
std::vector<int> all_parameters(const ParameterStore<Scalar>& store) {
  std::vector<int> ids(store.size());
  for (int i = 0; i < store.size(); ++i) ids[i] = i;
  return ids;
}

}  // namespace jointsem::autodiff
