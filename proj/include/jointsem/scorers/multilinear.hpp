#pragma once

#include <Eigen/Dense>

namespace jointsem {

/// Rank factors of the low-rank scoring tensors. Every matrix has one row per
/// rank component; row k of each factor is dotted with its slot's input and
/// the per-component products are summed.
///   predicate:  frame, target, lu
///   argument:   predicate slots plus span, role
///   cross-task: argument slots plus arc weight, arc representation
template <typename S>
struct RankFactors {
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  M frame, target, lu, span, role, arc_weight, arc;
};

/// Σ_k (F1_k·x1)(F2_k·x2)… for any number of (factor, input) slots.
template <typename Factor, typename Input>
auto multilinear_product(const Eigen::MatrixBase<Factor>& factor, const Eigen::MatrixBase<Input>& input) {
  return (factor * input).eval();
}
template <typename Factor, typename Input, typename... Rest>
auto multilinear_product(const Eigen::MatrixBase<Factor>& factor, const Eigen::MatrixBase<Input>& input,
                         const Rest&... rest) {
  return (factor * input).cwiseProduct(multilinear_product(rest...)).eval();
}
template <typename... Slots>
auto multilinear_score(const Slots&... slots) {
  return multilinear_product(slots...).sum();
}

template <typename S, typename V>
S score_predicate(const RankFactors<S>& f, const Eigen::MatrixBase<V>& g_frame,
                  const Eigen::MatrixBase<V>& g_target, const Eigen::MatrixBase<V>& g_lu) {
  return multilinear_score(f.frame, g_frame, f.target, g_target, f.lu, g_lu);
}

template <typename S, typename V>
S score_argument(const RankFactors<S>& f, const Eigen::MatrixBase<V>& g_frame,
                 const Eigen::MatrixBase<V>& g_target, const Eigen::MatrixBase<V>& g_lu,
                 const Eigen::MatrixBase<V>& g_span, const Eigen::MatrixBase<V>& g_role) {
  return multilinear_score(f.frame, g_frame, f.target, g_target, f.lu, g_lu, f.span, g_span, f.role, g_role);
}

template <typename S, typename V>
S score_cross_task(const RankFactors<S>& f, const Eigen::MatrixBase<V>& g_frame,
                   const Eigen::MatrixBase<V>& g_target, const Eigen::MatrixBase<V>& g_lu,
                   const Eigen::MatrixBase<V>& g_span, const Eigen::MatrixBase<V>& g_role,
                   const Eigen::MatrixBase<V>& arc_weight, const Eigen::MatrixBase<V>& g_arc) {
  return multilinear_score(f.frame, g_frame, f.target, g_target, f.lu, g_lu, f.span, g_span, f.role, g_role,
                           f.arc_weight, arc_weight, f.arc, g_arc);
}

}  // namespace jointsem
