#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "jointsem/autodiff/graph.hpp"
#include "jointsem/core/candidate_space.hpp"
#include "jointsem/core/cost.hpp"
#include "jointsem/inference/decode.hpp"

namespace jointsem {

struct LossOptions {
  CostConfig cost;
  /// Solver settings and deterministic labels; the mode is set per loss.
  DecodeOptions decode;
};

template <typename S>
struct HingeLoss {
  autodiff::Expr<S> node;
  double value = 0.0;
  /// Cost of the cost-augmented argmax against the gold parts.
  double cost = 0.0;
  /// Cost-augmented argmax and the reference structure (part indices).
  std::vector<int> predicted;
  std::vector<int> reference;
  SolveStatus status = SolveStatus::Exact;
};

namespace detail {

inline std::vector<char> mask_of(const CandidateSpace& space, std::initializer_list<PartKind> kinds) {
  std::vector<char> mask(space.size(), 0);
  for (PartKind k : kinds) {
    for (int p : space.of_kind(k)) mask[p] = 1;
  }
  return mask;
}

inline std::vector<int> restrict_to(std::span<const int> parts, const std::vector<char>& mask) {
  std::vector<int> out;
  for (int p : parts) {
    if (mask[p]) out.push_back(p);
  }
  return out;
}

/// Σ_{predicted} s − Σ_{reference} s + cost, built only over the symmetric
/// difference. Clamped at 0 when solver inexactness makes it negative.
template <typename S>
HingeLoss<S> assemble(autodiff::Graph<S>& graph, std::span<const autodiff::Expr<S>> scores,
                      std::vector<int> predicted, std::vector<int> reference, double cost, SolveStatus status) {
  std::vector<autodiff::Expr<S>> plus, minus;
  std::vector<int> only_pred, only_ref;
  std::set_difference(predicted.begin(), predicted.end(), reference.begin(), reference.end(),
                      std::back_inserter(only_pred));
  std::set_difference(reference.begin(), reference.end(), predicted.begin(), predicted.end(),
                      std::back_inserter(only_ref));
  double value = cost;
  for (int p : only_pred) {
    plus.push_back(scores[p]);
    value += static_cast<double>(scores[p].scalar());
  }
  for (int p : only_ref) {
    minus.push_back(scores[p]);
    value -= static_cast<double>(scores[p].scalar());
  }
  HingeLoss<S> out;
  out.cost = cost;
  out.status = status;
  out.predicted = std::move(predicted);
  out.reference = std::move(reference);
  if (value <= 0.0) {
    out.node = graph.input(S(0));
    out.value = 0.0;
    return out;
  }
  out.node = graph.sum(plus) - graph.sum(minus) + graph.input(static_cast<S>(cost));
  out.value = static_cast<double>(out.node.scalar());
  return out;
}

template <typename S>
std::vector<double> values_of(std::span<const autodiff::Expr<S>> scores) {
  std::vector<double> out(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) out[k] = static_cast<double>(scores[k].scalar());
  return out;
}

}  // namespace detail

/// max_{y,z} [S(y,z) + δ(y,y*)] − max_z S(y*,z) for a frame instance whose
/// dependencies are latent. δ costs frame parts only.
template <typename S>
HingeLoss<S> latent_hinge_loss(autodiff::Graph<S>& graph, std::span<const autodiff::Expr<S>> scores,
                               const CandidateSpace& space, std::vector<int> gold_frame,
                               const LossOptions& options = {}) {
  std::sort(gold_frame.begin(), gold_frame.end());
  auto values = detail::values_of(scores);
  auto frame_mask = detail::mask_of(space, {PartKind::Predicate, PartKind::Argument});
  auto augmented = cost_augment(values, gold_frame, frame_mask, options.cost);

  DecodeOptions joint = options.decode;
  joint.mode = DecodeMode::Joint;
  Decoded best = decode(space, joint, augmented);

  DecodeOptions completion = options.decode;
  completion.mode = DecodeMode::LatentCompletion;
  completion.gold_frame = gold_frame;
  Decoded reference = decode(space, completion, values);

  double cost = weighted_hamming(detail::restrict_to(best.parts, frame_mask), gold_frame, options.cost);
  SolveStatus status = best.status == SolveStatus::Exact && reference.status == SolveStatus::Exact
                           ? SolveStatus::Exact
                           : SolveStatus::Rounded;
  return detail::assemble(graph, scores, std::move(best.parts), std::move(reference.parts), cost, status);
}

/// max_z [S(z) + δ(z,z*)] − S(z*) for a dependency instance; δ costs
/// dependency parts only.
template <typename S>
HingeLoss<S> sdp_hinge_loss(autodiff::Graph<S>& graph, std::span<const autodiff::Expr<S>> scores,
                            const CandidateSpace& space, std::vector<int> gold, const LossOptions& options = {}) {
  std::sort(gold.begin(), gold.end());
  auto values = detail::values_of(scores);
  auto dep_mask = detail::mask_of(space, {PartKind::Head, PartKind::UnlabeledArc, PartKind::LabeledArc});
  auto augmented = cost_augment(values, gold, dep_mask, options.cost);
  DecodeOptions deps = options.decode;
  deps.mode = DecodeMode::DependenciesOnly;
  Decoded best = decode(space, deps, augmented);
  double cost = weighted_hamming(detail::restrict_to(best.parts, dep_mask), gold, options.cost);
  return detail::assemble(graph, scores, std::move(best.parts), std::move(gold), cost, best.status);
}

/// λ Σ |s_c| over cross-task parts (a zero scalar when there are none).
template <typename S>
autodiff::Expr<S> l1_penalty(autodiff::Graph<S>& graph, std::span<const autodiff::Expr<S>> scores,
                             const CandidateSpace& space, double lambda) {
  std::vector<autodiff::Expr<S>> terms;
  if (lambda != 0.0) {
    for (int c : space.of_kind(PartKind::CrossTask)) terms.push_back(abs(scores[c]));
  }
  if (terms.empty()) return graph.input(S(0));
  return graph.sum(terms) * static_cast<S>(lambda);
}

}  // namespace jointsem
