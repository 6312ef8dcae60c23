#pragma once

#include <cmath>
#include <stdexcept>

#include "jointsem/autodiff/parameters.hpp"

namespace jointsem::autodiff {

struct StepReport {
  double gradient_norm = 0.0;
  /// Factor applied to every gradient before the update (1 when not clipped).
  double scale = 1.0;
};

/// One SGD step: rescales gradients so their global ℓ2 norm is at most
/// store.clip, then w ← w − lr·(g + 2λw) for the store's λ, then zeroes the
/// gradients. Throws before touching any value if a gradient is not finite.
template <typename Scalar>
StepReport clip_and_step(ParameterStore<Scalar>& store, double learning_rate) {
  double squared = 0.0;
  for (const auto& p : store) {
    if (!p.grad.allFinite()) throw std::runtime_error("non-finite gradient in parameter '" + p.name + "'");
    squared += static_cast<double>(p.grad.squaredNorm());
  }
  StepReport report;
  report.gradient_norm = std::sqrt(squared);
  if (store.clip > 0.0 && report.gradient_norm > store.clip) report.scale = store.clip / report.gradient_norm;

  const Scalar lr = static_cast<Scalar>(learning_rate);
  const Scalar scale = static_cast<Scalar>(report.scale);
  const Scalar decay = static_cast<Scalar>(2.0 * store.l2);
  for (auto& p : store) {
    p.value -= lr * (scale * p.grad + decay * p.value);
    p.grad.setZero();
  }
  return report;
}

}  // namespace jointsem::autodiff
