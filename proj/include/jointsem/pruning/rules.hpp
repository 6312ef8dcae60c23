#pragma once

#include <set>
#include <utility>
#include <vector>

namespace jointsem {

struct PruneConfig {
  int max_span_length = 20;
  /// Heads kept per dependent token.
  int top_k = 20;
  /// Arc posteriors must exceed this to be kept.
  double arc_floor = 0.1;
};

/// Spans with posterior below 1/n² are pruned.
inline double span_threshold(int sentence_length) {
  return 1.0 / (static_cast<double>(sentence_length) * static_cast<double>(sentence_length));
}

struct SpanPosterior {
  int start;
  int end;
  double posterior;
};

struct ArcPosterior {
  int head;
  int dependent;
  double posterior;
};

struct PruneReport {
  std::set<std::pair<int, int>> retained;
  /// |gold ∩ retained| / |gold|; 1 when gold is empty.
  double recall = 1.0;
  int gold = 0;
  int gold_retained = 0;
};

/// Keeps spans with length ≤ max_span_length and posterior ≥ 1/n².
PruneReport select_spans(const std::vector<SpanPosterior>& posteriors, int sentence_length,
                         const PruneConfig& config, const std::set<std::pair<int, int>>& gold = {});

/// Keeps, per dependent, the top_k heads by posterior among those above the
/// floor. Ties go to the smaller head index.
PruneReport select_arcs(const std::vector<ArcPosterior>& posteriors, const PruneConfig& config,
                        const std::set<std::pair<int, int>>& gold = {});

}  // namespace jointsem
