#pragma once

#include <span>
#include <tuple>
#include <utility>
#include <vector>

namespace jointsem {

/// A labeled span candidate. Several segments may share (start, end).
struct Segment {
  int start;
  int end;
  double score;
};

struct SegmentationResult {
  /// Indices into the segment list, ascending by position.
  std::vector<int> selected;
  double value = 0.0;
};

/// Highest-scoring set of non-overlapping segments (empty set allowed, value 0).
/// Ties prefer fewer segments.
SegmentationResult semi_markov_map(std::span<const Segment> segments, int length);

/// Dense form: scores[i][j][r] for span (i, j) and label r; spans longer than
/// max_len are ignored. Returns (start, end, label) triples.
struct LabeledSpan {
  int start;
  int end;
  int label;
  friend auto operator<=>(const LabeledSpan&, const LabeledSpan&) = default;
};
std::pair<std::vector<LabeledSpan>, double> semi_markov_map(
    const std::vector<std::vector<std::vector<double>>>& scores, int length, int max_len);

struct SegmentMarginals {
  double log_partition = 0.0;
  /// Posterior probability of each segment, in input order.
  std::vector<double> posteriors;
};

/// Log-partition over all sets of non-overlapping segments, where a set's
/// weight is exp(sum of its scores), and the posterior of each segment.
SegmentMarginals semi_markov_marginals(std::span<const Segment> segments, int length);

}  // namespace jointsem
