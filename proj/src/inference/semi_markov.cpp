#include "jointsem/inference/semi_markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jointsem {

namespace {

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void check_segments(std::span<const Segment> segments, int length) {
  for (const Segment& s : segments) {
    if (s.start < 0 || s.start > s.end || s.end >= length) {
      throw std::invalid_argument("segment out of range");
    }
  }
}

}  // namespace

SegmentationResult semi_markov_map(std::span<const Segment> segments, int length) {
  check_segments(segments, length);
  std::vector<std::vector<int>> ending(length);
  for (int k = 0; k < static_cast<int>(segments.size()); ++k) ending[segments[k].end].push_back(k);

  // best[j]: best value over positions [0, j); back[j]: segment ending at j-1 or -1 (skip).
  std::vector<double> best(length + 1, 0.0);
  std::vector<int> count(length + 1, 0);
  std::vector<int> back(length + 1, -1);
  for (int j = 1; j <= length; ++j) {
    best[j] = best[j - 1];
    count[j] = count[j - 1];
    back[j] = -1;
    for (int k : ending[j - 1]) {
      const Segment& s = segments[k];
      double candidate = best[s.start] + s.score;
      int candidate_count = count[s.start] + 1;
      if (candidate > best[j] || (candidate == best[j] && candidate_count < count[j])) {
        best[j] = candidate;
        count[j] = candidate_count;
        back[j] = k;
      }
    }
  }

  SegmentationResult result;
  result.value = best[length];
  for (int j = length; j > 0;) {
    if (back[j] < 0) {
      --j;
    } else {
      result.selected.push_back(back[j]);
      j = segments[back[j]].start;
    }
  }
  std::reverse(result.selected.begin(), result.selected.end());
  return result;
}

std::pair<std::vector<LabeledSpan>, double> semi_markov_map(
    const std::vector<std::vector<std::vector<double>>>& scores, int length, int max_len) {
  std::vector<Segment> segments;
  std::vector<LabeledSpan> labels;
  for (int i = 0; i < length; ++i) {
    for (int j = i; j < length && j - i + 1 <= max_len; ++j) {
      for (int r = 0; r < static_cast<int>(scores.at(i).at(j).size()); ++r) {
        segments.push_back({i, j, scores[i][j][r]});
        labels.push_back({i, j, r});
      }
    }
  }
  auto result = semi_markov_map(segments, length);
  std::vector<LabeledSpan> out;
  for (int k : result.selected) out.push_back(labels[k]);
  return {out, result.value};
}

SegmentMarginals semi_markov_marginals(std::span<const Segment> segments, int length) {
  check_segments(segments, length);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> ending(length), starting(length);
  for (int k = 0; k < static_cast<int>(segments.size()); ++k) {
    ending[segments[k].end].push_back(k);
    starting[segments[k].start].push_back(k);
  }

  // alpha[j]: log-sum over prefixes covering positions [0, j).
  std::vector<double> alpha(length + 1, neg_inf);
  alpha[0] = 0.0;
  for (int j = 1; j <= length; ++j) {
    double acc = alpha[j - 1];
    for (int k : ending[j - 1]) acc = log_add(acc, alpha[segments[k].start] + segments[k].score);
    alpha[j] = acc;
  }
  // beta[i]: log-sum over suffixes covering positions [i, length).
  std::vector<double> beta(length + 1, neg_inf);
  beta[length] = 0.0;
  for (int i = length - 1; i >= 0; --i) {
    double acc = beta[i + 1];
    for (int k : starting[i]) acc = log_add(acc, segments[k].score + beta[segments[k].end + 1]);
    beta[i] = acc;
  }

  SegmentMarginals result;
  result.log_partition = alpha[length];
  result.posteriors.reserve(segments.size());
  for (const Segment& s : segments) {
    double p = std::exp(alpha[s.start] + s.score + beta[s.end + 1] - result.log_partition);
    result.posteriors.push_back(std::clamp(p, 0.0, 1.0));
  }
  return result;
}

}  // namespace jointsem
