#pragma once

#include <string>
#include <vector>

#include "jointsem/core/ontology.hpp"
#include "jointsem/core/sentence.hpp"

namespace jointsem {

/// Micro-averaged counts; every ratio is 0 when its denominator is 0.
struct Prf {
  long correct = 0;
  long predicted = 0;
  long gold = 0;

  double precision() const { return predicted == 0 ? 0.0 : static_cast<double>(correct) / predicted; }
  double recall() const { return gold == 0 ? 0.0 : static_cast<double>(correct) / gold; }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  Prf& operator+=(const Prf& o) {
    correct += o.correct;
    predicted += o.predicted;
    gold += o.gold;
    return *this;
  }
};

struct FnEvalResult {
  /// (target, frame) and (target, span, role) parts, exact match.
  Prf parts;
  long targets = 0;
  long frames_correct = 0;
  long ambiguous_targets = 0;
  long ambiguous_correct = 0;

  double frame_accuracy() const { return targets == 0 ? 0.0 : static_cast<double>(frames_correct) / targets; }
  double ambiguous_accuracy() const {
    return ambiguous_targets == 0 ? 0.0 : static_cast<double>(ambiguous_correct) / ambiguous_targets;
  }
};

/// Sentences are aligned by position and must agree on id and length; each
/// predicted parse is matched to the gold parse with the same target.
/// Throws ValidationError on misalignment.
FnEvalResult eval_frames(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted,
                         const Ontology& ontology);

/// Labeled (head, dependent, label) triples; top adds a (root, top, "") triple.
Prf eval_sdp(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted,
             bool include_top = true);

struct ErrorBreakdown {
  long frame = 0;
  long role = 0;
  /// Role errors on targets whose frame is correct.
  long role_correct_frame = 0;
  long span = 0;
  long argument = 0;
  long missing = 0;

  long total() const { return frame + role + span + argument + missing; }
  double percent(long count) const { return total() == 0 ? 0.0 : 100.0 * count / total(); }
};

/// Assigns each discrepancy to one category: frame misprediction; matching
/// span with incorrect role; matching role with incorrect (overlapping) span;
/// predicted argument overlapping no gold span; gold argument overlapping no
/// predicted span. Other partial overlaps count as span errors.
ErrorBreakdown error_breakdown(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted);

struct LengthBin {
  int bin = 0;
  long gold = 0;
  long predicted = 0;
  long gold_matched = 0;
  long predicted_matched = 0;

  double precision() const { return predicted == 0 ? 0.0 : static_cast<double>(predicted_matched) / predicted; }
  double recall() const { return gold == 0 ? 0.0 : static_cast<double>(gold_matched) / gold; }
};

/// ⌊log_1.6 ℓ⌋ for an argument of length ℓ ≥ 1.
int length_bin(int length);

/// Per-bin argument precision and recall; empty bins are omitted.
std::vector<LengthBin> length_binned_pr(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted);

/// CSV renderings with a header row.
std::string to_csv(const ErrorBreakdown& breakdown);
std::string to_csv(const std::vector<LengthBin>& bins);

}  // namespace jointsem
