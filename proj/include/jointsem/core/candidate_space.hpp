#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "jointsem/core/ontology.hpp"
#include "jointsem/core/sentence.hpp"

namespace jointsem {

// Parts. Frame, role and label fields hold ontology / label-vocabulary ids.

struct PredicatePart {
  int frame;
};
struct ArgumentPart {
  int frame;
  int start;
  int end;
  int role;
};
struct HeadPart {
  int token;
};
/// head == kRoot marks a top arc.
struct UnlabeledArcPart {
  int head;
  int dependent;
};
struct LabeledArcPart {
  int head;
  int dependent;
  int label;
};
/// Pairs an argument part with an unlabeled arc part (both indices into the space).
struct CrossTaskPart {
  int argument;
  int arc;
};

using Part = std::variant<PredicatePart, ArgumentPart, HeadPart, UnlabeledArcPart, LabeledArcPart,
                          CrossTaskPart>;

enum class PartKind { Predicate, Argument, Head, UnlabeledArc, LabeledArc, CrossTask };

inline PartKind kind_of(const Part& part) { return static_cast<PartKind>(part.index()); }

struct SpaceLimits {
  int max_span_length = 20;
  bool dependencies = true;
  bool cross_task = true;
  bool top_arcs = true;
  /// Head parts for every token (with dependencies).
  bool heads = true;
  int num_labels = 0;
  /// When set, only these (start, end) spans become argument candidates.
  std::optional<std::set<std::pair<int, int>>> allowed_spans;
  /// When set, only these (head, dependent) token pairs become arc candidates.
  /// Top arcs are not filtered.
  std::optional<std::set<std::pair<int, int>>> allowed_arcs;
};

/// Every scoreable part of one decoding instance, with parallel scores and
/// lookup indices. Immutable after construction apart from the score vector.
class CandidateSpace {
 public:
  int length() const { return length_; }
  const std::optional<Target>& target() const { return target_; }
  /// LU id of the target, or -1 without a target.
  int lu() const { return lu_; }

  int size() const { return static_cast<int>(parts_.size()); }
  const Part& part(int index) const { return parts_.at(index); }
  std::span<const Part> parts() const { return parts_; }

  std::vector<double>& scores() { return scores_; }
  const std::vector<double>& scores() const { return scores_; }

  std::span<const int> of_kind(PartKind kind) const {
    return by_kind_[static_cast<int>(kind)];
  }

  /// Index lookups; each returns -1 when the part is absent.
  int predicate_index(int frame) const;
  int argument_index(int frame, int start, int end, int role) const;
  int head_index(int token) const;
  int arc_index(int head, int dependent) const;
  int labeled_arc_index(int head, int dependent, int label) const;

  /// Labeled-arc parts sharing the (head, dependent) of an unlabeled arc part.
  std::span<const int> labels_of_arc(int arc_part) const;
  /// Cross-task parts that reference an argument or an unlabeled arc part.
  std::span<const int> cross_task_of_argument(int argument_part) const;
  std::span<const int> cross_task_of_arc(int arc_part) const;
  /// Unlabeled arc parts leaving a token (kRoot allowed).
  std::span<const int> arcs_from(int head) const;

  /// Copy keeping only the cross-task parts with keep[c] set (indexed by part).
  /// Cross-task parts come last, so every other part keeps its index.
  CandidateSpace retain_cross_task(const std::vector<char>& keep) const;

 private:
  friend CandidateSpace build_candidate_space(const Sentence&, const Target*, const Ontology&,
                                              const SpaceLimits&);
  int add(Part part);

  int length_ = 0;
  std::optional<Target> target_;
  int lu_ = -1;
  std::vector<Part> parts_;
  std::vector<double> scores_;
  std::vector<int> by_kind_[6];
  std::map<int, int> predicate_lookup_;
  std::map<std::tuple<int, int, int, int>, int> argument_lookup_;
  std::map<int, int> head_lookup_;
  std::map<std::pair<int, int>, int> arc_lookup_;
  std::map<std::tuple<int, int, int>, int> labeled_lookup_;
  std::map<int, std::vector<int>> arc_labels_;
  std::map<int, std::vector<int>> argument_cross_;
  std::map<int, std::vector<int>> arc_cross_;
  std::map<int, std::vector<int>> arcs_from_;
};

/// Enumerates all parts for a sentence and an optional target.
///
/// With a target: one predicate part per frame of the LU and one argument part
/// per (frame, span, licensed role) with span length within the cap. With
/// dependencies: a head part per token, unlabeled and labeled arcs for every
/// ordered token pair, plus top arcs from the virtual root. Cross-task parts
/// pair each argument with each unlabeled arc from the first target token to a
/// token inside the argument span.
CandidateSpace build_candidate_space(const Sentence& sentence, const Target* target,
                                     const Ontology& ontology, const SpaceLimits& limits);

/// Part indices of a gold frame parse within the space. Parts that were pruned
/// away are skipped.
std::vector<int> gold_frame_parts(const CandidateSpace& space, const FrameParse& gold,
                                  const Ontology& ontology);

/// Part indices of a gold dependency graph: heads of tokens with outgoing arcs,
/// unlabeled and labeled arcs, and the top arc. label_id maps label strings to
/// ids and returns -1 for unknown labels, which are skipped.
template <typename LabelLookup>
std::vector<int> gold_dependency_parts(const CandidateSpace& space, const DependencyGraph& gold,
                                       LabelLookup&& label_id);

/// Active parts implied by a set of active within-task parts: adds every
/// cross-task part whose argument and arc are both active. Output is sorted.
std::vector<int> close_over_cross_task(const CandidateSpace& space, std::vector<int> active);

// ---------------------------------------------------------------------------

template <typename LabelLookup>
std::vector<int> gold_dependency_parts(const CandidateSpace& space, const DependencyGraph& gold,
                                       LabelLookup&& label_id) {
  std::set<int> parts;
  for (const Arc& arc : gold.arcs) {
    if (int u = space.arc_index(arc.head, arc.dependent); u >= 0) parts.insert(u);
    int label = label_id(arc.label);
    if (label >= 0) {
      if (int l = space.labeled_arc_index(arc.head, arc.dependent, label); l >= 0) parts.insert(l);
    }
    if (int h = space.head_index(arc.head); h >= 0) parts.insert(h);
  }
  if (gold.top) {
    if (int t = space.arc_index(kRoot, *gold.top); t >= 0) parts.insert(t);
  }
  return {parts.begin(), parts.end()};
}

}  // namespace jointsem
