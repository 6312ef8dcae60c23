#include "jointsem/core/candidate_space.hpp"

#include <algorithm>

#include "jointsem/core/error.hpp"

namespace jointsem {

namespace {

template <typename Map, typename Key>
int lookup(const Map& map, const Key& key) {
  auto it = map.find(key);
  return it == map.end() ? -1 : it->second;
}

std::span<const int> lookup_list(const std::map<int, std::vector<int>>& map, int key) {
  auto it = map.find(key);
  if (it == map.end()) return {};
  return it->second;
}

}  // namespace

int CandidateSpace::add(Part part) {
  int index = size();
  by_kind_[part.index()].push_back(index);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PredicatePart>) {
          predicate_lookup_[p.frame] = index;
        } else if constexpr (std::is_same_v<T, ArgumentPart>) {
          argument_lookup_[{p.frame, p.start, p.end, p.role}] = index;
        } else if constexpr (std::is_same_v<T, HeadPart>) {
          head_lookup_[p.token] = index;
        } else if constexpr (std::is_same_v<T, UnlabeledArcPart>) {
          arc_lookup_[{p.head, p.dependent}] = index;
          arcs_from_[p.head].push_back(index);
        } else if constexpr (std::is_same_v<T, LabeledArcPart>) {
          labeled_lookup_[{p.head, p.dependent, p.label}] = index;
          arc_labels_[arc_lookup_.at({p.head, p.dependent})].push_back(index);
        } else {
          argument_cross_[p.argument].push_back(index);
          arc_cross_[p.arc].push_back(index);
        }
      },
      part);
  parts_.push_back(part);
  scores_.push_back(0.0);
  return index;
}

int CandidateSpace::predicate_index(int frame) const { return lookup(predicate_lookup_, frame); }

int CandidateSpace::argument_index(int frame, int start, int end, int role) const {
  return lookup(argument_lookup_, std::make_tuple(frame, start, end, role));
}

int CandidateSpace::head_index(int token) const { return lookup(head_lookup_, token); }

int CandidateSpace::arc_index(int head, int dependent) const {
  return lookup(arc_lookup_, std::make_pair(head, dependent));
}

int CandidateSpace::labeled_arc_index(int head, int dependent, int label) const {
  return lookup(labeled_lookup_, std::make_tuple(head, dependent, label));
}

std::span<const int> CandidateSpace::labels_of_arc(int arc_part) const {
  return lookup_list(arc_labels_, arc_part);
}

std::span<const int> CandidateSpace::cross_task_of_argument(int argument_part) const {
  return lookup_list(argument_cross_, argument_part);
}

std::span<const int> CandidateSpace::cross_task_of_arc(int arc_part) const {
  return lookup_list(arc_cross_, arc_part);
}

std::span<const int> CandidateSpace::arcs_from(int head) const {
  return lookup_list(arcs_from_, head);
}

CandidateSpace CandidateSpace::retain_cross_task(const std::vector<char>& keep) const {
  CandidateSpace out = *this;
  auto cross = by_kind_[static_cast<int>(PartKind::CrossTask)];
  if (cross.empty()) return out;
  const int first = cross.front();
  out.parts_.resize(first);
  out.scores_.resize(first);
  out.by_kind_[static_cast<int>(PartKind::CrossTask)].clear();
  out.argument_cross_.clear();
  out.arc_cross_.clear();
  for (int c : cross) {
    if (!keep.at(c)) continue;
    int index = out.add(parts_[c]);
    out.scores_[index] = scores_[c];
  }
  return out;
}

CandidateSpace build_candidate_space(const Sentence& sentence, const Target* target,
                                     const Ontology& ontology, const SpaceLimits& limits) {
  const int n = sentence.size();
  if (n == 0) throw ValidationError("cannot build candidates for an empty sentence");

  CandidateSpace space;
  space.length_ = n;

  if (target != nullptr) {
    int lu = ontology.lu_id(target->lu);
    if (lu < 0) throw ValidationError("unknown lexical unit '" + target->lu + "'");
    if (target->start < 0 || target->start > target->end || target->end >= n) {
      throw ValidationError("target out of range for lexical unit '" + target->lu + "'");
    }
    space.target_ = *target;
    space.lu_ = lu;
    const auto& frames = ontology.frames_of(lu);
    for (int frame : frames) space.add(PredicatePart{frame});
    for (int frame : frames) {
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n && j - i + 1 <= limits.max_span_length; ++j) {
          if (limits.allowed_spans && !limits.allowed_spans->count({i, j})) continue;
          for (int role : ontology.roles_of(frame)) space.add(ArgumentPart{frame, i, j, role});
        }
      }
    }
  }

  if (limits.dependencies) {
    if (limits.heads) {
      for (int h = 0; h < n; ++h) space.add(HeadPart{h});
    }
    if (limits.top_arcs) {
      for (int d = 0; d < n; ++d) space.add(UnlabeledArcPart{kRoot, d});
    }
    std::vector<std::pair<int, int>> pairs;
    for (int h = 0; h < n; ++h) {
      for (int d = 0; d < n; ++d) {
        if (h == d) continue;
        if (limits.allowed_arcs && !limits.allowed_arcs->count({h, d})) continue;
        pairs.emplace_back(h, d);
      }
    }
    for (auto [h, d] : pairs) space.add(UnlabeledArcPart{h, d});
    for (auto [h, d] : pairs) {
      for (int label = 0; label < limits.num_labels; ++label) {
        space.add(LabeledArcPart{h, d, label});
      }
    }

    if (target != nullptr && limits.cross_task) {
      const int head = target->start;
      // Copy: add() appends to the per-kind index lists while we iterate.
      std::vector<int> arguments(space.of_kind(PartKind::Argument).begin(),
                                 space.of_kind(PartKind::Argument).end());
      for (int a : arguments) {
        const ArgumentPart arg = std::get<ArgumentPart>(space.part(a));  // add() may reallocate parts
        for (int k = arg.start; k <= arg.end; ++k) {
          int arc = space.arc_index(head, k);
          if (arc >= 0) space.add(CrossTaskPart{a, arc});
        }
      }
    }
  }
  return space;
}

std::vector<int> gold_frame_parts(const CandidateSpace& space, const FrameParse& gold,
                                  const Ontology& ontology) {
  std::vector<int> parts;
  int frame = ontology.frame_id(gold.frame);
  if (frame < 0) return parts;
  if (int p = space.predicate_index(frame); p >= 0) parts.push_back(p);
  for (const ArgumentSpan& arg : gold.arguments) {
    int role = ontology.role_id(arg.role);
    if (role < 0) continue;
    if (int a = space.argument_index(frame, arg.start, arg.end, role); a >= 0) parts.push_back(a);
  }
  std::sort(parts.begin(), parts.end());
  return parts;
}

std::vector<int> close_over_cross_task(const CandidateSpace& space, std::vector<int> active) {
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  std::vector<char> on(space.size(), 0);
  for (int p : active) on[p] = 1;
  for (int c : space.of_kind(PartKind::CrossTask)) {
    const auto& part = std::get<CrossTaskPart>(space.part(c));
    if (on[part.argument] && on[part.arc] && !on[c]) {
      on[c] = 1;
      active.push_back(c);
    }
  }
  std::sort(active.begin(), active.end());
  return active;
}

}  // namespace jointsem
