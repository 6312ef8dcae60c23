#include "jointsem/core/sentence.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "jointsem/core/error.hpp"
#include "jointsem/core/ontology.hpp"

namespace jointsem {

void validate(const FrameParse& parse, const Ontology& ontology, int sentence_length,
              int max_span_length) {
  const Target& t = parse.target;
  if (t.start < 0 || t.start > t.end || t.end >= sentence_length) {
    throw ValidationError("target [" + std::to_string(t.start) + "," + std::to_string(t.end) +
                          "] out of range for sentence of length " +
                          std::to_string(sentence_length));
  }
  int lu = ontology.lu_id(t.lu);
  if (lu < 0) throw ValidationError("unknown lexical unit '" + t.lu + "'");
  int frame = ontology.frame_id(parse.frame);
  const auto& frames = ontology.frames_of(lu);
  if (frame < 0 || std::find(frames.begin(), frames.end(), frame) == frames.end()) {
    throw ValidationError("frame '" + parse.frame + "' is not evoked by '" + t.lu + "'");
  }
  std::vector<ArgumentSpan> sorted = parse.arguments;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const ArgumentSpan& a = sorted[k];
    if (a.start < 0 || a.start > a.end || a.end >= sentence_length) {
      throw ValidationError("argument span [" + std::to_string(a.start) + "," +
                            std::to_string(a.end) + "] out of range");
    }
    if (a.length() > max_span_length) {
      throw ValidationError("argument span [" + std::to_string(a.start) + "," +
                            std::to_string(a.end) + "] exceeds the span length cap");
    }
    int role = ontology.role_id(a.role);
    if (role < 0 || !ontology.licenses(frame, role)) {
      throw ValidationError("role '" + a.role + "' is not a role of frame '" + parse.frame + "'");
    }
    if (k > 0 && sorted[k - 1].end >= a.start) {
      throw ValidationError("overlapping arguments at [" + std::to_string(a.start) + "," +
                            std::to_string(a.end) + "]");
    }
  }
}

void validate(const DependencyGraph& graph, int sentence_length) {
  if (graph.top && (*graph.top < 0 || *graph.top >= sentence_length)) {
    throw ValidationError("top index " + std::to_string(*graph.top) + " out of range");
  }
  std::set<std::tuple<int, int, std::string>> seen;
  for (const Arc& arc : graph.arcs) {
    if (arc.head < 0 || arc.head >= sentence_length || arc.dependent < 0 ||
        arc.dependent >= sentence_length) {
      throw ValidationError("arc " + std::to_string(arc.head) + "->" +
                            std::to_string(arc.dependent) + " out of range");
    }
    if (arc.head == arc.dependent) {
      throw ValidationError("self loop on token " + std::to_string(arc.head));
    }
    if (!seen.emplace(arc.head, arc.dependent, arc.label).second) {
      throw ValidationError("duplicate arc " + std::to_string(arc.head) + "->" +
                            std::to_string(arc.dependent) + " " + arc.label);
    }
  }
}

}  // namespace jointsem
