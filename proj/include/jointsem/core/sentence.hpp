#pragma once

#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace jointsem {

class Ontology;

/// Index of the virtual root. Top arcs are arcs whose head is kRoot.
inline constexpr int kRoot = -1;

struct Token {
  std::string form;
  std::string lemma;
  std::string pos;
};

/// A frame-evoking span. Indices are 0-based and inclusive.
struct Target {
  int start = 0;
  int end = 0;
  std::string lu;

  friend bool operator==(const Target&, const Target&) = default;
};

struct ArgumentSpan {
  int start = 0;
  int end = 0;
  std::string role;

  int length() const { return end - start + 1; }
  friend auto operator<=>(const ArgumentSpan&, const ArgumentSpan&) = default;
};

struct FrameParse {
  Target target;
  std::string frame;
  std::vector<ArgumentSpan> arguments;
};

struct Arc {
  int head = 0;
  int dependent = 0;
  std::string label;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

struct DependencyGraph {
  std::optional<int> top;
  std::vector<Arc> arcs;
};

struct FrameAnnotations {
  std::vector<FrameParse> parses;
};

/// Corpora are disjoint, so a sentence carries at most one kind of supervision.
using Supervision = std::variant<std::monostate, FrameAnnotations, DependencyGraph>;

struct Sentence {
  std::string id;
  std::vector<Token> tokens;
  Supervision supervision;

  int size() const { return static_cast<int>(tokens.size()); }
  const FrameAnnotations* frames() const { return std::get_if<FrameAnnotations>(&supervision); }
  const DependencyGraph* graph() const { return std::get_if<DependencyGraph>(&supervision); }
};

/// Throws ValidationError unless the parse satisfies every structural
/// invariant: known LU and frame, licensed roles, in-bounds and
/// non-overlapping argument spans no longer than max_span_length.
void validate(const FrameParse& parse, const Ontology& ontology, int sentence_length,
              int max_span_length);

/// Throws ValidationError on self loops, duplicate labeled arcs or
/// out-of-range indices.
void validate(const DependencyGraph& graph, int sentence_length);

}  // namespace jointsem
