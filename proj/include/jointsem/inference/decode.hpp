#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jointsem/core/candidate_space.hpp"
#include "jointsem/core/cost.hpp"
#include "jointsem/core/ontology.hpp"
#include "jointsem/inference/ad3.hpp"
#include "jointsem/inference/factor_graph.hpp"

namespace jointsem {

enum class DecodeMode {
  /// Frames and dependencies together, cross-task parts included.
  Joint,
  /// Frame parts are left out of the graph entirely.
  DependenciesOnly,
  /// Frame and argument variables clamped to the gold parse; dependencies free.
  LatentCompletion,
};

struct DecodeOptions {
  DecodeMode mode = DecodeMode::Joint;
  /// Gold frame parts (part indices); required by LatentCompletion.
  std::vector<int> gold_frame;
  /// Labels allowed on at most one outgoing arc per token.
  std::vector<int> deterministic_labels;
  /// Pair factors with |score| at or below this are not built.
  double drop_epsilon = -1.0;
  Ad3Options solver;
  /// Solve with the exhaustive oracle instead of AD3 (small graphs only).
  bool use_brute_force = false;
};

/// Factor graph for a scored candidate space. Variables cover every part
/// except cross-task parts, which become Pair factors between their argument
/// and arc variables. var_of_part maps part index to variable (or -1).
struct BuiltGraph {
  FactorGraph graph;
  std::vector<int> var_of_part;
};

BuiltGraph build_factor_graph(const CandidateSpace& space, std::span<const double> scores,
                              const DecodeOptions& options);

struct Decoded {
  /// Active part indices, sorted, including implied cross-task parts.
  std::vector<int> parts;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Exact;
  int iterations = 0;
};

/// MAP decoding over the space's own scores, or over `scores` when given.
Decoded decode(const CandidateSpace& space, const DecodeOptions& options,
               std::span<const double> scores = {});

/// Sum of scores of the given parts.
double total_score(std::span<const double> scores, std::span<const int> parts);

/// Scores shifted by +fp for parts outside `gold` and −fn for parts in it,
/// restricted to parts accepted by `costed` (all parts when empty).
std::vector<double> cost_augment(std::span<const double> scores, std::span<const int> gold,
                                 const std::vector<char>& costed, const CostConfig& cost = {});

/// Copy of the space without cross-task parts whose |score| ≤ epsilon.
CandidateSpace drop_sparse_cross_task(const CandidateSpace& space, double epsilon);

/// Structures read off an active part set.
std::optional<FrameParse> frame_parse_of(const CandidateSpace& space, std::span<const int> parts,
                                         const Ontology& ontology);
DependencyGraph dependency_graph_of(const CandidateSpace& space, std::span<const int> parts,
                                    const std::vector<std::string>& labels);

}  // namespace jointsem
