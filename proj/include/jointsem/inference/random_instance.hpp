#pragma once

#include <random>
#include <vector>

#include "jointsem/core/candidate_space.hpp"
#include "jointsem/core/ontology.hpp"
#include "jointsem/core/sentence.hpp"
#include "jointsem/inference/decode.hpp"

namespace jointsem {

struct RandomInstanceConfig {
  int max_length = 6;
  int max_frames = 2;
  int max_roles = 3;
  int max_labels = 2;
  /// Candidate spans and arcs are subsampled until the graph has at most
  /// this many free variables.
  int max_free_variables = 24;
  double score_scale = 1.0;
};

/// A small scored joint instance: one target with its frames and roles,
/// pruned span and arc candidates, labels and cross-task parts.
struct RandomInstance {
  Ontology ontology;
  Sentence sentence;
  Target target;
  CandidateSpace space;
  std::vector<int> deterministic_labels;
};

RandomInstance random_joint_instance(std::mt19937_64& rng, const RandomInstanceConfig& config = {});

/// Number of graph variables the space produces under joint decoding.
int joint_variable_count(const CandidateSpace& space);

struct OracleReport {
  int instances = 0;
  int exact = 0;
  int assignment_mismatches = 0;
  double max_gap = 0.0;
};

/// Decodes `count` random instances with AD3 and the exhaustive oracle and
/// compares objectives and assignments.
OracleReport run_oracle_check(int count, std::uint64_t seed, const RandomInstanceConfig& config = {},
                              const Ad3Options& solver = {});

}  // namespace jointsem
