#pragma once

#include <cstdint>
#include <vector>

#include "jointsem/core/ontology.hpp"
#include "jointsem/core/sentence.hpp"

namespace jointsem {

struct SyntheticConfig {
  int fn_train = 200;
  int dm_train = 200;
  int fn_dev = 50;
  int dm_dev = 50;
  std::uint64_t seed = 1;
};

/// Disjoint frame-annotated and dependency-annotated sentences drawn from one
/// clause grammar: [Det Adj? Noun] Verb [Det Adj? Noun]? [Prep Det Noun]?.
/// Ambiguous verbs take their frame from the class of the object noun, and the
/// dependency arcs from the verb reach the heads of its argument phrases.
struct SyntheticCorpus {
  Ontology ontology;
  std::vector<Sentence> fn_train, fn_dev, dm_train, dm_dev;
};

SyntheticCorpus generate_synthetic(const SyntheticConfig& config = {});

}  // namespace jointsem
